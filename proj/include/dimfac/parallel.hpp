// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#pragma once

#include <cstddef>
#include <functional>

namespace dimfac {

// Thread count used when a caller passes 0: DIMFAC_THREADS if set to a
// positive integer, else std::thread::hardware_concurrency().
int default_threads();

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
// Indices are handed out in contiguous blocks; the call returns after every
// index completed. The first exception thrown by any body is rethrown.
// Callers write into per-index slots so results never depend on scheduling.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace dimfac
