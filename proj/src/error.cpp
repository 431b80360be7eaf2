// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include "dimfac/error.hpp"

namespace dimfac {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::io: return "io";
    case Errc::config: return "config";
    case Errc::syntax: return "syntax";
    case Errc::unknown_variable: return "unknown_variable";
    case Errc::domain: return "domain";
    case Errc::degenerate_shape: return "degenerate_shape";
    case Errc::unsupported_shape: return "unsupported_shape";
    case Errc::infeasible: return "infeasible";
    case Errc::unsuitable: return "unsuitable";
    case Errc::size_limit: return "size_limit";
    case Errc::construction_failure: return "construction_failure";
    case Errc::monotonicity: return "monotonicity";
    case Errc::negativity: return "negativity";
    case Errc::mismatch: return "mismatch";
  }
  return "unknown";
}

}  // namespace dimfac
