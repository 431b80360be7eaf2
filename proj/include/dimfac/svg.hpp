// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors
//
// SVG 1.1 figure of a placement: region outline, cells filled by owner
// (covered cells hatched), facility outlines and a legend with masses.

#pragma once

#include <string>
#include <vector>

#include "dimfac/evaluate.hpp"

namespace dimfac {

struct SvgOptions {
  double width = 640.0;  // drawing width in px, legend excluded
  bool show_grid = false;
  std::vector<std::string> names;  // legend labels, default P1..Pn
};

// Output is a pure function of the inputs. Emits exactly one
// <rect class="cell"> per omega cell and one <path class="facility"> per
// facility.
std::string render_svg(const Problem& p, const Placement& placement, const Evaluation& ev,
                       const SvgOptions& opt = {});

}  // namespace dimfac
