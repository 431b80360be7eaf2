// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#include "dimfac/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "dimfac/error.hpp"

namespace dimfac {

namespace {

constexpr std::array<const char*, 10> kPalette = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                                  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
constexpr const char* kUnowned = "#dddddd";

const char* color(int i) {
  return i < 0 ? kUnowned : kPalette[static_cast<std::size_t>(i) % kPalette.size()];
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct View {
  Rect box;
  double scale = 1.0;
  double pad = 16.0;
  double px(double x) const { return pad + (x - box.x_lo) * scale; }
  double py(double y) const { return pad + (box.y_hi - y) * scale; }
};

std::string polygon_path(const View& v, const std::vector<Point>& pts, Point offset) {
  std::string d;
  for (std::size_t s = 0; s < pts.size(); ++s)
    d += fmt::format("{}{:.3f},{:.3f} ", s == 0 ? "M" : "L", v.px(pts[s].x + offset.x), v.py(pts[s].y + offset.y));
  d += "Z";
  return d;
}

}  // namespace

std::string render_svg(const Problem& p, const Placement& placement, const Evaluation& ev, const SvgOptions& opt) {
  const DiscretizedInstance& di = p.di;
  if (static_cast<int>(placement.size()) != di.rho())
    throw Error(Errc::mismatch, fmt::format("placement has {} facilities, instance has {}", placement.size(), di.rho()));
  const Allocation& al = ev.allocation;
  if (al.owner.size() != static_cast<std::size_t>(di.size()))
    throw Error(Errc::mismatch, fmt::format("allocation covers {} cells, instance has {}", al.owner.size(), di.size()));
  if (!(opt.width > 0.0)) throw Error(Errc::invalid_argument, "width must be positive");

  View v;
  const Rect gb = di.grid.bbox;
  const Rect rb = di.region.bbox();
  v.box = {std::min(gb.x_lo, rb.x_lo), std::max(gb.x_hi, rb.x_hi), std::min(gb.y_lo, rb.y_lo),
           std::max(gb.y_hi, rb.y_hi)};
  v.scale = opt.width / v.box.width();
  const double draw_h = v.box.height() * v.scale;
  const int rho = di.rho();
  const double legend_w = 260.0;
  const double legend_h = 22.0 * (rho + 2);
  const double total_w = opt.width + 2 * v.pad + legend_w;
  const double total_h = std::max(draw_h + 2 * v.pad, legend_h + 2 * v.pad);

  auto name = [&](int i) {
    return static_cast<std::size_t>(i) < opt.names.size() ? opt.names[static_cast<std::size_t>(i)]
                                                           : fmt::format("P{}", i + 1);
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.3f} {:.3f}\">\n",
      std::ceil(total_w), std::ceil(total_h), total_w, total_h);
  out += "<defs>\n";
  for (int i = 0; i < rho; ++i) {
    out += fmt::format(
        "  <pattern id=\"hatch{}\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\" "
        "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"{}\"/>"
        "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#000000\" stroke-width=\"1.5\"/></pattern>\n",
        i, color(i));
  }
  out += "</defs>\n";
  out += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  out += "<g id=\"cells\">\n";
  for (int c = 0; c < di.size(); ++c) {
    const Rect r = di.grid.cell_rect(di.cells[static_cast<std::size_t>(c)]);
    const int owner = al.owner[static_cast<std::size_t>(c)];
    const bool covered = !al.covered.empty() && al.covered[static_cast<std::size_t>(c)] != 0;
    const std::string fill = covered && owner >= 0 ? fmt::format("url(#hatch{})", owner) : std::string(color(owner));
    out += fmt::format(
        "  <rect class=\"cell\" x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"{}\" "
        "fill-opacity=\"{}\"/>\n",
        v.px(r.x_lo), v.py(r.y_hi), (r.x_hi - r.x_lo) * v.scale, (r.y_hi - r.y_lo) * v.scale, fill,
        covered ? "0.9" : "0.55");
  }
  out += "</g>\n";

  if (opt.show_grid) {
    std::string d;
    for (int k = 0; k <= di.grid.nx; ++k) {
      const double x = gb.x_lo + k * di.grid.hx();
      d += fmt::format("M{:.3f},{:.3f} L{:.3f},{:.3f} ", v.px(x), v.py(gb.y_lo), v.px(x), v.py(gb.y_hi));
    }
    for (int l = 0; l <= di.grid.ny; ++l) {
      const double y = gb.y_lo + l * di.grid.hy();
      d += fmt::format("M{:.3f},{:.3f} L{:.3f},{:.3f} ", v.px(gb.x_lo), v.py(y), v.px(gb.x_hi), v.py(y));
    }
    d.pop_back();
    out += fmt::format("<path class=\"grid\" d=\"{}\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n", d);
  }

  out += fmt::format("<path class=\"region\" d=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>\n",
                     polygon_path(v, di.region.vertices(), {0.0, 0.0}));

  out += "<g id=\"facilities\">\n";
  for (int i = 0; i < rho; ++i) {
    const Point root = cell_center(di.grid, placement[static_cast<std::size_t>(i)]);
    out += fmt::format(
        "  <path class=\"facility\" d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2.5\"><title>{}</title></path>\n",
        polygon_path(v, di.shapes[static_cast<std::size_t>(i)].outline(), root), color(i), escape(name(i)));
    out += fmt::format("  <circle class=\"root\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"2.5\" fill=\"#000000\"/>\n",
                       v.px(root.x), v.py(root.y));
  }
  out += "</g>\n";

  const double lx = opt.width + 2 * v.pad + 8.0;
  out += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  double ly = v.pad;
  for (int i = 0; i < rho; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double assigned = ui < al.assigned_mass.size() ? al.assigned_mass[ui] : 0.0;
    const double installed = ui < al.install_mass.size() ? al.install_mass[ui] : 0.0;
    out += fmt::format(
        "  <rect class=\"swatch\" x=\"{:.3f}\" y=\"{:.3f}\" width=\"14\" height=\"14\" fill=\"{}\"/>"
        "<text x=\"{:.3f}\" y=\"{:.3f}\">{} demand {:.6f} covered {:.6f}</text>\n",
        lx, ly, color(i), lx + 20, ly + 11, escape(name(i)), assigned, installed);
    ly += 22.0;
  }
  out += fmt::format("  <text x=\"{:.3f}\" y=\"{:.3f}\">lost {:.6f}</text>\n", lx, ly + 11, al.lost_mass);
  out += fmt::format("  <text x=\"{:.3f}\" y=\"{:.3f}\">total {:.9g}</text>\n", lx, ly + 33, ev.total);
  out += "</g>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace dimfac
