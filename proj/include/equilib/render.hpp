// Static SVG output: boundary loops as stroked paths, optional particle
// scatter, equal-aspect panels arranged in a grid.
#pragma once

#include <algorithm>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "equilib/conformal.hpp"
#include "equilib/io.hpp"
#include "equilib/params.hpp"

namespace equilib {

struct SvgPanel {
  BoundaryCurve curve;
  std::vector<cplx> particles;
  std::string label;
};

namespace detail {

struct PanelBox {
  double x0, y0, scale, cx, cy, side;
};

inline void append_panel(std::ostringstream& os, const SvgPanel& panel, double px, double py,
                         double side) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin, ymin = xmin, ymax = -xmin;
  auto grow = [&](cplx z) {
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, z.imag());
    ymax = std::max(ymax, z.imag());
  };
  for (const auto& comp : panel.curve.components) {
    for (const cplx& z : comp) grow(z);
  }
  for (const cplx& z : panel.particles) grow(z);
  if (!(xmax > xmin)) {
    xmin = -1.0; xmax = 1.0; ymin = -1.0; ymax = 1.0;
  }
  const double margin = 0.08 * std::max(xmax - xmin, ymax - ymin);
  xmin -= margin; xmax += margin; ymin -= margin; ymax += margin;
  const double plot = side - 24.0;  // space for the label strip
  const double scale = plot / std::max(xmax - xmin, ymax - ymin);  // equal aspect
  const double cx = 0.5 * (xmin + xmax);
  const double cy = 0.5 * (ymin + ymax);
  auto X = [&](double x) { return px + 0.5 * side + (x - cx) * scale; };
  auto Y = [&](double y) { return py + 12.0 + 0.5 * plot - (y - cy) * scale; };

  os << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << side << "\" height=\"" << side
     << "\" fill=\"white\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  // axes, when they cross the panel
  if (xmin < 0.0 && xmax > 0.0) {
    os << "<line x1=\"" << X(0) << "\" y1=\"" << Y(ymin + margin) << "\" x2=\"" << X(0)
       << "\" y2=\"" << Y(ymax - margin) << "\" stroke=\"#ccc\" stroke-width=\"0.7\"/>\n";
  }
  if (ymin < 0.0 && ymax > 0.0) {
    os << "<line x1=\"" << X(xmin + margin) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(xmax - margin)
       << "\" y2=\"" << Y(0) << "\" stroke=\"#ccc\" stroke-width=\"0.7\"/>\n";
  }
  for (const auto& comp : panel.curve.components) {
    os << "<path d=\"";
    for (std::size_t k = 0; k < comp.size(); ++k) {
      os << (k == 0 ? 'M' : 'L') << X(comp[k].real()) << ' ' << Y(comp[k].imag());
    }
    os << "Z\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.4\"/>\n";
  }
  for (const cplx& z : panel.particles) {
    os << "<circle cx=\"" << X(z.real()) << "\" cy=\"" << Y(z.imag())
       << "\" r=\"1.4\" fill=\"#c0392b\"/>\n";
  }
  os << "<text x=\"" << px + 6.0 << "\" y=\"" << py + side - 6.0
     << "\" font-family=\"sans-serif\" font-size=\"11\">" << panel.label << " | components: "
     << panel.curve.components.size() << "</text>\n";
}

}  // namespace detail

inline std::string render_svg(const std::vector<SvgPanel>& panels, int columns,
                              double panel_side = 260.0) {
  const int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
  const double width = columns * panel_side;
  const double height = rows * panel_side;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double px = static_cast<double>(i % columns) * panel_side;
    const double py = static_cast<double>(i / columns) * panel_side;
    detail::append_panel(os, panels[i], px, py, panel_side);
  }
  os << "</svg>\n";
  return os.str();
}

struct LadderResult {
  std::string svg;
  std::vector<int> rotated_component_counts;  // one entry per ratio row
};

// Two-column ladder: reduced support on the left, d-fold rotated support on
// the right, one row per coupling ratio |t|/t_cr.
inline LadderResult render_support_ladder(int n, int d, double T,
                                          const std::vector<double>& ratios, int samples,
                                          double t_phase = 0.0) {
  LadderResult out;
  std::vector<SvgPanel> panels;
  const ProblemSpec base{n, d, T, cplx{0.0, 0.0}};
  const double tcr = critical_threshold(base);
  for (const double ratio : ratios) {
    ProblemSpec ps = base;
    ps.t = std::polar(ratio * tcr, t_phase);
    const MapParams mp = solve(ps);
    SvgPanel left;
    left.curve = sample_boundary(make_reduced_map(mp), samples);
    {
      std::ostringstream label;
      label << "reduced, t/t_cr=" << ratio;
      left.label = label.str();
    }
    SvgPanel right;
    right.curve = sample_boundary(make_rotated_map(mp), samples);
    {
      std::ostringstream label;
      label << "rotated d=" << d << ", t/t_cr=" << ratio;
      right.label = label.str();
    }
    out.rotated_component_counts.push_back(static_cast<int>(right.curve.components.size()));
    panels.push_back(std::move(left));
    panels.push_back(std::move(right));
  }
  out.svg = render_svg(panels, 2);
  return out;
}

}  // namespace equilib
