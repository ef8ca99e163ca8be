#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gridsched/cli/format.hpp"

namespace gridsched {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), y expected in [0, 1]
};

inline constexpr int kSvgMaxVertices = 2000;

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// Standalone line chart: one polyline per series, clipped to [0, 1] on y,
// stride-decimated to at most kSvgMaxVertices vertices per series.
inline std::string emit_svg(const std::vector<SvgSeries>& series, const std::string& title,
                            const std::string& x_label = "step",
                            const std::string& y_label = "solve rate") {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  const double w = 900, h = 460;
  const double ml = 70, mr = 160, mt = 40, mb = 50;
  const double pw = w - ml - mr, ph = h - mt - mb;

  double xmin = 0.0, xmax = 1.0;
  bool have = false;
  for (const SvgSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!have) {
        xmin = xmax = x;
        have = true;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + (1.0 - std::clamp(y, 0.0, 1.0)) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + detail::svg_num(w) + " " +
         detail::svg_num(h) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + detail::svg_num(w / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" +
         title + "</text>\n";

  // axes and ticks
  out += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(mt + ph) + "\" x2=\"" +
         detail::svg_num(ml + pw) + "\" y2=\"" + detail::svg_num(mt + ph) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(mt) + "\" x2=\"" +
         detail::svg_num(ml) + "\" y2=\"" + detail::svg_num(mt + ph) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double gx = px(fx);
    out += "<line x1=\"" + detail::svg_num(gx) + "\" y1=\"" + detail::svg_num(mt + ph) + "\" x2=\"" +
           detail::svg_num(gx) + "\" y2=\"" + detail::svg_num(mt + ph + 5) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::svg_num(gx) + "\" y=\"" + detail::svg_num(mt + ph + 18) +
           "\" text-anchor=\"middle\">" + format_float(fx) + "</text>\n";
    const double fy = i / 5.0;
    const double gy = py(fy);
    out += "<line x1=\"" + detail::svg_num(ml - 5) + "\" y1=\"" + detail::svg_num(gy) + "\" x2=\"" +
           detail::svg_num(ml) + "\" y2=\"" + detail::svg_num(gy) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::svg_num(ml - 8) + "\" y=\"" + detail::svg_num(gy + 4) +
           "\" text-anchor=\"end\">" + detail::svg_num(fy) + "</text>\n";
  }
  out += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"" + detail::svg_num(h - 10) +
         "\" text-anchor=\"middle\">" + x_label + "</text>\n";
  out += "<text x=\"16\" y=\"" + detail::svg_num(mt + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         detail::svg_num(mt + ph / 2) + ")\">" + y_label + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const SvgSeries& s = series[si];
    const char* color = kColors[si % (sizeof(kColors) / sizeof(kColors[0]))];
    if (s.points.empty()) continue;
    const std::size_t stride =
        (s.points.size() + kSvgMaxVertices - 1) / kSvgMaxVertices;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.points.size(); i += stride) pts.push_back(s.points[i]);
    if ((s.points.size() - 1) % stride != 0) pts.push_back(s.points.back());
    if (pts.size() == 1) {
      out += "<circle cx=\"" + detail::svg_num(px(pts[0].first)) + "\" cy=\"" +
             detail::svg_num(py(pts[0].second)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    } else {
      out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) out += ' ';
        out += detail::svg_num(px(pts[i].first)) + "," + detail::svg_num(py(pts[i].second));
      }
      out += "\"/>\n";
    }
    const double ly = mt + 16 + 18 * static_cast<double>(si);
    out += "<line x1=\"" + detail::svg_num(ml + pw + 10) + "\" y1=\"" + detail::svg_num(ly - 4) +
           "\" x2=\"" + detail::svg_num(ml + pw + 30) + "\" y2=\"" + detail::svg_num(ly - 4) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + detail::svg_num(ml + pw + 35) + "\" y=\"" + detail::svg_num(ly) + "\">" +
           s.label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gridsched
