#pragma once
// Self-contained SVG log-log scatter with the fitted power law overlaid.
// Coordinates print with fixed precision; the output for a given report is
// byte-stable.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "mlr/cli/csvx.hpp"
#include "mlr/experiments/measure.hpp"

namespace mlr {

namespace svg_detail {

inline std::string fp(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace svg_detail

// Plots log10 A against log10 R. Points with A <= 0 are dropped; if a fit
// exists the line log A = slope log R + intercept/ln10 is drawn across the
// R range and labeled with the slope.
inline std::string svg_loglog(const EstimateReport& rep, const std::string& title) {
  using svg_detail::fp;
  const int W = 640, H = 480, ML = 64, MR = 24, MT = 40, MB = 48;
  std::vector<std::pair<double, double>> pts;  // (log10 R, log10 A)
  for (const auto& p : rep.points)
    if (p.R > 0.0 && p.A_emp > 0.0) pts.push_back({std::log10(p.R), std::log10(p.A_emp)});

  double x0 = 0.0, x1 = 1.0, y0 = -1.0, y1 = 0.0;
  if (!pts.empty()) {
    x0 = x1 = pts[0].first;
    y0 = y1 = pts[0].second;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 - x0 < 1e-9) x1 = x0 + 1.0;
  if (y1 - y0 < 1e-9) y1 = y0 + 1.0;
  const double xpad = 0.06 * (x1 - x0), ypad = 0.10 * (y1 - y0);
  x0 -= xpad;
  x1 += xpad;
  y0 -= ypad;
  y1 += ypad;

  const auto px = [&](double lx) { return ML + (lx - x0) / (x1 - x0) * (W - ML - MR); };
  const auto py = [&](double ly) { return H - MB - (ly - y0) / (y1 - y0) * (H - MT - MB); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR << "\" height=\""
     << H - MT - MB << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
     << "</text>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">log10 R</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << H / 2
     << ")\">log10 A</text>\n";

  // Ticks at every recorded R and at integer decades of A.
  for (const auto& p : rep.points) {
    if (p.R <= 0.0) continue;
    const double x = px(std::log10(p.R));
    os << "<line x1=\"" << fp(x) << "\" y1=\"" << H - MB << "\" x2=\"" << fp(x) << "\" y2=\""
       << H - MB + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fp(x) << "\" y=\"" << H - MB + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << csv_num(p.R) << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d) {
    const double y = py(d);
    os << "<line x1=\"" << ML - 5 << "\" y1=\"" << fp(y) << "\" x2=\"" << ML << "\" y2=\""
       << fp(y) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << ML - 8 << "\" y=\"" << fp(y + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << d << "</text>\n";
  }

  if (!rep.degenerate_fit && pts.size() >= 2) {
    // slope/intercept live in natural log; rescale to base 10 for drawing.
    const double lx0 = pts.front().first, lx1 = pts.back().first;
    const double c = rep.intercept / std::log(10.0);
    os << "<line x1=\"" << fp(px(lx0)) << "\" y1=\"" << fp(py(rep.slope * lx0 + c)) << "\" x2=\""
       << fp(px(lx1)) << "\" y2=\"" << fp(py(rep.slope * lx1 + c))
       << "\" stroke=\"crimson\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << W - MR - 8 << "\" y=\"" << MT + 18
       << "\" text-anchor=\"end\" font-size=\"12\" fill=\"crimson\">slope = " << csv_num(rep.slope)
       << "</text>\n";
  } else {
    os << "<text x=\"" << W - MR - 8 << "\" y=\"" << MT + 18
       << "\" text-anchor=\"end\" font-size=\"12\">no slope (degenerate fit)</text>\n";
  }

  for (const auto& [lx, ly] : pts)
    os << "<circle cx=\"" << fp(px(lx)) << "\" cy=\"" << fp(py(ly))
       << "\" r=\"3.5\" fill=\"steelblue\"/>\n";

  os << "</svg>\n";
  return os.str();
}

}  // namespace mlr
