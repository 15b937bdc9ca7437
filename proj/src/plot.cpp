#include "tnc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace tnc {

namespace {

constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::fabs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

/// Tick spacing of 1, 2 or 5 times a power of ten giving about `target` ticks.
double tick_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0})
    if (raw <= m * mag) return m * mag;
  return 10 * mag;
}

}  // namespace

void write_svg(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& columns,
               const PlotOptions& options) {
  const double left = 60, right = 140, top = options.title.empty() ? 20 : 40, bottom = 45;
  const double w = options.width, h = options.height;
  const double pw = w - left - right, ph = h - top - bottom;

  const auto& ts = traj.times();
  double t0 = ts.empty() ? 0.0 : ts.front(), t1 = ts.empty() ? 1.0 : ts.back();
  if (t1 <= t0) t1 = t0 + 1;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : columns)
    for (double v : traj.column(c))
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!(lo <= hi)) lo = 0, hi = 1;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  const double ystep = tick_step(hi - lo, 6);
  lo = std::floor(lo / ystep) * ystep;
  hi = std::ceil(hi / ystep) * ystep;
  const double tstep = tick_step(t1 - t0, 8);

  const auto px = [&](double t) { return left + (t - t0) / (t1 - t0) * pw; };
  const auto py = [&](double v) { return top + (hi - v) / (hi - lo) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
     << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty())
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(options.title) << "</text>\n";

  os << "<g class=\"axes\" stroke=\"#444\" fill=\"none\">\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\"/>\n";
  for (double t = std::ceil(t0 / tstep) * tstep; t <= t1 + 1e-9 * tstep; t += tstep)
    os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(px(t)) << "\" y2=\""
       << num(top + ph + 5) << "\"/>\n";
  for (double v = lo; v <= hi + 1e-9 * ystep; v += ystep)
    os << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(py(v)) << "\" x2=\"" << num(left) << "\" y2=\""
       << num(py(v)) << "\"/>\n";
  os << "</g>\n<g class=\"tick-labels\" fill=\"#222\">\n";
  for (double t = std::ceil(t0 / tstep) * tstep; t <= t1 + 1e-9 * tstep; t += tstep)
    os << "<text x=\"" << num(px(t)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">" << label(t)
       << "</text>\n";
  for (double v = lo; v <= hi + 1e-9 * ystep; v += ystep)
    os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">" << label(v)
       << "</text>\n";
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(h - 8) << "\" text-anchor=\"middle\">t</text>\n";
  os << "</g>\n";

  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& col = traj.column(columns[c]);
    os << "<polyline class=\"series\" data-name=\"" << escape(columns[c]) << "\" fill=\"none\" stroke=\""
       << kColors[c % std::size(kColors)] << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (!std::isfinite(col[i])) continue;
      os << (first ? "" : " ") << num(px(ts[i])) << ',' << num(py(std::clamp(col[i], lo, hi)));
      first = false;
    }
    os << "\"/>\n";
  }

  os << "<g class=\"legend\">\n";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const double y = top + 10 + 18.0 * static_cast<double>(c);
    os << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left + pw + 36)
       << "\" y2=\"" << num(y) << "\" stroke=\"" << kColors[c % std::size(kColors)] << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(left + pw + 42) << "\" y=\"" << num(y + 4) << "\">" << escape(columns[c]) << "</text>\n";
  }
  os << "</g>\n</svg>\n";
}

}  // namespace tnc
