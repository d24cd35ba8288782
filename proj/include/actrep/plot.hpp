#pragma once

// Minimal SVG rendering of one feature signal with segment boundaries
// (t_start, t_change, t_end) drawn as vertical markers.

#include <algorithm>
#include <cstdio>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "actrep/features.hpp"
#include "actrep/representation.hpp"

namespace actrep {

struct PlotOptions {
  int width = 960;
  int height = 320;
  std::string title;
};

namespace plot_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace plot_detail

/// `times` and `values` are parallel; segments outside the time range are clipped.
inline std::string render_signal_svg(std::span<const FrameIndex> times, std::span<const double> values,
                                     std::span<const SegmentRepresentation> segments, const PlotOptions& opt = {}) {
  using plot_detail::num;
  const double left = 60, right = 20, top = 30, bottom = 40;
  const double pw = opt.width - left - right, ph = opt.height - top - bottom;

  double t0 = 0, t1 = 1, v0 = 0, v1 = 1;
  if (!times.empty()) {
    t0 = static_cast<double>(times.front());
    t1 = std::max(t0 + 1.0, static_cast<double>(times.back()));
  }
  if (!values.empty()) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    v0 = *lo;
    v1 = *hi;
    const double pad = v1 > v0 ? 0.05 * (v1 - v0) : 1.0;
    v0 -= pad;
    v1 += pad;
  }
  const auto x = [&](double t) { return left + (t - t0) / (t1 - t0) * pw; };
  const auto y = [&](double v) { return top + (v1 - v) / (v1 - v0) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    svg << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\">" << plot_detail::escape(opt.title) << "</text>\n";

  for (const auto& seg : segments) {
    const double a = std::clamp(static_cast<double>(seg.t_start), t0, t1);
    const double b = std::clamp(static_cast<double>(seg.t_end), t0, t1);
    svg << "<rect x=\"" << num(x(a)) << "\" y=\"" << top << "\" width=\"" << num(x(b) - x(a)) << "\" height=\"" << ph
        << "\" fill=\"#dde8f5\"/>\n";
  }

  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg << "<text x=\"" << left - 6 << "\" y=\"" << num(top + 4) << "\" text-anchor=\"end\">" << num(v1) << "</text>\n";
  svg << "<text x=\"" << left - 6 << "\" y=\"" << num(top + ph) << "\" text-anchor=\"end\">" << num(v0) << "</text>\n";
  svg << "<text x=\"" << left << "\" y=\"" << num(top + ph + 16) << "\">" << num(t0) << "</text>\n";
  svg << "<text x=\"" << num(left + pw) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"end\">" << num(t1)
      << "</text>\n";
  svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(top + ph + 30) << "\" text-anchor=\"middle\">frame</text>\n";

  if (!values.empty()) {
    svg << "<polyline fill=\"none\" stroke=\"#222\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < values.size() && i < times.size(); ++i)
      svg << (i ? " " : "") << num(x(static_cast<double>(times[i]))) << "," << num(y(values[i]));
    svg << "\"/>\n";
  }

  const auto marker = [&](FrameIndex t, const char* color, const char* dash) {
    const double tt = static_cast<double>(t);
    if (tt < t0 || tt > t1) return;
    svg << "<line x1=\"" << num(x(tt)) << "\" x2=\"" << num(x(tt)) << "\" y1=\"" << top << "\" y2=\"" << num(top + ph)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << (*dash ? " stroke-dasharray=\"" : "") << dash
        << (*dash ? "\"" : "") << "/>\n";
  };
  for (const auto& seg : segments) {
    marker(seg.t_start, "#2a9d3a", "4 3");
    marker(seg.t_change, "#d62728", "");
    marker(seg.t_end, "#1f5fbf", "4 3");
  }

  const double ly = opt.height - 8.0;
  svg << "<text x=\"" << num(left + pw - 300) << "\" y=\"" << ly << "\" fill=\"#2a9d3a\">t_start</text>"
      << "<text x=\"" << num(left + pw - 220) << "\" y=\"" << ly << "\" fill=\"#d62728\">t_change</text>"
      << "<text x=\"" << num(left + pw - 130) << "\" y=\"" << ly << "\" fill=\"#1f5fbf\">t_end</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace actrep
