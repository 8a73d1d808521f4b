#pragma once

// Self-contained SVG of cadlag step paths: one polyline per path, horizontal
// runs at each state and vertical risers at jump times.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "symaudit/simulate.hpp"

namespace symaudit {

struct SvgOptions {
  double width = 800.0;
  double height = 480.0;
  double margin = 50.0;
  bool log_y = false;  // log10(value) with zero states drawn at the floor
  std::string title;
};

struct SvgSeries {
  Path path;
  std::string label;
};

inline void write_paths_svg(std::ostream& os, std::span<const SvgSeries> series, double horizon,
                            const SvgOptions& opt = {}) {
  static const char* colors[] = {"#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd"};
  double lo = 0.0, hi = 0.0;
  bool have = false;
  double min_pos = 0.0;
  for (const auto& s : series)
    for (const auto& d : s.path.states) {
      const double v = s.path.unit.value * d.to_double();
      if (v > 0.0) min_pos = min_pos == 0.0 ? v : std::min(min_pos, v);
    }
  auto y_of = [&](double v) {
    if (!opt.log_y) return v;
    return std::log10(v > 0.0 ? v : (min_pos > 0.0 ? min_pos : 1.0));
  };
  for (const auto& s : series)
    for (const auto& d : s.path.states) {
      const double y = y_of(s.path.unit.value * d.to_double());
      lo = have ? std::min(lo, y) : y;
      hi = have ? std::max(hi, y) : y;
      have = true;
    }
  if (!have || hi == lo) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pw = opt.width - 2 * opt.margin, ph = opt.height - 2 * opt.margin;
  auto px = [&](double t) { return opt.margin + pw * t / horizon; };
  auto py = [&](double y) { return opt.margin + ph * (hi - y) / (hi - lo); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt17(opt.width) << "\" height=\""
     << fmt17(opt.height) << "\" viewBox=\"0 0 " << fmt17(opt.width) << ' ' << fmt17(opt.height) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << opt.margin << "\" y=\"" << opt.margin << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#888\"/>\n";
  if (!opt.title.empty()) os << "<text x=\"" << opt.margin << "\" y=\"" << opt.margin / 2 << "\">" << opt.title << "</text>\n";
  os << "<text x=\"" << opt.margin << "\" y=\"" << opt.height - opt.margin / 3 << "\">0</text>\n";
  os << "<text x=\"" << opt.width - opt.margin << "\" y=\"" << opt.height - opt.margin / 3 << "\">"
     << fmt17(horizon) << "</text>\n";
  os << "<text x=\"4\" y=\"" << py(hi) << "\">" << fmt17(opt.log_y ? std::pow(10.0, hi) : hi) << "</text>\n";
  os << "<text x=\"4\" y=\"" << py(lo) << "\">" << fmt17(opt.log_y ? std::pow(10.0, lo) : lo) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const Path& p = series[i].path;
    const char* color = colors[i % 5];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    double t = 0.0;
    double y = y_of(p.unit.value * p.states[0].to_double());
    os << px(t) << ',' << py(y);
    for (std::size_t j = 0; j < p.times.size(); ++j) {
      t = p.times[j];
      os << ' ' << px(t) << ',' << py(y);
      y = y_of(p.unit.value * p.states[j + 1].to_double());
      os << ' ' << px(t) << ',' << py(y);
    }
    os << ' ' << px(horizon) << ',' << py(y) << "\"/>\n";
    os << "<text x=\"" << opt.width - opt.margin + 4 << "\" y=\"" << opt.margin + 16.0 * (i + 1) << "\" fill=\""
       << color << "\">" << series[i].label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace symaudit
