#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "csv.hpp"

namespace mgate {

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline std::string svg_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace detail

// Minimal self-contained line chart; enough to eyeball the transients
// without a plotting stack.
inline void write_svg_chart(std::ostream& out, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel,
                            const std::vector<SvgSeries>& series) {
  const double width = 820.0;
  const double height = 520.0;
  const double ml = 80.0, mr = 30.0, mt = 50.0, mb = 60.0;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;

  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool first = true;
  for (const SvgSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };
  auto py = [&](double y) { return mt + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"17\">" << title << "</text>\n";

  // frame and ticks
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / nticks;
    const double fy = ymin + (ymax - ymin) * i / nticks;
    const double gx = px(fx);
    const double gy = py(fy);
    out << "<line x1=\"" << detail::svg_coord(gx) << "\" y1=\"" << mt + ph
        << "\" x2=\"" << detail::svg_coord(gx) << "\" y2=\"" << mt + ph + 6
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << detail::svg_coord(gx) << "\" y=\"" << mt + ph + 22
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << detail::tick_label(fx) << "</text>\n";
    out << "<line x1=\"" << ml - 6 << "\" y1=\"" << detail::svg_coord(gy)
        << "\" x2=\"" << ml << "\" y2=\"" << detail::svg_coord(gy)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 10 << "\" y=\"" << detail::svg_coord(gy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << detail::tick_label(fy) << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << xlabel << "</text>\n";
  out << "<text x=\"20\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
      << "transform=\"rotate(-90 20 " << mt + ph / 2 << ")\">" << ylabel
      << "</text>\n";

  double legend_y = mt + 16.0;
  for (const SvgSeries& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << detail::svg_coord(px(s.x[i])) << ',' << detail::svg_coord(py(s.y[i]))
          << ' ';
    }
    out << "\"/>\n";
    out << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << legend_y << "\" x2=\""
        << ml + pw - 120 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + pw - 112 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
        << "</text>\n";
    legend_y += 18.0;
  }
  out << "</svg>\n";
}

// The two standard charts for a metrics table.
inline void write_cps_svg(std::ostream& out, const std::vector<GateMetrics>& rows,
                          const std::string& time_label) {
  SvgSeries cps{"cps (unwrapped)", "#1f6fb4", {}, {}};
  for (const GateMetrics& m : rows) {
    cps.x.push_back(m.t);
    cps.y.push_back(m.cps_unwrapped);
  }
  write_svg_chart(out, "Conditional phase shift", time_label, "phase [rad]", {cps});
}

inline void write_fidelity_svg(std::ostream& out,
                               const std::vector<GateMetrics>& rows,
                               const std::string& time_label) {
  SvgSeries det{"deterministic fidelity", "#b43f1f", {}, {}};
  SvgSeries cond{"conditional fidelity", "#1f8f4a", {}, {}};
  SvgSeries psucc{"success probability", "#7a5da8", {}, {}};
  for (const GateMetrics& m : rows) {
    det.x.push_back(m.t);
    det.y.push_back(m.fid_det);
    cond.x.push_back(m.t);
    cond.y.push_back(m.fid_cond);
    psucc.x.push_back(m.t);
    psucc.y.push_back(m.p_success);
  }
  write_svg_chart(out, "Gate fidelities", time_label, "fidelity / probability",
                  {det, cond, psucc});
}

}  // namespace mgate
