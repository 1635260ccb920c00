#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "metrics.hpp"

namespace mgate {

// Locale-independent scientific formatting with 15 significant digits;
// reruns with identical inputs produce byte-identical files.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 14);
  return std::string(buf, res.ptr);
}

inline const char* metrics_csv_header() {
  return "t,phi01,phi10,phi11,cps,cps_unwrapped,fid_det,fid_cond,p_success,"
         "leakage,pop1,pop2,pop3,pop4,pop5";
}

inline void write_metrics_row(std::ostream& out, const GateMetrics& m) {
  out << format_number(m.t) << ',' << format_number(m.phases.phi01) << ','
      << format_number(m.phases.phi10) << ',' << format_number(m.phases.phi11)
      << ',' << format_number(m.cps) << ',' << format_number(m.cps_unwrapped)
      << ',' << format_number(m.fid_det) << ',' << format_number(m.fid_cond)
      << ',' << format_number(m.p_success) << ',' << format_number(m.leakage);
  for (double pop : m.populations) out << ',' << format_number(pop);
  out << '\n';
}

inline void write_metrics_csv(std::ostream& out,
                              const std::vector<GateMetrics>& rows) {
  out << metrics_csv_header() << '\n';
  for (const GateMetrics& m : rows) write_metrics_row(out, m);
}

}  // namespace mgate
