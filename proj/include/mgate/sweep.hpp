#pragma once

#include <atomic>
#include <cmath>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "log.hpp"

namespace mgate {

// One sweep point.  status is "ok", "no-crossing" (crossing recording
// requested but |CPS| never reaches pi on the grid) or "error:<what>".
// Metrics for "ok" rows are linearly interpolated at the recording time.
struct SweepRow {
  double value = 0.0;  // in config units
  std::string status = "ok";
  double t_record = 0.0;
  GateMetrics metrics;
};

namespace detail {

inline void apply_sweep_value(SchemeParams& scheme, const std::string& field,
                              double value_rad_us) {
  if (field == "delta1") scheme.delta1 = value_rad_us;
  else if (field == "delta2") scheme.delta2 = value_rad_us;
  else if (field == "delta3") scheme.delta3 = value_rad_us;
  else if (field == "delta4") scheme.delta4 = value_rad_us;
  else if (field == "omega1") scheme.omega1 = value_rad_us;
  else if (field == "omega4") scheme.omega4 = value_rad_us;
  else if (field == "G_p") scheme.g_probe = value_rad_us;
  else if (field == "G_t") scheme.g_trigger = value_rad_us;
  else if (field == "gamma_all") scheme.gamma = DecayTable::uniform(value_rad_us);
  else throw config_error("unknown sweep field '" + field + "'");
}

// Linear interpolation of a metrics row between grid samples; phases are
// interpolated on their unwrapped representatives.
inline GateMetrics interpolate_row(const std::vector<GateMetrics>& rows,
                                   double t) {
  if (t <= rows.front().t) return rows.front();
  if (t >= rows.back().t) return rows.back();
  std::size_t hi = 1;
  while (rows[hi].t < t) ++hi;
  const GateMetrics& a = rows[hi - 1];
  const GateMetrics& b = rows[hi];
  const double w = (t - a.t) / (b.t - a.t);
  auto mix = [w](double x, double y) { return x + w * (y - x); };
  auto mix_angle = [&](double x, double y) {
    return wrap_phase(x + w * wrap_phase(y - x));
  };
  GateMetrics m;
  m.t = t;
  m.phases.phi01 = mix_angle(a.phases.phi01, b.phases.phi01);
  m.phases.phi10 = mix_angle(a.phases.phi10, b.phases.phi10);
  m.phases.phi11 = mix_angle(a.phases.phi11, b.phases.phi11);
  m.cps_unwrapped = mix(a.cps_unwrapped, b.cps_unwrapped);
  m.cps = wrap_phase(m.cps_unwrapped);
  m.fid_det = mix(a.fid_det, b.fid_det);
  m.fid_cond = mix(a.fid_cond, b.fid_cond);
  m.p_success = mix(a.p_success, b.p_success);
  m.leakage = mix(a.leakage, b.leakage);
  for (std::size_t i = 0; i < 5; ++i) {
    m.populations[i] = mix(a.populations[i], b.populations[i]);
  }
  return m;
}

}  // namespace detail

// Evaluate the full metric set at every sweep point.  Points are
// independent, so they may run on `jobs` threads; the output order is the
// grid order either way.  A failing point is recorded and skipped.
inline std::vector<SweepRow> run_sweep(const RunConfig& cfg, const SweepSpec& spec,
                                       int jobs = 1) {
  if (jobs < 1) jobs = 1;
  std::vector<double> values(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) {
    const double f = spec.count == 1 ? 0.0 : double(i) / double(spec.count - 1);
    values[static_cast<std::size_t>(i)] =
        spec.log_scale
            ? spec.start * std::pow(spec.stop / spec.start, f)
            : spec.start + f * (spec.stop - spec.start);
  }

  std::vector<SweepRow> rows(values.size());
  const std::vector<double> grid = cfg.grid();

  auto run_point = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = values[i];
    try {
      SchemeParams scheme = cfg.scheme;
      for (const std::string& field : spec.fields) {
        detail::apply_sweep_value(scheme, field, spec.unit_factor * values[i]);
      }
      scheme.validate();
      MetricsOptions mopts;
      mopts.solver = cfg.solver;
      mopts.mc = cfg.mc;
      const std::vector<GateMetrics> metrics = compute_metrics(scheme, grid, mopts);
      if (spec.record_at_crossing) {
        const auto crossing = find_cps_crossing(metrics, M_PI);
        if (!crossing) {
          row.status = "no-crossing";
          row.t_record = metrics.back().t;
          row.metrics = metrics.back();
          return;
        }
        row.t_record = crossing->t;
      } else {
        row.t_record = spec.record_time;
      }
      row.metrics = detail::interpolate_row(metrics, row.t_record);
      row.status = "ok";
    } catch (const error& e) {
      row.status = std::string("error:") + e.what();
      row.t_record = 0.0;
    }
  };

  if (jobs == 1 || values.size() <= 1) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      log_debug("sweep point " + std::to_string(i + 1) + "/" +
                std::to_string(values.size()));
      run_point(i);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t nthreads =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), values.size());
    pool.reserve(nthreads);
    for (std::size_t w = 0; w < nthreads; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < values.size();
             i = next.fetch_add(1)) {
          run_point(i);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<std::string>& fields,
                            const std::vector<SweepRow>& rows) {
  std::string joined;
  for (const std::string& f : fields) {
    if (!joined.empty()) joined += "+";
    joined += f;
  }
  out << "param,value,status,t_record," << metrics_csv_header() << '\n';
  for (const SweepRow& row : rows) {
    // status text may carry an exception message; keep it CSV-safe
    std::string status = row.status;
    for (char& c : status) {
      if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    out << joined << ',' << format_number(row.value) << ',' << status << ','
        << format_number(row.t_record) << ',';
    write_metrics_row(out, row.metrics);
  }
}

}  // namespace mgate
