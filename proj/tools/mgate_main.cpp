// mgate: command-line front end for the M-scheme quantum phase gate
// simulator.  Subcommands: simulate, perturbative, sweep, validate.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <mgate/mgate.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIntegration = 3;
constexpr int kExitSingular = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;  // empty: keep the config's choice
  bool svg = false;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

mgate::RunConfig load_with_overrides(const CommonArgs& args) {
  mgate::RunConfig cfg = mgate::load_config(args.config_path);
  if (!args.out_dir.empty()) cfg.output.dir = args.out_dir;
  if (args.svg) cfg.output.svg = true;
  if (args.seed) cfg.mc.seed = *args.seed;
  return cfg;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw mgate::config_error("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int cmd_simulate(const CommonArgs& args) {
  const mgate::RunConfig cfg = load_with_overrides(args);
  std::filesystem::create_directories(cfg.output.dir);
  const std::filesystem::path dir(cfg.output.dir);

  std::ofstream csv = open_output(dir / "metrics.csv");
  csv << mgate::metrics_csv_header() << '\n';
  csv.flush();

  const std::vector<double> grid = cfg.grid();
  mgate::MetricsOptions opts;
  opts.solver = cfg.solver;
  opts.mc = cfg.mc;

  std::vector<mgate::GateMetrics> rows;
  try {
    rows = mgate::compute_metrics(cfg.scheme, grid, opts);
  } catch (const mgate::integration_error& e) {
    // Flush the reachable prefix (without the fidelity passes) so the CSV
    // still carries the partial run, then report the failure.
    std::vector<double> prefix;
    for (double t : grid) {
      if (t < e.t_reached()) prefix.push_back(t);
    }
    try {
      if (prefix.size() >= 2) {
        mgate::MetricsOptions basic = opts;
        basic.fidelities = false;
        for (const mgate::GateMetrics& m :
             mgate::compute_metrics(cfg.scheme, prefix, basic)) {
          mgate::write_metrics_row(csv, m);
        }
        csv.flush();
      }
    } catch (const mgate::error&) {
      // keep the original diagnosis
    }
    std::cerr << "mgate: simulate: " << e.what() << '\n';
    return kExitIntegration;
  }

  for (const mgate::GateMetrics& m : rows) mgate::write_metrics_row(csv, m);
  csv.flush();
  std::cout << "wrote " << (dir / "metrics.csv").string() << " ("
            << rows.size() << " rows)\n";

  const std::string time_label = "t [us]";
  if (cfg.output.svg) {
    std::ofstream f1 = open_output(dir / "cps.svg");
    mgate::write_cps_svg(f1, rows, time_label);
    std::ofstream f2 = open_output(dir / "fidelity.svg");
    mgate::write_fidelity_svg(f2, rows, time_label);
    std::cout << "wrote " << (dir / "cps.svg").string() << ", "
              << (dir / "fidelity.svg").string() << '\n';
  }

  const auto crossing = mgate::find_cps_crossing(rows);
  if (!crossing) {
    std::cout << "|CPS| stays below pi on this grid (max |cps| = "
              << fmt(std::abs(rows.empty() ? 0.0 : rows.back().cps_unwrapped))
              << " rad at t_max)\n";
    return kExitOk;
  }
  std::cout << "|CPS| = pi crossing at t = " << fmt(crossing->t) << " us";
  if (cfg.gamma_ref > 0.0) {
    std::cout << " (gamma t = " << fmt(crossing->t * cfg.gamma_ref) << ")";
  }
  std::cout << '\n';
  const int op = mgate::find_operating_point(rows, grid.front(), grid.back());
  if (op >= 0) {
    const mgate::GateMetrics& m = rows[static_cast<std::size_t>(op)];
    std::cout << "operating point: t = " << fmt(m.t) << " us, cps = "
              << fmt(m.cps_unwrapped) << " rad, fid_det = " << fmt(m.fid_det)
              << ", fid_cond = " << fmt(m.fid_cond) << ", p_success = "
              << fmt(m.p_success) << ", leakage = " << fmt(m.leakage) << '\n';
  }
  return kExitOk;
}

int cmd_perturbative(const CommonArgs& args) {
  const mgate::RunConfig cfg = load_with_overrides(args);
  const mgate::SchemeParams& p = cfg.scheme;
  const double t = cfg.time.t_max;
  const double phi = mgate::perturbative_cps(p, t);
  std::cout << "cps = " << mgate::format_number(phi) << " rad"
            << " | t = " << fmt(t) << " us, eps12 = " << fmt(p.epsilon12())
            << ", eps34 = " << fmt(p.epsilon34()) << ", delta2 = "
            << fmt(p.delta2) << ", delta3 = " << fmt(p.delta3) << ", omega1 = "
            << fmt(p.omega1) << ", omega4 = " << fmt(p.omega4) << ", G_p = "
            << fmt(p.g_probe) << ", G_t = " << fmt(p.g_trigger)
            << " rad/us\n";
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args) {
  const mgate::RunConfig cfg = load_with_overrides(args);
  if (!cfg.sweep) {
    throw mgate::config_error("sweep command needs a [sweep] section in the config");
  }
  const std::vector<mgate::SweepRow> rows =
      mgate::run_sweep(cfg, *cfg.sweep, args.jobs);

  std::filesystem::create_directories(cfg.output.dir);
  const std::filesystem::path path =
      std::filesystem::path(cfg.output.dir) / "sweep.csv";
  std::ofstream csv = open_output(path);
  mgate::write_sweep_csv(csv, cfg.sweep->fields, rows);
  csv.flush();

  std::size_t ok = 0;
  for (const mgate::SweepRow& r : rows) {
    if (r.status.rfind("error:", 0) != 0) ++ok;
  }
  std::cout << "wrote " << path.string() << " (" << rows.size() << " points, "
            << ok << " ok)\n";
  if (ok == 0 && !rows.empty()) {
    std::cerr << "mgate: sweep: every grid point failed\n";
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_validate(const std::string& fault_name) {
  mgate::FaultInjection fault = mgate::FaultInjection::None;
  if (fault_name == "hamiltonian") {
    fault = mgate::FaultInjection::BreakHermiticity;
  } else if (!fault_name.empty()) {
    throw mgate::config_error("unknown fault '" + fault_name + "'");
  }
  const auto results = mgate::run_validation(fault);
  const bool all = mgate::report_validation(std::cout, results);
  return all ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EIT quantum phase gate simulator"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string fault_name;

  auto add_common = [&args](CLI::App* cmd, bool with_jobs) {
    cmd->add_option("--config", args.config_path, "run configuration (.cfg or .json)")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_flag("--svg", args.svg, "also emit SVG charts");
    cmd->add_option("--seed", args.seed, "Monte-Carlo seed (overrides config)");
    if (with_jobs) {
      cmd->add_option("--jobs", args.jobs, "concurrent sweep points")
          ->check(CLI::PositiveNumber);
    }
  };

  CLI::App* simulate =
      app.add_subcommand("simulate", "time series of gate figures of merit");
  add_common(simulate, false);
  CLI::App* perturbative = app.add_subcommand(
      "perturbative", "closed-form dispersive-regime phase estimate");
  add_common(perturbative, false);
  CLI::App* sweep =
      app.add_subcommand("sweep", "figures of merit across a parameter grid");
  add_common(sweep, true);
  CLI::App* validate =
      app.add_subcommand("validate", "run the internal consistency checks");
  validate->add_option("--inject-fault", fault_name)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(args);
    if (perturbative->parsed()) return cmd_perturbative(args);
    if (sweep->parsed()) return cmd_sweep(args);
    return cmd_validate(fault_name);
  } catch (const mgate::singular_parameter_error& e) {
    std::cerr << "mgate: " << e.what() << '\n';
    return kExitSingular;
  } catch (const mgate::integration_error& e) {
    std::cerr << "mgate: " << e.what() << '\n';
    return kExitIntegration;
  } catch (const mgate::config_error& e) {
    std::cerr << "mgate: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mgate::params_error& e) {
    std::cerr << "mgate: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mgate::error& e) {
    std::cerr << "mgate: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "mgate: unexpected error: " << e.what() << '\n';
    return kExitValidation;
  }
}
