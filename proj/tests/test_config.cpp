#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <mgate/config.hpp>
#include <string>

using namespace mgate;
using doctest::Approx;

namespace {

const char* kBaseIni = R"(
# minimal run description
[scheme]
units = rad_per_us
delta1 = 10
delta2 = 9.9
delta3 = 11
delta4 = 10.9
omega1 = 2
omega4 = 2.5
G_p = 5
G_t = 6
gamma_all = 0.5

[time]
t_max = 0.5
n_samples = 11
)";

RunConfig parse_ini_text(const std::string& text) {
  return parse_config_text(text, false);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

TEST_CASE("a minimal INI config resolves with defaults") {
  const RunConfig cfg = parse_ini_text(kBaseIni);
  CHECK(cfg.scheme.delta1 == 10.0);
  CHECK(cfg.scheme.delta2 == 9.9);
  CHECK(cfg.scheme.omega4 == 2.5);
  CHECK(cfg.scheme.g_probe == 5.0);
  CHECK(cfg.scheme.g_trigger == 6.0);
  for (double g : cfg.scheme.gamma.rates) CHECK(g == 0.5);
  CHECK(cfg.gamma_ref == 0.0);
  CHECK(cfg.time.t_max == 0.5);
  CHECK(cfg.time.n_samples == 11);
  CHECK(cfg.solver.method == SolveMethod::AdaptiveRk);
  CHECK(cfg.solver.rtol == 1e-9);
  CHECK(cfg.mc.n_samples == 2000);
  CHECK(cfg.mc.seed == 7421);
  CHECK(cfg.output.dir == "out");
  CHECK_FALSE(cfg.output.svg);
  CHECK_FALSE(cfg.sweep.has_value());

  const auto grid = cfg.grid();
  CHECK(grid.size() == 11);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 0.5);
}

TEST_CASE("gamma units scale rates and times by the reference linewidth") {
  const std::string ini = R"(
[scheme]
units = gamma_units
gamma_MHz = 6
delta1 = 15
delta2 = 14.99
delta3 = 15
delta4 = 14.99
omega1 = 4
omega4 = 4
G_p = 22
G_t = 22
gamma_all = 0.15915494309189535

[time]
t_max = 1.2
n_samples = 25
)";
  const RunConfig cfg = parse_ini_text(ini);
  const double gref = 2.0 * M_PI * 6.0;
  CHECK(cfg.gamma_ref == Approx(gref).epsilon(1e-15));
  CHECK(cfg.scheme.delta1 == Approx(15.0 * gref).epsilon(1e-15));
  CHECK(cfg.scheme.g_probe == Approx(22.0 * gref).epsilon(1e-15));
  // 1/(2 pi) in gamma units = gamma_MHz rad/us per channel
  CHECK(cfg.scheme.gamma(3, 2) == Approx(6.0).epsilon(1e-12));
  // time defaults to units of 1/gamma
  CHECK(cfg.time.t_max == Approx(1.2 / gref).epsilon(1e-15));
}

TEST_CASE("gamma-units and hand-converted configs resolve identically") {
  const double gref = 2.0 * M_PI * 6.0;
  const std::string in_gamma = R"(
[scheme]
units = gamma_units
gamma_MHz = 6
delta1 = 15
delta2 = 14.99
delta3 = 15.2
delta4 = 15.18
omega1 = 4
omega4 = 4.5
G_p = 22
G_t = 21
gamma_all = 1

[time]
units = us
t_max = 0.02
n_samples = 9
)";
  std::string in_rad = "[scheme]\nunits = rad_per_us\n";
  const std::pair<const char*, double> fields[] = {
      {"delta1", 15.0},  {"delta2", 14.99}, {"delta3", 15.2}, {"delta4", 15.18},
      {"omega1", 4.0},   {"omega4", 4.5},   {"G_p", 22.0},    {"G_t", 21.0},
      {"gamma_all", 1.0}};
  for (const auto& [key, value] : fields) {
    in_rad += std::string(key) + " = " + fmt17(value * gref) + "\n";
  }
  in_rad += "[time]\nunits = us\nt_max = 0.02\nn_samples = 9\n";

  const RunConfig a = parse_ini_text(in_gamma);
  const RunConfig b = parse_ini_text(in_rad);
  CHECK(a.scheme.delta1 == b.scheme.delta1);
  CHECK(a.scheme.delta2 == b.scheme.delta2);
  CHECK(a.scheme.delta3 == b.scheme.delta3);
  CHECK(a.scheme.delta4 == b.scheme.delta4);
  CHECK(a.scheme.omega1 == b.scheme.omega1);
  CHECK(a.scheme.omega4 == b.scheme.omega4);
  CHECK(a.scheme.g_probe == b.scheme.g_probe);
  CHECK(a.scheme.g_trigger == b.scheme.g_trigger);
  for (int i = 0; i < 6; ++i) {
    CHECK(a.scheme.gamma.rates[static_cast<std::size_t>(i)] ==
          b.scheme.gamma.rates[static_cast<std::size_t>(i)]);
  }
  CHECK(a.time.t_max == b.time.t_max);
}

TEST_CASE("MHz_times_2pi units multiply by 2 pi, times stay in us") {
  const std::string ini = R"(
[scheme]
units = MHz_times_2pi
delta1 = 1
delta2 = 1
delta3 = 1
delta4 = 1
omega1 = 1
omega4 = 1
G_p = 1
G_t = 1
gamma_all = 1

[time]
t_max = 3
n_samples = 4
)";
  const RunConfig cfg = parse_ini_text(ini);
  CHECK(cfg.scheme.delta1 == Approx(2.0 * M_PI).epsilon(1e-15));
  CHECK(cfg.time.t_max == 3.0);
  CHECK(cfg.gamma_ref == 0.0);
}

TEST_CASE("JSON configs resolve like their INI twins") {
  const std::string json = R"({
    "scheme": {
      "units": "rad_per_us",
      "delta1": 10, "delta2": 9.9, "delta3": 11, "delta4": 10.9,
      "omega1": 2, "omega4": 2.5, "G_p": 5, "G_t": 6,
      "gamma_all": 0.5
    },
    "time": {"t_max": 0.5, "n_samples": 11},
    "output": {"dir": "elsewhere", "svg": true}
  })";
  const RunConfig cfg = parse_config_text(json, true);
  const RunConfig twin = parse_ini_text(kBaseIni);
  CHECK(cfg.scheme.delta1 == twin.scheme.delta1);
  CHECK(cfg.scheme.g_trigger == twin.scheme.g_trigger);
  CHECK(cfg.time.t_max == twin.time.t_max);
  CHECK(cfg.output.dir == "elsewhere");
  CHECK(cfg.output.svg);

  CHECK_THROWS_AS(parse_config_text("[1, 2]", true), config_error);
  CHECK_THROWS_AS(parse_config_text("{ not json", true), config_error);
}

TEST_CASE("unknown sections and keys are rejected") {
  CHECK_THROWS_AS(parse_ini_text(std::string(kBaseIni) + "[extra]\nx = 1\n"),
                  config_error);
  CHECK_THROWS_AS(parse_ini_text(std::string(kBaseIni) + "[scheme]\ndelta9 = 1\n"),
                  config_error);
}

TEST_CASE("missing required pieces are rejected") {
  // no [scheme]
  CHECK_THROWS_AS(parse_ini_text("[time]\nt_max = 1\nn_samples = 2\n"), config_error);
  // units missing
  CHECK_THROWS_AS(parse_ini_text(R"(
[scheme]
delta1 = 1
[time]
t_max = 1
n_samples = 2
)"),
                  config_error);
  // gamma_units without gamma_MHz
  CHECK_THROWS_AS(parse_ini_text(R"(
[scheme]
units = gamma_units
delta1 = 1
delta2 = 1
delta3 = 1
delta4 = 1
omega1 = 1
omega4 = 1
G_p = 1
G_t = 1
[time]
t_max = 1
n_samples = 2
)"),
                  config_error);
  // a scheme field missing
  std::string no_delta = kBaseIni;
  const auto pos = no_delta.find("delta4 = 10.9\n");
  REQUIRE(pos != std::string::npos);
  no_delta.erase(pos, std::string("delta4 = 10.9\n").size());
  CHECK_THROWS_AS(parse_ini_text(no_delta), config_error);
  // no [time]
  CHECK_THROWS_AS(parse_ini_text(R"(
[scheme]
units = rad_per_us
delta1 = 1
delta2 = 1
delta3 = 1
delta4 = 1
omega1 = 1
omega4 = 1
G_p = 1
G_t = 1
)"),
                  config_error);
}

TEST_CASE("invalid values are rejected with config errors") {
  auto with = [](const std::string& extra) {
    return std::string(kBaseIni) + extra;
  };
  CHECK_THROWS_AS(parse_ini_text(with("[solver]\nmethod = simpson\n")), config_error);
  CHECK_THROWS_AS(parse_ini_text(with("[solver]\nrtol = -1\n")), config_error);
  CHECK_THROWS_AS(parse_ini_text(with("[mc]\nn_samples = 0\n")), config_error);
  CHECK_THROWS_AS(parse_ini_text(with("[mc]\nseed = -3\n")), config_error);
  CHECK_THROWS_AS(parse_ini_text(with("[time]\nunits = hours\n")), config_error);
  CHECK_THROWS_AS(parse_ini_text(with("[scheme]\ndelta1 = abc\n")), config_error);

  std::string bad_units = kBaseIni;
  const auto pos = bad_units.find("units = rad_per_us");
  bad_units.replace(pos, std::string("units = rad_per_us").size(), "units = hz");
  CHECK_THROWS_AS(parse_ini_text(bad_units), config_error);

  // negative decay rates fail scheme validation at resolve time
  CHECK_THROWS_AS(parse_ini_text(with("[scheme]\ngamma_12 = -1\n")), config_error);
}

TEST_CASE("time in units of 1/gamma needs a declared linewidth") {
  CHECK_THROWS_AS(parse_ini_text(std::string(kBaseIni) + "[time]\nunits = inv_gamma\n"),
                  config_error);
  // declaring gamma_MHz makes it legal even for rad_per_us schemes
  std::string ok = kBaseIni;
  ok += "[scheme]\ngamma_MHz = 6\n[time]\nunits = inv_gamma\n";
  const RunConfig cfg = parse_ini_text(ok);
  CHECK(cfg.time.t_max == Approx(0.5 / (2.0 * M_PI * 6.0)).epsilon(1e-15));
}

TEST_CASE("per-channel decay overrides take precedence") {
  const RunConfig cfg =
      parse_ini_text(std::string(kBaseIni) + "[scheme]\ngamma_52 = 0.05\n");
  CHECK(cfg.scheme.gamma(5, 2) == 0.05);
  CHECK(cfg.scheme.gamma(1, 2) == 0.5);
  CHECK(cfg.scheme.gamma(3, 4) == 0.5);
}

TEST_CASE("solver and mc sections are applied") {
  const std::string ini = std::string(kBaseIni) + R"(
[solver]
method = matrix-exponential
rtol = 1e-8
atol = 1e-11
max_step = 0.01

[mc]
n_samples = 123
seed = 99
)";
  const RunConfig cfg = parse_ini_text(ini);
  CHECK(cfg.solver.method == SolveMethod::MatrixExponential);
  CHECK(cfg.solver.rtol == 1e-8);
  CHECK(cfg.solver.atol == 1e-11);
  CHECK(cfg.solver.max_step == 0.01);
  CHECK(cfg.mc.n_samples == 123);
  CHECK(cfg.mc.seed == 99);
}

TEST_CASE("sweep sections are parsed and validated") {
  auto sweep = [](const std::string& body) {
    return std::string(kBaseIni) + "[sweep]\n" + body;
  };
  const RunConfig cfg = parse_ini_text(sweep(
      "field = G_p, G_t\nstart = 1\nstop = 10\ncount = 5\nscale = log\n"));
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->fields == std::vector<std::string>{"G_p", "G_t"});
  CHECK(cfg.sweep->start == 1.0);
  CHECK(cfg.sweep->stop == 10.0);
  CHECK(cfg.sweep->count == 5);
  CHECK(cfg.sweep->log_scale);
  CHECK(cfg.sweep->record_at_crossing);
  CHECK(cfg.sweep->unit_factor == 1.0);

  const RunConfig timed = parse_ini_text(sweep(
      "field = omega1\nstart = 1\nstop = 2\ncount = 3\nrecord = t=0.25\n"));
  REQUIRE(timed.sweep.has_value());
  CHECK_FALSE(timed.sweep->record_at_crossing);
  CHECK(timed.sweep->record_time == 0.25);

  CHECK_THROWS_AS(parse_ini_text(sweep("start = 1\nstop = 2\ncount = 3\n")),
                  config_error);
  CHECK_THROWS_AS(
      parse_ini_text(sweep("field = nonsense\nstart = 1\nstop = 2\ncount = 3\n")),
      config_error);
  CHECK_THROWS_AS(parse_ini_text(sweep("field = G_p\nstart = 1\nstop = 2\n")),
                  config_error);
  CHECK_THROWS_AS(
      parse_ini_text(sweep("field = G_p\nstart = 0\nstop = 2\ncount = 3\nscale = log\n")),
      config_error);
  CHECK_THROWS_AS(
      parse_ini_text(sweep("field = G_p\nstart = 1\nstop = 2\ncount = 0\n")),
      config_error);
  CHECK_THROWS_AS(
      parse_ini_text(sweep("field = G_p\nstart = 1\nstop = 2\ncount = 3\nrecord = t=9\n")),
      config_error);
  CHECK_THROWS_AS(
      parse_ini_text(sweep("field = G_p\nstart = 1\nstop = 2\ncount = 3\nrecord = never\n")),
      config_error);
}

TEST_CASE("INI syntax errors carry line information") {
  CHECK_THROWS_AS(parse_ini_text("[scheme\nunits = rad_per_us\n"), config_error);
  CHECK_THROWS_AS(parse_ini_text("key = 1\n"), config_error);
  CHECK_THROWS_AS(parse_ini_text("[scheme]\njust some words\n"), config_error);
  CHECK_THROWS_AS(parse_ini_text("[]\n"), config_error);
  try {
    parse_ini_text("[scheme]\nunits = rad_per_us\nbroken line\n");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("missing config files are reported") {
  CHECK_THROWS_AS(load_config("/nonexistent/path/run.cfg"), config_error);
}
