#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "haar.hpp"
#include "log.hpp"
#include "process_map.hpp"

namespace mgate {

// Map an angle to the principal interval (-pi, pi].
inline double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * M_PI);
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

// Remove 2 pi jumps from a sampled phase series: each element is shifted by
// the multiple of 2 pi that keeps consecutive differences in (-pi, pi].
inline std::vector<double> unwrap_phase_series(const std::vector<double>& phi) {
  std::vector<double> out;
  out.reserve(phi.size());
  if (phi.empty()) return out;
  out.push_back(phi.front());
  for (std::size_t i = 1; i < phi.size(); ++i) {
    out.push_back(out[i - 1] + wrap_phase(phi[i] - phi[i - 1]));
  }
  return out;
}

// Phases acquired by the two-qubit components relative to |00>.
struct PhaseSet {
  double phi01 = 0.0;
  double phi10 = 0.0;
  double phi11 = 0.0;
};

// phi_ij = arg <i_p j_t| rho |0 0> from the computational block.  For the
// ideal gate rho = |psi><psi| with psi = sum c_q e^{i phi_q}|q> this
// recovers the imposed phases exactly.  Throws when a coherence magnitude
// is below 1e-12, where the phase carries no information.
inline PhaseSet extract_phases(const Eigen::Matrix4cd& block) {
  auto phase = [&block](int q) {
    const Complex c = block(q, 0);
    if (std::abs(c) < 1e-12) {
      throw undefined_phase_error("coherence (" + std::to_string(q) +
                                  ",0) has magnitude below 1e-12");
    }
    return std::arg(c);
  };
  PhaseSet p;
  p.phi01 = phase(1);
  p.phi10 = phase(2);
  p.phi11 = phase(3);
  return p;
}

inline PhaseSet extract_phases(const FieldState& f) { return extract_phases(f.block); }

// Conditional phase shift phi11 + phi00 - phi10 - phi01 (phi00 = 0 by
// construction).  Returned as-is; callers that need the principal value
// apply wrap_phase.
inline double conditional_phase_shift(const PhaseSet& p) {
  return p.phi11 - p.phi10 - p.phi01;
}

// Fourth-order perturbative CPS of the dispersive regime.  Singular
// denominators (epsilon * delta = Omega^2, the EIT resonance condition)
// are rejected.
inline double perturbative_cps(const SchemeParams& p, double t) {
  p.validate();
  const double e12 = p.epsilon12();
  const double e34 = p.epsilon34();
  const double d1 = e12 * p.delta1 - p.omega1 * p.omega1;
  const double d3 = e34 * p.delta3 - p.omega4 * p.omega4;
  const double s1 = std::max({std::abs(e12 * p.delta1), p.omega1 * p.omega1, 1.0});
  const double s3 = std::max({std::abs(e34 * p.delta3), p.omega4 * p.omega4, 1.0});
  if (std::abs(d1) < 1e-12 * s1 || std::abs(d3) < 1e-12 * s3) {
    throw singular_parameter_error(
        "perturbative CPS denominator vanishes (epsilon*delta = Omega^2)");
  }
  const double g2 = p.g_probe * p.g_probe * p.g_trigger * p.g_trigger;
  return g2 * t / (d3 * d1) *
         (e34 * (e12 * e12 + p.omega1 * p.omega1) / d1 +
          e12 * (e34 * e34 + p.omega4 * p.omega4) / d3);
}

// Average gate fidelity over Haar-distributed two-qubit pure inputs,
// evaluated in closed form from the process map via the first two moments
// of Haar integration:
//   <F^2> = ( sum_a <a|Lambda(1)|a>
//           + sum_{a,b} e^{i(phi_b - phi_a)} <a|Lambda(|a><b|)|b> ) / 20,
// and F = sqrt(<F^2>) matches the fidelity-of-the-average convention.
inline double average_fidelity(const ProcessMap& pm, const PhaseSet& phases) {
  const std::array<double, 4> phi = {0.0, phases.phi01, phases.phi10,
                                     phases.phi11};
  auto lam = [&pm](int a, int b) {
    return Eigen::Map<const Eigen::Matrix4cd>(pm.m.col(a + 4 * b).data());
  };
  Complex t1 = 0.0;
  for (int c = 0; c < 4; ++c) {
    const auto img = lam(c, c);
    for (int a = 0; a < 4; ++a) t1 += img(a, a);
  }
  Complex t2 = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const Complex rot =
          std::polar(1.0, phi[static_cast<std::size_t>(b)] - phi[static_cast<std::size_t>(a)]);
      t2 += rot * lam(a, b)(a, b);
    }
  }
  const double mean_sq = (t1 + t2).real() / 20.0;
  return std::sqrt(std::max(0.0, mean_sq));
}

struct McOptions {
  int n_samples = 2000;
  std::uint64_t seed = 7421;

  void validate() const {
    if (n_samples < 1) throw params_error("mc n_samples must be >= 1");
  }
};

namespace detail {

// Mean conditional fidelity over Haar inputs for a fixed no-jump propagator
// u, referenced to the ideal phases.  Also returns nothing about
// p_success: that only depends on the reference input.
inline double mc_conditional_mean(const Matrix& u, const PhaseSet& phases,
                                  const McOptions& mc,
                                  const BasisSet& basis = BasisSet::canonical()) {
  const std::array<double, 4> phi = {0.0, phases.phi01, phases.phi10,
                                     phases.phi11};
  std::array<int, 4> qidx{};
  for (int q = 0; q < 4; ++q) qidx[static_cast<std::size_t>(q)] = basis.qubit_index(q);

  double acc = 0.0;
  for (int s = 0; s < mc.n_samples; ++s) {
    const Eigen::Vector4cd c = haar_state(mc.seed, static_cast<std::uint64_t>(s));
    Vector psi0 = Vector::Zero(BasisSet::dim);
    for (int q = 0; q < 4; ++q) psi0(qidx[static_cast<std::size_t>(q)]) = c(q);
    const Vector psi = u * psi0;
    const double p = psi.squaredNorm();
    if (p <= 0.0) continue;  // fully decayed sample contributes zero
    Complex ov = 0.0;
    for (int q = 0; q < 4; ++q) {
      const Complex ideal = c(q) * std::polar(1.0, phi[static_cast<std::size_t>(q)]);
      ov += std::conj(ideal) * psi(qidx[static_cast<std::size_t>(q)]);
    }
    acc += std::norm(ov) / p;
  }
  return acc / double(mc.n_samples);
}

}  // namespace detail

// Conditional (no-jump, heralded) gate fidelity and success probability at
// a single time.  The ideal phases come from the unconditioned reference
// run at the same time; the success probability is the survival of the
// balanced reference input.
inline std::pair<double, double> conditional_fidelity(const SchemeParams& p,
                                                      double t,
                                                      const SolverOptions& opts = {},
                                                      const McOptions& mc = {}) {
  mc.validate();
  const std::array<Complex, 4> half = {0.5, 0.5, 0.5, 0.5};
  const Vector psi_ref = initial_state(half);
  const Matrix rho_ref =
      propagate_master(p, Matrix(psi_ref * psi_ref.adjoint()), t, opts);
  const PhaseSet phases = extract_phases(reduced_field_state(rho_ref));

  const Matrix heff =
      effective_hamiltonian(build_hamiltonian(p), build_jump_operators(p));
  Matrix u;
  if (t == 0.0) {
    u = Matrix::Identity(BasisSet::dim, BasisSet::dim);
  } else if (opts.method == SolveMethod::MatrixExponential) {
    u = expm(Complex(0.0, -1.0) * heff * t);
  } else {
    u = integrate_adaptive(
        [&heff](const Matrix& y, Matrix& dy) {
          dy.noalias() = Complex(0.0, -1.0) * (heff * y);
        },
        Matrix(Matrix::Identity(BasisSet::dim, BasisSet::dim)), 0.0, t, opts);
  }

  const double fc = std::sqrt(std::max(0.0, detail::mc_conditional_mean(u, phases, mc)));
  const double ps = (u * psi_ref).squaredNorm();
  return {fc, ps};
}

// One row of the figure-of-merit table.
struct GateMetrics {
  double t = 0.0;
  PhaseSet phases;          // wrapped, from the reference run
  double cps = 0.0;           // principal value of the unwrapped combination
  double cps_unwrapped = 0.0;
  double fid_det = 1.0;       // deterministic average gate fidelity
  double fid_cond = 1.0;      // conditional (no-jump) fidelity
  double p_success = 1.0;     // survival of the balanced reference input
  double leakage = 0.0;       // population outside the computational block
  std::array<double, 5> populations{};  // atomic level occupations
};

struct MetricsOptions {
  SolverOptions solver;  // reference-trajectory engine
  McOptions mc;
  bool fidelities = true;
  // Advance the 28-probe process scan and the no-jump propagator with the
  // cached matrix-exponential step instead of the solver's method.  The
  // two engines agree to integrator tolerance; this one only exists
  // because it is much cheaper on a uniform grid.
  bool fast_scan = true;
};

// Full figure-of-merit sweep along a time grid.  Phases, CPS, leakage and
// populations come from one unconditioned reference run; fidelities from
// the process-map scan and the no-jump Monte Carlo bank.
inline std::vector<GateMetrics> compute_metrics(const SchemeParams& p,
                                                const std::vector<double>& times,
                                                const MetricsOptions& opts = {}) {
  opts.solver.validate();
  opts.mc.validate();
  validate_time_grid(times);
  const std::size_t nt = times.size();

  const std::array<Complex, 4> half = {0.5, 0.5, 0.5, 0.5};
  const Vector psi_ref = initial_state(half);

  log_debug("metrics: reference trajectory over " + std::to_string(nt) +
            " samples");
  const Trajectory ref = sample_trajectory(p, psi_ref, times, opts.solver);

  std::vector<GateMetrics> rows(nt);
  std::vector<double> s01(nt), s10(nt), s11(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    const FieldState f = reduced_field_state(ref.states[k]);
    const PhaseSet ph = extract_phases(f);
    rows[k].t = times[k];
    rows[k].phases = ph;
    rows[k].leakage = f.leakage;
    rows[k].populations = level_populations(ref.states[k]);
    s01[k] = ph.phi01;
    s10[k] = ph.phi10;
    s11[k] = ph.phi11;
  }
  s01 = unwrap_phase_series(s01);
  s10 = unwrap_phase_series(s10);
  s11 = unwrap_phase_series(s11);
  for (std::size_t k = 0; k < nt; ++k) {
    rows[k].cps_unwrapped = s11[k] - s10[k] - s01[k];
    rows[k].cps = wrap_phase(rows[k].cps_unwrapped);
  }

  if (!opts.fidelities) return rows;

  SolverOptions scan_opts = opts.solver;
  if (opts.fast_scan) scan_opts.method = SolveMethod::MatrixExponential;

  log_debug("metrics: process-map scan");
  scan_process_maps(p, times, scan_opts,
                    [&rows](std::size_t k, const ProcessMap& pm) {
                      rows[k].fid_det = average_fidelity(pm, rows[k].phases);
                    });

  log_debug("metrics: no-jump Monte Carlo (" +
            std::to_string(opts.mc.n_samples) + " samples)");
  const Matrix heff =
      effective_hamiltonian(build_hamiltonian(p), build_jump_operators(p));
  const int dim = BasisSet::dim;
  Matrix u = Matrix::Identity(dim, dim);
  Matrix step;
  double step_dt = -1.0;
  std::unique_ptr<DormandPrince<Matrix, std::function<void(const Matrix&, Matrix&)>>>
      stepper;
  if (!(opts.fast_scan || opts.solver.method == SolveMethod::MatrixExponential)) {
    stepper = std::make_unique<
        DormandPrince<Matrix, std::function<void(const Matrix&, Matrix&)>>>(
        [heff](const Matrix& y, Matrix& dy) {
          dy.noalias() = Complex(0.0, -1.0) * (heff * y);
        },
        Matrix(u), 0.0, opts.solver);
  }

  for (std::size_t k = 0; k < nt; ++k) {
    if (k > 0) {
      if (stepper) {
        stepper->advance_to(times[k]);
        u = stepper->y();
      } else {
        const double dt = times[k] - times[k - 1];
        if (step_dt < 0.0 || std::abs(dt - step_dt) > 1e-12 * std::max(dt, step_dt)) {
          step = expm(Complex(0.0, -1.0) * heff * dt);
          step_dt = dt;
        }
        u = (step * u).eval();
      }
    }
    rows[k].p_success = (u * psi_ref).squaredNorm();
    rows[k].fid_cond = std::sqrt(
        std::max(0.0, detail::mc_conditional_mean(u, rows[k].phases, opts.mc)));
  }
  return rows;
}

// Linear-interpolated time of the n-th upward crossing of |cps_unwrapped|
// through `level`.  Returns the crossing time and the index of the first
// sample at or past it.
struct Crossing {
  double t = 0.0;
  std::size_t index = 0;
};

inline std::optional<Crossing> find_cps_crossing(
    const std::vector<GateMetrics>& rows, double level = M_PI, int skip = 0) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double a = std::abs(rows[k - 1].cps_unwrapped);
    const double b = std::abs(rows[k].cps_unwrapped);
    if (a < level && b >= level) {
      if (skip-- > 0) continue;
      const double frac = (level - a) / (b - a);
      return Crossing{rows[k - 1].t + frac * (rows[k].t - rows[k - 1].t), k};
    }
  }
  return std::nullopt;
}

// Operating point: the sample of highest conditional fidelity among those
// whose |CPS| is within `band` radians of pi, restricted to the time
// window.  Falls back to the sample closest to |CPS| = pi in the window,
// and -1 if the window holds no samples.
inline int find_operating_point(const std::vector<GateMetrics>& rows,
                                double t_min, double t_max,
                                double band = 0.15) {
  int best = -1;
  int fallback = -1;
  double best_fc = -1.0;
  double best_miss = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].t < t_min || rows[k].t > t_max) continue;
    const double miss = std::abs(std::abs(rows[k].cps_unwrapped) - M_PI);
    if (miss < best_miss) {
      best_miss = miss;
      fallback = static_cast<int>(k);
    }
    if (miss <= band && rows[k].fid_cond > best_fc) {
      best_fc = rows[k].fid_cond;
      best = static_cast<int>(k);
    }
  }
  return best >= 0 ? best : fallback;
}

}  // namespace mgate
