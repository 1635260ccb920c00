#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "operators.hpp"
#include "solver.hpp"

namespace mgate {

// Density-matrix contract: Hermitian to 1e-9, trace in (0, 1 + 1e-9],
// eigenvalues >= -1e-9.  Trace may be below one for conditioned states.
inline void check_density_matrix(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw state_error("density matrix is not square");
  const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw state_error("density matrix is not Hermitian");
  }
  const double tr = rho.trace().real();
  if (!(tr > 0.0) || tr > 1.0 + 1e-9) {
    throw state_error("density matrix trace outside (0, 1]");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    throw state_error("density matrix has a negative eigenvalue");
  }
}

// Time grids must start at zero and increase strictly.
inline void validate_time_grid(const std::vector<double>& times) {
  if (times.empty()) throw params_error("time grid is empty");
  if (times.front() != 0.0) throw params_error("time grid must start at t = 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw params_error("time grid must be strictly increasing");
    }
  }
}

inline std::vector<double> uniform_grid(double t_max, int n_samples) {
  if (!(t_max > 0.0) || n_samples < 2) {
    throw params_error("uniform grid needs t_max > 0 and at least 2 samples");
  }
  std::vector<double> t(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    t[static_cast<std::size_t>(i)] = t_max * double(i) / double(n_samples - 1);
  }
  t.front() = 0.0;
  t.back() = t_max;
  return t;
}

namespace detail {

// vec(rho) in column-major order, shared with liouvillian_matrix.
inline Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

inline Matrix unvectorize(const Vector& v, Eigen::Index n) {
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

inline void hermitize(Matrix& rho) {
  rho = 0.5 * (rho + rho.adjoint()).eval();
}

}  // namespace detail

// Evolve a density matrix under the full master equation for time t.
// The trace must be preserved; drift beyond 10x the accumulated solver
// tolerance indicates an integration failure and throws.
inline Matrix propagate_master(const SchemeParams& p, const Matrix& rho0,
                               double t, const SolverOptions& opts = {}) {
  opts.validate();
  check_density_matrix(rho0);
  if (!(t >= 0.0) || !std::isfinite(t)) throw params_error("time must be >= 0");
  if (t == 0.0) return rho0;

  const Matrix h = build_hamiltonian(p);
  const auto jumps = build_jump_operators(p);
  Matrix rho;
  if (opts.method == SolveMethod::MatrixExponential) {
    const Matrix liou = liouvillian_matrix(h, jumps);
    const Vector v = expm(liou * t) * detail::vectorize(rho0);
    rho = detail::unvectorize(v, rho0.rows());
  } else {
    LindbladRhs rhs(h, jumps);
    rho = integrate_adaptive(
        [&rhs](const Matrix& y, Matrix& dy) { rhs(y, dy); }, Matrix(rho0), 0.0,
        t, opts);
  }
  detail::hermitize(rho);

  const double drift = std::abs(rho.trace().real() - rho0.trace().real());
  const double budget = 10.0 * (opts.rtol * (1.0 + t) + opts.atol) + 1e-12;
  if (drift > budget) {
    throw integration_error("trace drift " + std::to_string(drift) +
                                " exceeds the solver tolerance budget",
                            t);
  }
  return rho;
}

// Conditional no-jump evolution: psi' = -i H_eff psi with
// H_eff = H - (i/2) sum rate L^+ L.  Returns the unnormalised state and its
// survival (no-decay) probability |psi|^2, which never increases.
inline std::pair<Vector, double> propagate_nojump(const SchemeParams& p,
                                                  const Vector& psi0, double t,
                                                  const SolverOptions& opts = {}) {
  opts.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw params_error("time must be >= 0");
  const Matrix heff =
      effective_hamiltonian(build_hamiltonian(p), build_jump_operators(p));
  Vector psi;
  if (t == 0.0) {
    psi = psi0;
  } else if (opts.method == SolveMethod::MatrixExponential) {
    psi = expm(Complex(0.0, -1.0) * heff * t) * psi0;
  } else {
    psi = integrate_adaptive(
        [&heff](const Vector& y, Vector& dy) {
          dy.noalias() = Complex(0.0, -1.0) * (heff * y);
        },
        Vector(psi0), 0.0, t, opts);
  }
  return {psi, psi.squaredNorm()};
}

enum class EvolutionMode { Master, NoJump };

struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> states;  // density matrices
};

struct NojumpTrajectory {
  std::vector<double> times;
  std::vector<Vector> states;     // unnormalised conditional states
  std::vector<double> survival;   // |psi|^2 at each sample
};

// Sample the master-equation evolution of rho0 on a grid, reusing one
// integration pass.  With the matrix-exponential method a uniform grid is
// advanced by a single cached step propagator.
inline Trajectory sample_trajectory(const SchemeParams& p, const Matrix& rho0,
                                    const std::vector<double>& times,
                                    const SolverOptions& opts = {}) {
  opts.validate();
  validate_time_grid(times);
  check_density_matrix(rho0);
  const Matrix h = build_hamiltonian(p);
  const auto jumps = build_jump_operators(p);

  Trajectory traj;
  traj.times = times;
  traj.states.reserve(times.size());
  traj.states.push_back(rho0);

  if (opts.method == SolveMethod::MatrixExponential) {
    const Matrix liou = liouvillian_matrix(h, jumps);
    Vector v = detail::vectorize(rho0);
    Matrix step;
    double step_dt = -1.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double dt = times[i] - times[i - 1];
      if (step_dt < 0.0 || std::abs(dt - step_dt) > 1e-12 * std::max(dt, step_dt)) {
        step = expm(liou * dt);
        step_dt = dt;
      }
      v = (step * v).eval();
      Matrix rho = detail::unvectorize(v, rho0.rows());
      detail::hermitize(rho);
      traj.states.push_back(std::move(rho));
    }
  } else {
    LindbladRhs rhs(h, jumps);
    DormandPrince stepper(
        [&rhs](const Matrix& y, Matrix& dy) { rhs(y, dy); }, Matrix(rho0), 0.0,
        opts);
    for (std::size_t i = 1; i < times.size(); ++i) {
      stepper.advance_to(times[i]);
      Matrix rho = stepper.y();
      detail::hermitize(rho);
      traj.states.push_back(std::move(rho));
    }
  }
  return traj;
}

// Overload embedding a pure initial state.
inline Trajectory sample_trajectory(const SchemeParams& p, const Vector& psi0,
                                    const std::vector<double>& times,
                                    const SolverOptions& opts = {}) {
  const Matrix rho0 = psi0 * psi0.adjoint();
  return sample_trajectory(p, rho0, times, opts);
}

// No-jump counterpart on a grid.
inline NojumpTrajectory sample_trajectory_nojump(const SchemeParams& p,
                                                 const Vector& psi0,
                                                 const std::vector<double>& times,
                                                 const SolverOptions& opts = {}) {
  opts.validate();
  validate_time_grid(times);
  const Matrix heff =
      effective_hamiltonian(build_hamiltonian(p), build_jump_operators(p));

  NojumpTrajectory traj;
  traj.times = times;
  traj.states.reserve(times.size());
  traj.states.push_back(psi0);
  traj.survival.push_back(psi0.squaredNorm());

  if (opts.method == SolveMethod::MatrixExponential) {
    Matrix step;
    double step_dt = -1.0;
    Vector psi = psi0;
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double dt = times[i] - times[i - 1];
      if (step_dt < 0.0 || std::abs(dt - step_dt) > 1e-12 * std::max(dt, step_dt)) {
        step = expm(Complex(0.0, -1.0) * heff * dt);
        step_dt = dt;
      }
      psi = (step * psi).eval();
      traj.states.push_back(psi);
      traj.survival.push_back(psi.squaredNorm());
    }
  } else {
    DormandPrince stepper(
        [&heff](const Vector& y, Vector& dy) {
          dy.noalias() = Complex(0.0, -1.0) * (heff * y);
        },
        Vector(psi0), 0.0, opts);
    for (std::size_t i = 1; i < times.size(); ++i) {
      stepper.advance_to(times[i]);
      traj.states.push_back(stepper.y());
      traj.survival.push_back(stepper.y().squaredNorm());
    }
  }
  return traj;
}

// Mode-dispatching wrapper for pure initial states.
inline Trajectory sample_trajectory(const SchemeParams& p, const Vector& psi0,
                                    const std::vector<double>& times,
                                    EvolutionMode mode,
                                    const SolverOptions& opts = {}) {
  if (mode == EvolutionMode::NoJump) {
    NojumpTrajectory nj = sample_trajectory_nojump(p, psi0, times, opts);
    Trajectory traj;
    traj.times = nj.times;
    traj.states.reserve(nj.states.size());
    for (const Vector& psi : nj.states) traj.states.push_back(psi * psi.adjoint());
    return traj;
  }
  return sample_trajectory(p, psi0, times, opts);
}

}  // namespace mgate
