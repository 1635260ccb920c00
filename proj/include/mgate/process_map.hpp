#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "dynamics.hpp"
#include "fields.hpp"

namespace mgate {

// The open-system process on the two-qubit field space at a fixed time:
// rho_field(0) |-> Lambda(rho_field(0)) = reduced block of the evolved
// 18-dimensional state.  Stored as the 16x16 matrix acting on column-major
// vectorised 4x4 field operators, so column a + 4*b holds
// vec(Lambda(|a><b|)).  Linear, Hermiticity-preserving, trace
// non-increasing (population leaks out of the block).
struct ProcessMap {
  double t = 0.0;
  Eigen::Matrix<Complex, 16, 16> m = Eigen::Matrix<Complex, 16, 16>::Zero();

  Eigen::Matrix4cd apply(const Eigen::Matrix4cd& x) const {
    const Eigen::Map<const Eigen::Matrix<Complex, 16, 1>> vx(x.data());
    const Eigen::Matrix<Complex, 16, 1> vy = m * vx;
    return Eigen::Map<const Eigen::Matrix4cd>(vy.data());
  }
};

namespace detail {

// The 28 pure field states whose evolutions determine the map on all of
// operator space: the four basis states |a>, and for each pair a < b the
// superpositions (|a> + |b>)/sqrt2, (|a> - |b>)/sqrt2, (|a> + i|b>)/sqrt2,
// (|a> - i|b>)/sqrt2.
struct ProbeBank {
  std::array<std::array<Complex, 4>, 28> amps{};
  // index bookkeeping: probe 0..3 = |a>; then groups of four per pair
  static constexpr std::array<std::array<int, 2>, 6> pairs = {
      {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

  ProbeBank() {
    for (int a = 0; a < 4; ++a) amps[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] = 1.0;
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
      const int a = pairs[pi][0];
      const int b = pairs[pi][1];
      static constexpr std::array<Complex, 4> beta = {
          Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)};
      for (std::size_t v = 0; v < 4; ++v) {
        auto& amp = amps[4 + 4 * pi + v];
        amp[static_cast<std::size_t>(a)] = s;
        amp[static_cast<std::size_t>(b)] = s * beta[v];
      }
    }
  }
};

// Polarisation reconstruction: given the 28 evolved blocks, assemble the
// images of all 16 elementary operators |a><b|.
//   Lambda(|a><b|) = 1/2 [ (B+ - B-) + i (Bi+ - Bi-) ]          (a < b)
//   Lambda(|b><a|) = Lambda(|a><b|)^dagger
// which is exact because the map preserves Hermiticity.
inline ProcessMap assemble_map(double t,
                               const std::array<Eigen::Matrix4cd, 28>& blocks) {
  ProcessMap pm;
  pm.t = t;
  auto set_column = [&pm](int a, int b, const Eigen::Matrix4cd& img) {
    pm.m.col(a + 4 * b) = Eigen::Map<const Eigen::Matrix<Complex, 16, 1>>(img.data());
  };
  for (int a = 0; a < 4; ++a) set_column(a, a, blocks[static_cast<std::size_t>(a)]);
  for (std::size_t pi = 0; pi < ProbeBank::pairs.size(); ++pi) {
    const int a = ProbeBank::pairs[pi][0];
    const int b = ProbeBank::pairs[pi][1];
    const Eigen::Matrix4cd& plus = blocks[4 + 4 * pi + 0];
    const Eigen::Matrix4cd& minus = blocks[4 + 4 * pi + 1];
    const Eigen::Matrix4cd& iplus = blocks[4 + 4 * pi + 2];
    const Eigen::Matrix4cd& iminus = blocks[4 + 4 * pi + 3];
    const Eigen::Matrix4cd img =
        0.5 * ((plus - minus) + Complex(0, 1) * (iplus - iminus));
    set_column(a, b, img);
    set_column(b, a, img.adjoint().eval());
  }
  return pm;
}

}  // namespace detail

// Scan process maps over a time grid, advancing all 28 probe states
// together.  On a uniform grid with the matrix-exponential method the step
// propagator is exponentiated once and applied as a single product per
// sample; with adaptive RK the probes share one stacked integration.
// sink(k, pm) is invoked for every grid index, k = 0 first.
template <class Sink>
inline void scan_process_maps(const SchemeParams& p,
                              const std::vector<double>& times,
                              const SolverOptions& opts, Sink&& sink) {
  opts.validate();
  validate_time_grid(times);
  const detail::ProbeBank bank;
  const int n = BasisSet::dim;
  const Matrix h = build_hamiltonian(p);
  const auto jumps = build_jump_operators(p);

  // stacked initial state: 28 density matrices side by side (18 x 504)
  Matrix stack(n, 28 * n);
  for (int s = 0; s < 28; ++s) {
    const Vector psi = initial_state(bank.amps[static_cast<std::size_t>(s)]);
    stack.middleCols(s * n, n) = psi * psi.adjoint();
  }

  auto emit = [&](std::size_t k, const Matrix& cur) {
    std::array<Eigen::Matrix4cd, 28> blocks;
    for (int s = 0; s < 28; ++s) {
      blocks[static_cast<std::size_t>(s)] =
          reduced_field_state(cur.middleCols(s * n, n)).block;
    }
    sink(k, detail::assemble_map(times[k], blocks));
  };

  emit(0, stack);

  if (opts.method == SolveMethod::MatrixExponential) {
    const Matrix liou = liouvillian_matrix(h, jumps);
    // columns of `vecs` are vec(rho_s); memory layout matches `stack`
    Eigen::Map<Matrix> vecs(stack.data(), n * n, 28);
    Matrix step;
    double step_dt = -1.0;
    Matrix next(n * n, 28);
    for (std::size_t k = 1; k < times.size(); ++k) {
      const double dt = times[k] - times[k - 1];
      if (step_dt < 0.0 || std::abs(dt - step_dt) > 1e-12 * std::max(dt, step_dt)) {
        step = expm(liou * dt);
        step_dt = dt;
      }
      next.noalias() = step * vecs;
      vecs = next;
      emit(k, stack);
    }
  } else {
    LindbladRhs rhs(h, jumps);
    auto stacked_rhs = [&rhs, n](const Matrix& y, Matrix& dy) {
      dy.resize(y.rows(), y.cols());
      Matrix block(n, n), dblock(n, n);
      for (int s = 0; s < 28; ++s) {
        block = y.middleCols(s * n, n);
        rhs(block, dblock);
        dy.middleCols(s * n, n) = dblock;
      }
    };
    DormandPrince stepper(stacked_rhs, Matrix(stack), 0.0, opts);
    for (std::size_t k = 1; k < times.size(); ++k) {
      stepper.advance_to(times[k]);
      emit(k, stepper.y());
    }
  }
}

// Single-time process map.
inline ProcessMap build_process_map(const SchemeParams& p, double t,
                                    const SolverOptions& opts = {}) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw params_error("time must be >= 0");
  ProcessMap out;
  if (t == 0.0) {
    // a one-point grid is not a valid trajectory; evaluate directly
    const detail::ProbeBank bank;
    std::array<Eigen::Matrix4cd, 28> blocks;
    for (int s = 0; s < 28; ++s) {
      const Vector psi = initial_state(bank.amps[static_cast<std::size_t>(s)]);
      blocks[static_cast<std::size_t>(s)] =
          reduced_field_state(Matrix(psi * psi.adjoint())).block;
    }
    return detail::assemble_map(0.0, blocks);
  }
  const std::vector<double> grid = {0.0, t};
  scan_process_maps(p, grid, opts, [&out](std::size_t k, const ProcessMap& pm) {
    if (k == 1) out = pm;
  });
  return out;
}

}  // namespace mgate
