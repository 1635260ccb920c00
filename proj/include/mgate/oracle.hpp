#pragma once

// Independent cross-checks for the restricted-basis implementation.  The
// builders here work on the full 45-dimensional product space
// {5 atomic levels} x {0..2 probe photons} x {0..2 trigger photons} with
// their own indexing and their own traversal of the couplings, so that a
// bookkeeping mistake in the canonical basis cannot cancel against an
// identical mistake on this side.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "dynamics.hpp"
#include "haar.hpp"
#include "metrics.hpp"

namespace mgate::oracle {

constexpr int kCap = 2;            // photon cutoff per mode (inclusive)
constexpr int kPerMode = kCap + 1;
constexpr int kDim = 5 * kPerMode * kPerMode;  // 45

// Dense index: atomic level slowest, then probe, then trigger occupation.
inline int dense_index(int level, int n_probe, int n_trigger) {
  return ((level - 1) * kPerMode + n_probe) * kPerMode + n_trigger;
}

inline std::array<int, 3> dense_state(int idx) {
  const int nt = idx % kPerMode;
  const int np = (idx / kPerMode) % kPerMode;
  const int r = idx / (kPerMode * kPerMode) + 1;
  return {r, np, nt};
}

// Full-space Hamiltonian assembled from mode ladder operators: with
// b = a_p (x) |2><3| + h.c. and c = a_t (x) |4><3| + h.c. scaled by the
// collective couplings, plus the classical drives and the rotating-frame
// diagonal.
inline Matrix dense_hamiltonian(const SchemeParams& p) {
  p.validate();
  Matrix h = Matrix::Zero(kDim, kDim);

  for (int idx = 0; idx < kDim; ++idx) {
    const auto [r, np, nt] = dense_state(idx);
    double e = 0.0;
    if (r == 1) e = p.delta1 - p.delta2;
    if (r == 2) e = p.delta2;
    if (r == 4) e = p.delta3;
    if (r == 5) e = p.delta3 - p.delta4;
    h(idx, idx) = e;
    (void)np;
    (void)nt;
  }

  for (int np = 0; np <= kCap; ++np) {
    for (int nt = 0; nt <= kCap; ++nt) {
      // classical drives act within a fixed photon configuration
      h(dense_index(1, np, nt), dense_index(2, np, nt)) += p.omega1;
      h(dense_index(2, np, nt), dense_index(1, np, nt)) += p.omega1;
      h(dense_index(4, np, nt), dense_index(5, np, nt)) += p.omega4;
      h(dense_index(5, np, nt), dense_index(4, np, nt)) += p.omega4;
      // probe photon absorption |3, np, nt> -> |2, np - 1, nt>
      if (np >= 1) {
        const double g = p.g_probe * std::sqrt(double(np));
        h(dense_index(2, np - 1, nt), dense_index(3, np, nt)) += g;
        h(dense_index(3, np, nt), dense_index(2, np - 1, nt)) += g;
      }
      // trigger photon absorption |3, np, nt> -> |4, np, nt - 1>
      if (nt >= 1) {
        const double g = p.g_trigger * std::sqrt(double(nt));
        h(dense_index(4, np, nt - 1), dense_index(3, np, nt)) += g;
        h(dense_index(3, np, nt), dense_index(4, np, nt - 1)) += g;
      }
    }
  }
  return h;
}

// All six decay channels on the full space; the photon configuration is a
// spectator.
inline std::vector<JumpOperator> dense_jump_operators(const SchemeParams& p) {
  p.validate();
  std::vector<JumpOperator> jumps;
  for (int l : {2, 4}) {
    for (int k : {1, 3, 5}) {
      JumpOperator j;
      j.op = Matrix::Zero(kDim, kDim);
      j.rate = p.gamma(k, l);
      j.to_level = k;
      j.from_level = l;
      for (int np = 0; np <= kCap; ++np) {
        for (int nt = 0; nt <= kCap; ++nt) {
          j.op(dense_index(k, np, nt), dense_index(l, np, nt)) = 1.0;
        }
      }
      jumps.push_back(std::move(j));
    }
  }
  return jumps;
}

// 45 x 18 embedding of the canonical basis into the dense space.
inline Matrix embedding(const BasisSet& basis = BasisSet::canonical()) {
  Matrix e = Matrix::Zero(kDim, BasisSet::dim);
  for (int i = 0; i < BasisSet::dim; ++i) {
    const BasisState& s = basis.state(i);
    e(dense_index(s.level, s.n_probe, s.n_trigger), i) = 1.0;
  }
  return e;
}

// Master-equation evolution on the dense space (adaptive RK; the dense
// superoperator would be 2025 x 2025 and is never needed).
inline Matrix dense_propagate(const SchemeParams& p, const Matrix& rho0,
                              double t, const SolverOptions& opts = {}) {
  opts.validate();
  if (rho0.rows() != kDim || rho0.cols() != kDim) {
    throw state_error("dense_propagate expects a 45 x 45 density matrix");
  }
  if (t == 0.0) return rho0;
  LindbladRhs rhs(dense_hamiltonian(p), dense_jump_operators(p));
  Matrix rho = integrate_adaptive(
      [&rhs](const Matrix& y, Matrix& dy) { rhs(y, dy); }, Matrix(rho0), 0.0,
      t, opts);
  return 0.5 * (rho + rho.adjoint()).eval();
}

// States dynamically reachable from the four computational inputs:
// breadth-first closure over nonzero Hamiltonian couplings (bidirectional)
// and nonzero-rate decay channels (directed).  With all couplings and all
// six rates nonzero this is exactly the canonical 18-state set; switching
// off the cross channels 2->5 and 4->1 shrinks it to 15, and gamma = 0
// leaves the 12 states connected through the Hamiltonian alone.
inline std::vector<BasisState> reachability_closure(const SchemeParams& p) {
  const Matrix h = dense_hamiltonian(p);
  const auto jumps = dense_jump_operators(p);

  std::vector<std::vector<int>> adj(kDim);
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      if (i != j && h(i, j) != 0.0) adj[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  for (const JumpOperator& jop : jumps) {
    if (jop.rate == 0.0) continue;
    for (int src = 0; src < kDim; ++src) {
      for (int dst = 0; dst < kDim; ++dst) {
        if (jop.op(dst, src) != 0.0) adj[static_cast<std::size_t>(src)].push_back(dst);
      }
    }
  }

  std::vector<bool> seen(kDim, false);
  std::queue<int> frontier;
  for (int q = 0; q < 4; ++q) {
    const int idx = dense_index(3, (q >> 1) & 1, q & 1);
    seen[static_cast<std::size_t>(idx)] = true;
    frontier.push(idx);
  }
  while (!frontier.empty()) {
    const int cur = frontier.front();
    frontier.pop();
    for (int nxt : adj[static_cast<std::size_t>(cur)]) {
      if (!seen[static_cast<std::size_t>(nxt)]) {
        seen[static_cast<std::size_t>(nxt)] = true;
        frontier.push(nxt);
      }
    }
  }

  std::vector<BasisState> out;
  for (int idx = 0; idx < kDim; ++idx) {
    if (!seen[static_cast<std::size_t>(idx)]) continue;
    const auto [r, np, nt] = dense_state(idx);
    out.push_back(BasisState::make(r, np, nt));
  }
  // deterministic order: canonical index
  std::sort(out.begin(), out.end(), [](const BasisState& a, const BasisState& b) {
    return BasisSet::canonical().index(a) < BasisSet::canonical().index(b);
  });
  return out;
}

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of the Haar-average deterministic gate fidelity,
// the brute-force counterpart of the closed-form moment expression.  Every
// sample evolves under the full master equation via one cached
// superoperator exponential; the estimate and its standard error refer to
// F = sqrt(mean overlap) (delta method).
inline McEstimate mc_average_fidelity(const SchemeParams& p, double t,
                                      const PhaseSet& phases, int n_samples,
                                      std::uint64_t seed,
                                      const SolverOptions& opts = {}) {
  opts.validate();
  if (n_samples < 2) throw params_error("mc_average_fidelity needs >= 2 samples");
  const BasisSet& basis = BasisSet::canonical();
  const Matrix liou = liouvillian_matrix(build_hamiltonian(p),
                                         build_jump_operators(p));
  const Matrix prop = expm(liou * t);

  const std::array<double, 4> phi = {0.0, phases.phi01, phases.phi10,
                                     phases.phi11};
  std::array<int, 4> qidx{};
  for (int q = 0; q < 4; ++q) qidx[static_cast<std::size_t>(q)] = basis.qubit_index(q);

  double sum = 0.0;
  double sum_sq = 0.0;
  const int dim = BasisSet::dim;
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::Vector4cd c = haar_state(seed, static_cast<std::uint64_t>(s));
    Vector psi0 = Vector::Zero(dim);
    for (int q = 0; q < 4; ++q) psi0(qidx[static_cast<std::size_t>(q)]) = c(q);
    const Matrix rho0 = psi0 * psi0.adjoint();
    const Vector v = prop * detail::vectorize(rho0);
    const Matrix rho = detail::unvectorize(v, dim);

    Complex overlap = 0.0;
    for (int a = 0; a < 4; ++a) {
      const Complex da = c(a) * std::polar(1.0, phi[static_cast<std::size_t>(a)]);
      for (int b = 0; b < 4; ++b) {
        const Complex db = c(b) * std::polar(1.0, phi[static_cast<std::size_t>(b)]);
        overlap += std::conj(da) *
                   rho(qidx[static_cast<std::size_t>(a)], qidx[static_cast<std::size_t>(b)]) * db;
      }
    }
    const double f2 = overlap.real();
    sum += f2;
    sum_sq += f2 * f2;
  }
  const double n = double(n_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean) / (n - 1.0);
  McEstimate est;
  est.value = std::sqrt(std::max(0.0, mean));
  est.std_error = est.value > 0.0 ? 0.5 * std::sqrt(var) / est.value : std::sqrt(var);
  return est;
}

}  // namespace mgate::oracle
