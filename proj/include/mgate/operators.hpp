#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "basis.hpp"
#include "scheme_params.hpp"

namespace mgate {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Interaction-picture Hamiltonian on the canonical basis, in rad/us.
// Diagonal: epsilon12 on level 1, delta2 on level 2, delta3 on level 4,
// epsilon34 on level 5.  Off-diagonal couplings: omega1 (1<->2),
// omega4 (4<->5), g_probe*sqrt(n_p) for the probe photon exchange
// |3,n_p,n_t> <-> |2,n_p-1,n_t|, g_trigger*sqrt(n_t) for
// |3,n_p,n_t> <-> |4,n_p,n_t-1>.  Hermitian by construction.
inline Matrix build_hamiltonian(const SchemeParams& p,
                                const BasisSet& basis = BasisSet::canonical()) {
  p.validate();
  const int n = BasisSet::dim;
  Matrix h = Matrix::Zero(n, n);

  for (int i = 0; i < n; ++i) {
    const BasisState& s = basis.state(i);
    switch (s.level) {
      case 1: h(i, i) = p.epsilon12(); break;
      case 2: h(i, i) = p.delta2; break;
      case 4: h(i, i) = p.delta3; break;
      case 5: h(i, i) = p.epsilon34(); break;
      default: break;  // level 3 sits at zero
    }
  }

  auto couple = [&](int i, int j, double strength) {
    h(i, j) += strength;
    h(j, i) += strength;
  };

  for (int i = 0; i < n; ++i) {
    const BasisState& s = basis.state(i);
    if (s.level == 1) {
      const int j = basis.find(BasisState{2, s.n_probe, s.n_trigger});
      if (j >= 0) couple(i, j, p.omega1);
    }
    if (s.level == 4) {
      const int j = basis.find(BasisState{5, s.n_probe, s.n_trigger});
      if (j >= 0) couple(i, j, p.omega4);
    }
    if (s.level == 3 && s.n_probe >= 1) {
      const int j = basis.find(BasisState{2, s.n_probe - 1, s.n_trigger});
      if (j >= 0) couple(i, j, p.g_probe * std::sqrt(double(s.n_probe)));
    }
    if (s.level == 3 && s.n_trigger >= 1) {
      const int j = basis.find(BasisState{4, s.n_probe, s.n_trigger - 1});
      if (j >= 0) couple(i, j, p.g_trigger * std::sqrt(double(s.n_trigger)));
    }
  }
  return h;
}

// One collapse operator |k><l| (x) identity on the modes, restricted to the
// basis, together with its rate gamma_{kl}.
struct JumpOperator {
  Matrix op;
  double rate = 0.0;
  int to_level = 0;    // k
  int from_level = 0;  // l
};

// The six spontaneous-emission channels l in {2,4} -> k in {1,3,5}, in the
// order (1,2),(3,2),(5,2),(1,4),(3,4),(5,4).  Zero-rate channels are kept
// so callers see a fixed-size list.
inline std::vector<JumpOperator> build_jump_operators(
    const SchemeParams& p, const BasisSet& basis = BasisSet::canonical()) {
  p.validate();
  const int n = BasisSet::dim;
  std::vector<JumpOperator> jumps;
  jumps.reserve(6);
  for (int l : {2, 4}) {
    for (int k : {1, 3, 5}) {
      JumpOperator j;
      j.op = Matrix::Zero(n, n);
      j.rate = p.gamma(k, l);
      j.to_level = k;
      j.from_level = l;
      for (int src = 0; src < n; ++src) {
        const BasisState& s = basis.state(src);
        if (s.level != l) continue;
        const int dst = basis.find(BasisState{k, s.n_probe, s.n_trigger});
        if (dst >= 0) j.op(dst, src) = 1.0;
      }
      jumps.push_back(std::move(j));
    }
  }
  return jumps;
}

// Embed two-qubit amplitudes (c00, c01, c10, c11) as the atom-vacuum state
// sum_q c_q |3, i_p, j_t>.  Amplitudes must be normalised to 1e-12.
inline Vector initial_state(const std::array<Complex, 4>& c,
                            const BasisSet& basis = BasisSet::canonical()) {
  double norm2 = 0.0;
  for (const Complex& a : c) norm2 += std::norm(a);
  if (std::abs(norm2 - 1.0) > 1e-12) {
    throw state_error("initial qubit amplitudes are not normalised");
  }
  Vector psi = Vector::Zero(BasisSet::dim);
  for (int q = 0; q < 4; ++q) psi(basis.qubit_index(q)) = c[static_cast<std::size_t>(q)];
  return psi;
}

// Non-Hermitian no-jump generator H_eff = H - (i/2) sum_c rate_c L_c^+ L_c.
// The decay sum is diagonal: the total width of level l on every basis
// state with that atomic level.
inline Matrix effective_hamiltonian(const Matrix& h,
                                    const std::vector<JumpOperator>& jumps) {
  Matrix heff = h;
  for (const JumpOperator& j : jumps) {
    if (j.rate == 0.0) continue;
    const Matrix ldl = j.op.adjoint() * j.op;
    heff -= Complex(0.0, 0.5 * j.rate) * ldl;
  }
  return heff;
}

// Lindblad generator in column-major vectorisation:
//   L = -i (I (x) H - H^T (x) I)
//     + sum_c rate_c [ conj(L_c) (x) L_c
//                      - 1/2 I (x) L_c^+ L_c - 1/2 (L_c^+ L_c)^T (x) I ].
inline Matrix liouvillian_matrix(const Matrix& h,
                                 const std::vector<JumpOperator>& jumps) {
  const auto n = h.rows();
  const Matrix id = Matrix::Identity(n, n);
  auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      }
    }
    return out;
  };
  Matrix liou = Complex(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
  for (const JumpOperator& j : jumps) {
    if (j.rate == 0.0) continue;
    const Matrix ldl = j.op.adjoint() * j.op;
    liou += j.rate * (kron(j.op.conjugate(), j.op) -
                      0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
  }
  return liou;
}

// Right-hand side of the master equation acting on a density matrix,
// evaluated without forming the superoperator.  The jump structure is
// pre-extracted once so the per-call cost is two n^3 products for the
// commutator plus O(n^2) dissipator work.
class LindbladRhs {
 public:
  LindbladRhs(Matrix h, const std::vector<JumpOperator>& jumps) : h_(std::move(h)) {
    const auto n = h_.rows();
    width_ = Eigen::VectorXd::Zero(n);
    for (const JumpOperator& j : jumps) {
      if (j.rate == 0.0) continue;
      Channel ch;
      ch.rate = j.rate;
      for (Eigen::Index col = 0; col < n; ++col) {
        for (Eigen::Index row = 0; row < n; ++row) {
          const Complex v = j.op(row, col);
          if (v != 0.0) ch.moves.push_back({int(row), int(col), v});
        }
      }
      for (const Move& m : ch.moves) width_(m.src) += j.rate * std::norm(m.weight);
      if (!ch.moves.empty()) channels_.push_back(std::move(ch));
    }
  }

  const Matrix& hamiltonian() const { return h_; }

  Matrix heff() const {
    Matrix m = h_;
    m.diagonal() -= Complex(0.0, 0.5) * width_.cast<Complex>();
    return m;
  }

  void operator()(const Matrix& rho, Matrix& out) const {
    out.noalias() = Complex(0.0, -1.0) * (h_ * rho);
    out.noalias() += Complex(0.0, 1.0) * (rho * h_);
    // anticommutator -1/2 {W, rho} with W the diagonal width matrix
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
      out.row(i) -= (0.5 * width_(i)) * rho.row(i);
      out.col(i) -= (0.5 * width_(i)) * rho.col(i);
    }
    // feeding terms rate * L rho L^+
    for (const Channel& ch : channels_) {
      for (const Move& a : ch.moves) {
        for (const Move& b : ch.moves) {
          out(a.dst, b.dst) +=
              ch.rate * a.weight * std::conj(b.weight) * rho(a.src, b.src);
        }
      }
    }
  }

 private:
  struct Move {
    int dst;
    int src;
    Complex weight;
  };
  struct Channel {
    double rate;
    std::vector<Move> moves;
  };
  Matrix h_;
  Eigen::VectorXd width_;
  std::vector<Channel> channels_;
};

}  // namespace mgate
