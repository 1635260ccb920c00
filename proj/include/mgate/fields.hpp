#pragma once

#include <Eigen/Dense>
#include <array>

#include "basis.hpp"
#include "operators.hpp"

namespace mgate {

// Unnormalised restriction of the full density matrix to the computational
// block span{|3,i,j>}, ordered |00>,|01>,|10>,|11> (q = 2 i_p + j_t), plus
// the population that has leaked outside it.
struct FieldState {
  Eigen::Matrix4cd block;
  double leakage = 0.0;
};

inline FieldState reduced_field_state(const Matrix& rho,
                                      const BasisSet& basis = BasisSet::canonical()) {
  FieldState out;
  std::array<int, 4> idx{};
  for (int q = 0; q < 4; ++q) idx[static_cast<std::size_t>(q)] = basis.qubit_index(q);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      out.block(a, b) = rho(idx[static_cast<std::size_t>(a)],
                            idx[static_cast<std::size_t>(b)]);
    }
  }
  out.leakage = 1.0 - out.block.trace().real();
  return out;
}

// Population of each atomic level, summed over the field modes.
inline std::array<double, 5> level_populations(
    const Matrix& rho, const BasisSet& basis = BasisSet::canonical()) {
  std::array<double, 5> pops{};
  for (int i = 0; i < BasisSet::dim; ++i) {
    pops[static_cast<std::size_t>(basis.state(i).level - 1)] += rho(i, i).real();
  }
  return pops;
}

}  // namespace mgate
