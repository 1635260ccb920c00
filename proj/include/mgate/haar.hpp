#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace mgate {

// Haar-random two-qubit pure state drawn from stream (seed, index).  Each
// sample owns an independent generator seeded from both values, so results
// do not depend on evaluation order and a sample can be reproduced in
// isolation.  Gaussians come from an explicit Box-Muller transform on
// 53-bit uniforms; nothing here depends on library distribution internals.
inline Eigen::Vector4cd haar_state(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);

  auto uniform = [&rng]() {
    // in (0, 1]: avoids log(0) below
    return 1.0 - double(rng() >> 11) * 0x1.0p-53;
  };

  std::array<double, 8> z{};
  for (std::size_t i = 0; i < 8; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 2.0 * M_PI * uniform();
    z[i] = r * std::cos(a);
    z[i + 1] = r * std::sin(a);
  }

  Eigen::Vector4cd v;
  for (int q = 0; q < 4; ++q) {
    v(q) = std::complex<double>(z[static_cast<std::size_t>(2 * q)],
                                z[static_cast<std::size_t>(2 * q + 1)]);
  }
  v /= v.norm();
  return v;
}

}  // namespace mgate
