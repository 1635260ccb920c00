#pragma once

#include <array>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace mgate {

// Single-atom spontaneous-emission rates gamma_{kl} for the six dipole
// decay channels l -> k with l in {2,4} (excited) and k in {1,3,5}
// (ground).  Accessed as gamma(k, l); units rad/us throughout.
struct DecayTable {
  // Storage order: (k,l) = (1,2),(3,2),(5,2),(1,4),(3,4),(5,4).
  std::array<double, 6> rates{};

  static constexpr bool valid_channel(int k, int l) {
    return (l == 2 || l == 4) && (k == 1 || k == 3 || k == 5);
  }

  static constexpr int slot(int k, int l) {
    return (l == 2 ? 0 : 3) + (k - 1) / 2;
  }

  double operator()(int k, int l) const {
    if (!valid_channel(k, l)) {
      throw params_error("decay table: no channel " + std::to_string(l) +
                         " -> " + std::to_string(k));
    }
    return rates[static_cast<std::size_t>(slot(k, l))];
  }

  double& operator()(int k, int l) {
    if (!valid_channel(k, l)) {
      throw params_error("decay table: no channel " + std::to_string(l) +
                         " -> " + std::to_string(k));
    }
    return rates[static_cast<std::size_t>(slot(k, l))];
  }

  // All six channels set to the same rate.
  static DecayTable uniform(double g) {
    DecayTable t;
    t.rates.fill(g);
    return t;
  }

  // Total decay rate of excited level l (sum over the three ground levels).
  double total(int l) const {
    return (*this)(1, l) + (*this)(3, l) + (*this)(5, l);
  }
};

// Parameters of the five-level M scheme coupled to the probe and trigger
// modes.  Level roles: |3> is the populated ground level, |2>/|4> are the
// excited levels, |1>/|5> are the auxiliary ground levels.  The probe mode
// couples 3<->2 with collective strength g_probe, the trigger mode couples
// 3<->4 with g_trigger; omega1 drives 1<->2 and omega4 drives 4<->5.
// delta1..delta4 are the field detunings.  Everything in rad/us.
struct SchemeParams {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  double delta4 = 0.0;
  double omega1 = 0.0;
  double omega4 = 0.0;
  double g_probe = 0.0;
  double g_trigger = 0.0;
  DecayTable gamma;

  // Two-photon (Raman) detunings of the two lambda sub-systems.
  double epsilon12() const { return delta1 - delta2; }
  double epsilon34() const { return delta3 - delta4; }

  void validate() const {
    const double values[] = {delta1, delta2,  delta3,   delta4,
                             omega1, omega4,  g_probe,  g_trigger};
    for (double v : values) {
      if (!std::isfinite(v)) throw params_error("scheme parameter is not finite");
    }
    const double amplitudes[] = {omega1, omega4, g_probe, g_trigger};
    for (double v : amplitudes) {
      if (v < 0.0) throw params_error("coupling amplitude is negative");
    }
    for (double g : gamma.rates) {
      if (!std::isfinite(g)) throw params_error("decay rate is not finite");
      if (g < 0.0) throw params_error("decay rate is negative");
    }
  }

  // Mirror image of the scheme under the probe <-> trigger relabeling
  // 1<->5, 2<->4, 3 fixed.  The Hamiltonian depends on delta1 and delta4
  // only through the two-photon mismatches, so the exact covariance swaps
  // (epsilon12, delta2) with (epsilon34, delta3); the primitive detunings
  // of the mirrored scheme are reconstructed from those.
  SchemeParams swapped() const {
    SchemeParams q = *this;
    q.delta2 = delta3;
    q.delta3 = delta2;
    q.delta1 = delta3 + epsilon34();  // epsilon12' = epsilon34
    q.delta4 = delta2 - epsilon12();  // epsilon34' = epsilon12
    q.omega1 = omega4;
    q.omega4 = omega1;
    q.g_probe = g_trigger;
    q.g_trigger = g_probe;
    q.gamma(1, 2) = gamma(5, 4);
    q.gamma(3, 2) = gamma(3, 4);
    q.gamma(5, 2) = gamma(1, 4);
    q.gamma(1, 4) = gamma(5, 2);
    q.gamma(3, 4) = gamma(3, 2);
    q.gamma(5, 4) = gamma(1, 2);
    return q;
  }
};

}  // namespace mgate
