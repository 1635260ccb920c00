#pragma once

#include <stdexcept>
#include <string>

namespace mgate {

// Base class for everything thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Physical parameters out of range (negative decay rate, non-finite value, ...).
class params_error : public error {
 public:
  using error::error;
};

// A state fails its contract (non-Hermitian density matrix, trace > 1,
// negative eigenvalue beyond tolerance, unnormalised amplitudes).
class state_error : public error {
 public:
  using error::error;
};

// Phase extraction attempted on a coherence element whose magnitude is
// below the resolvable threshold.
class undefined_phase_error : public error {
 public:
  using error::error;
};

// Closed-form expression evaluated at (near-)singular denominators.
class singular_parameter_error : public error {
 public:
  using error::error;
};

// Adaptive integration could not reach the requested time within tolerance.
class integration_error : public error {
 public:
  integration_error(const std::string& what, double t_reached)
      : error(what), t_reached_(t_reached) {}
  double t_reached() const { return t_reached_; }

 private:
  double t_reached_;
};

// Problems reading or interpreting a run configuration.
class config_error : public error {
 public:
  using error::error;
};

}  // namespace mgate
