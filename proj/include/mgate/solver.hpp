#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "errors.hpp"

namespace mgate {

enum class SolveMethod { AdaptiveRk, MatrixExponential };

struct SolverOptions {
  SolveMethod method = SolveMethod::AdaptiveRk;
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = 0.0;  // 0 means unbounded

  void validate() const {
    if (!(rtol > 0.0) || !std::isfinite(rtol) ||
        !(atol > 0.0) || !std::isfinite(atol)) {
      throw params_error("solver tolerances must be positive and finite");
    }
    if (max_step < 0.0 || !std::isfinite(max_step)) {
      throw params_error("max_step must be finite and >= 0");
    }
  }
};

// Matrix exponential via Eigen's scaling-and-squaring Pade implementation.
inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) { return a.exp(); }

// Dormand-Prince 5(4) embedded Runge-Kutta integrator with a standard
// proportional step controller and FSAL reuse.  State is any Eigen
// matrix/vector of complex doubles; Rhs is callable as rhs(y, dydt).
template <class State, class Rhs>
class DormandPrince {
 public:
  DormandPrince(Rhs rhs, State y0, double t0, SolverOptions opts)
      : rhs_(std::move(rhs)), y_(std::move(y0)), t_(t0), opts_(opts) {
    opts_.validate();
    k1_ = k2_ = k3_ = k4_ = k5_ = k6_ = k7_ = ytmp_ = y_;
    have_k1_ = false;
    h_ = 0.0;
  }

  double t() const { return t_; }
  const State& y() const { return y_; }
  State& y() { return y_; }

  // Integrate forward to t_end (>= current time).
  void advance_to(double t_end) {
    if (t_end < t_) throw integration_error("cannot integrate backwards", t_);
    while (t_ < t_end) {
      if (t_end - t_ <= 1e-14 * std::max(1.0, std::abs(t_end))) {
        t_ = t_end;
        break;
      }
      if (!have_k1_) {
        rhs_(y_, k1_);
        have_k1_ = true;
      }
      if (h_ <= 0.0) h_ = initial_step(t_end - t_);
      double h = std::min(h_, t_end - t_);
      if (opts_.max_step > 0.0) h = std::min(h, opts_.max_step);

      for (int attempt = 0;; ++attempt) {
        if (!(h > min_step())) {
          throw integration_error("adaptive step size underflow", t_);
        }
        const double err = try_step(h);
        if (err <= 1.0) {
          t_ += h;
          y_.swap(ytmp_);
          k1_.swap(k7_);  // FSAL: stage 7 equals the next step's stage 1
          double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
          grow = std::clamp(grow, 0.2, attempt == 0 ? 5.0 : 1.0);
          h_ = h * grow;
          break;
        }
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
      }
    }
  }

 private:
  double min_step() const { return 1e-14 * std::max(1.0, std::abs(t_)); }

  double initial_step(double span) const {
    const double y_scale = std::sqrt(y_.cwiseAbs2().sum()) + opts_.atol;
    const double f_scale = std::sqrt(k1_.cwiseAbs2().sum()) + 1e-300;
    double h = 0.01 * y_scale / f_scale;
    return std::clamp(h, 1e-12 * std::max(span, 1.0), span);
  }

  // One trial step of size h; fills ytmp_ with the 5th-order result and k7_
  // with the FSAL stage.  Returns the scaled error estimate.
  double try_step(double h) {
    ytmp_ = y_ + (h * kA21) * k1_;
    rhs_(ytmp_, k2_);
    ytmp_ = y_ + (h * kA31) * k1_ + (h * kA32) * k2_;
    rhs_(ytmp_, k3_);
    ytmp_ = y_ + (h * kA41) * k1_ + (h * kA42) * k2_ + (h * kA43) * k3_;
    rhs_(ytmp_, k4_);
    ytmp_ = y_ + (h * kA51) * k1_ + (h * kA52) * k2_ + (h * kA53) * k3_ +
            (h * kA54) * k4_;
    rhs_(ytmp_, k5_);
    ytmp_ = y_ + (h * kA61) * k1_ + (h * kA62) * k2_ + (h * kA63) * k3_ +
            (h * kA64) * k4_ + (h * kA65) * k5_;
    rhs_(ytmp_, k6_);
    ytmp_ = y_ + (h * kB1) * k1_ + (h * kB3) * k3_ + (h * kB4) * k4_ +
            (h * kB5) * k5_ + (h * kB6) * k6_;
    rhs_(ytmp_, k7_);

    // embedded 4th-order difference, elementwise scaled
    const State diff = (h * kE1) * k1_ + (h * kE3) * k3_ + (h * kE4) * k4_ +
                       (h * kE5) * k5_ + (h * kE6) * k6_ + (h * kE7) * k7_;
    double sum = 0.0;
    const auto n = y_.size();
    const auto* yp = y_.data();
    const auto* np_ = ytmp_.data();
    const auto* dp = diff.data();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale =
          opts_.atol + opts_.rtol * std::max(std::abs(yp[i]), std::abs(np_[i]));
      const double e = std::abs(dp[i]) / scale;
      sum += e * e;
    }
    return std::sqrt(sum / double(n));
  }

  static constexpr double kA21 = 1.0 / 5.0;
  static constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
  static constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0,
                          kA43 = 32.0 / 9.0;
  static constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                          kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
  static constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                          kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                          kA65 = -5103.0 / 18656.0;
  static constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0,
                          kB4 = 125.0 / 192.0, kB5 = -2187.0 / 6784.0,
                          kB6 = 11.0 / 84.0;
  // b - b_hat (5th minus embedded 4th order weights)
  static constexpr double kE1 = 35.0 / 384.0 - 5179.0 / 57600.0;
  static constexpr double kE3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
  static constexpr double kE4 = 125.0 / 192.0 - 393.0 / 640.0;
  static constexpr double kE5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
  static constexpr double kE6 = 11.0 / 84.0 - 187.0 / 2100.0;
  static constexpr double kE7 = -1.0 / 40.0;

  Rhs rhs_;
  State y_;
  double t_;
  SolverOptions opts_;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_;
  double h_;
  bool have_k1_;
};

// Convenience one-shot integration.
template <class State, class Rhs>
State integrate_adaptive(Rhs rhs, State y0, double t0, double t1,
                         const SolverOptions& opts) {
  DormandPrince<State, Rhs> stepper(std::move(rhs), std::move(y0), t0, opts);
  stepper.advance_to(t1);
  return stepper.y();
}

}  // namespace mgate
