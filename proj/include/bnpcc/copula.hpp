#ifndef BNPCC_COPULA_HPP
#define BNPCC_COPULA_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bnpcc/error.hpp"
#include "bnpcc/normal.hpp"
#include "bnpcc/random.hpp"

namespace bnpcc {

/// Correlation parameter of a bivariate Gaussian copula.
///
/// Values lie in [-1, 1]. The link used by the calibration layer reaches +1
/// (at theta = 0) and only approaches -1, but the samplers accept both
/// endpoints and return the co- or countermonotone pair there.
class Correlation {
 public:
  constexpr Correlation() = default;
  explicit Correlation(double value) : value_(value) {
    if (!(value >= -1.0 && value <= 1.0))
      throw std::domain_error("Correlation must lie in [-1, 1], got " + std::to_string(value));
  }
  constexpr double value() const { return value_; }

 private:
  double value_ = 0.0;
};

/// A point strictly inside the unit square.
class UnitPair {
 public:
  UnitPair(double u, double v) : u_(u), v_(v) {
    if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0))
      throw std::domain_error("UnitPair coordinates must lie in (0,1)");
  }
  double u() const { return u_; }
  double v() const { return v_; }

 private:
  double u_;
  double v_;
};

// Largest |rho| at which the Gaussian copula density is evaluated.
inline constexpr double kMaxAbsRho = 1.0 - 1e-10;

inline double clamp_rho(double rho) { return std::clamp(rho, -kMaxAbsRho, kMaxAbsRho); }

/// Log Gaussian copula density at normal scores (q1, q2).
///
///   log c = -1/2 log(1 - rho^2) - (rho^2 (q1^2 + q2^2) - 2 rho q1 q2) / (2 (1 - rho^2))
///
/// which is the quadratic form q'(Sigma^-1 - I)q written out. No range check
/// on rho; callers clamp.
inline double gaussian_copula_log_density_scores(double q1, double q2, double rho) {
  const double one_minus_r2 = (1.0 - rho) * (1.0 + rho);
  const double quad = rho * rho * (q1 * q1 + q2 * q2) - 2.0 * rho * q1 * q2;
  return -0.5 * std::log(one_minus_r2) - quad / (2.0 * one_minus_r2);
}

inline void require_nonsingular(const Correlation& rho) {
  if (std::abs(rho.value()) >= 1.0) throw SingularCorrelationError("Gaussian copula is singular at |rho| = 1");
}

inline double gaussian_copula_log_density(const UnitPair& p, const Correlation& rho) {
  require_nonsingular(rho);
  return gaussian_copula_log_density_scores(std_normal_quantile(p.u()), std_normal_quantile(p.v()),
                                            rho.value());
}

inline double gaussian_copula_density(const UnitPair& p, const Correlation& rho) {
  return std::exp(gaussian_copula_log_density(p, rho));
}

/// C_rho(u, v) = Phi_rho(Phi^-1(u), Phi^-1(v)).
inline double gaussian_copula_cdf(const UnitPair& p, const Correlation& rho) {
  require_nonsingular(rho);
  return bivariate_normal_cdf(std_normal_quantile(p.u()), std_normal_quantile(p.v()), rho.value());
}

// Keeps a probability produced by Phi inside (0, 1) at extreme scores.
inline double open_unit(double p) {
  constexpr double lo = std::numeric_limits<double>::min();
  return std::clamp(p, lo, std::nextafter(1.0, 0.0));
}

inline UnitPair sample_gaussian_copula(const Correlation& rho, Rng& rng) {
  const double r = rho.value();
  const double z1 = standard_normal(rng);
  if (r >= 1.0) {
    const double u = open_unit(std_normal_cdf(z1));
    return {u, u};
  }
  if (r <= -1.0) {
    // Phi(-z) instead of 1 - Phi(z) keeps u + v = 1 up to rounding in both tails.
    return {open_unit(std_normal_cdf(z1)), open_unit(std_normal_cdf(-z1))};
  }
  const double z2 = r * z1 + std::sqrt((1.0 - r) * (1.0 + r)) * standard_normal(rng);
  return {open_unit(std_normal_cdf(z1)), open_unit(std_normal_cdf(z2))};
}

/// Debye function of order one, D1(t) = t^-1 * integral_0^t s / (e^s - 1) ds.
inline double debye1(double t) {
  if (t == 0.0) return 1.0;
  if (t < 0.0) return debye1(-t) - 0.5 * t;
  // The integrand is below 1e-24 past s = 60; the tail beyond is negligible.
  const double upper = std::min(t, 60.0);
  constexpr int panels = 400;
  const double h = upper / panels;
  auto f = [](double s) { return s == 0.0 ? 1.0 : s / std::expm1(s); };
  double acc = f(0.0) + f(upper);
  for (int i = 1; i < panels; ++i) acc += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0 / t;
}

/// Kendall's tau of the Frank copula, 1 - 4/theta (1 - D1(theta)).
inline double frank_kendall_tau(double theta) {
  if (std::abs(theta) < 1e-8) return theta / 9.0;
  return 1.0 - 4.0 / theta * (1.0 - debye1(theta));
}

/// Frank parameter whose Kendall's tau equals `tau`, by bisection.
inline double frank_parameter_for_tau(double tau) {
  if (!(tau > -1.0 && tau < 1.0)) throw std::domain_error("frank_parameter_for_tau: tau must lie in (-1,1)");
  if (tau == 0.0) return 0.0;
  constexpr double bound = 1e4;
  double lo = tau > 0.0 ? 0.0 : -bound;
  double hi = tau > 0.0 ? bound : 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (frank_kendall_tau(mid) < tau ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Draw from the Frank copula by conditional inversion: u ~ U(0,1), then
/// v = C_{2|1}^{-1}(w | u) with w ~ U(0,1). theta = 0 gives independence.
inline UnitPair sample_frank_copula(double theta, Rng& rng) {
  const double u = uniform_open(rng);
  const double w = uniform_open(rng);
  if (theta == 0.0) return {u, w};
  // Negative parameters through the reflection (U, 1 - V) of the positive case.
  const double t = std::abs(theta);
  const double num = w * std::expm1(-t);
  const double den = w + (1.0 - w) * std::exp(-t * u);
  double v = -std::log1p(num / den) / t;
  v = open_unit(v);
  if (theta < 0.0) v = open_unit(1.0 - v);
  return {u, v};
}

}  // namespace bnpcc

#endif  // BNPCC_COPULA_HPP
