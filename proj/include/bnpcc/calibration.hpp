#ifndef BNPCC_CALIBRATION_HPP
#define BNPCC_CALIBRATION_HPP

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnpcc/copula.hpp"
#include "bnpcc/error.hpp"

namespace bnpcc {

enum class CalibrationFamily {
  Quadratic,  // theta = b1 + b2 x^2
  ExpBump,    // theta = b1 + b2 x + b3 exp(-b4 x^2)
};

/// Which calibration function theta(x | beta) is in force.
class CalibrationSpec {
 public:
  constexpr explicit CalibrationSpec(CalibrationFamily family = CalibrationFamily::Quadratic)
      : family_(family) {}

  constexpr CalibrationFamily family() const { return family_; }
  constexpr std::size_t dim() const { return family_ == CalibrationFamily::Quadratic ? 2 : 4; }
  constexpr std::string_view name() const {
    return family_ == CalibrationFamily::Quadratic ? "quadratic" : "expbump";
  }

  static CalibrationSpec from_name(std::string_view name) {
    if (name == "quadratic") return CalibrationSpec(CalibrationFamily::Quadratic);
    if (name == "expbump") return CalibrationSpec(CalibrationFamily::ExpBump);
    throw ValidationError("unknown calibration family '" + std::string(name) +
                          "' (expected quadratic or expbump)");
  }

  static std::optional<CalibrationSpec> from_dim(std::size_t dim) {
    if (dim == 2) return CalibrationSpec(CalibrationFamily::Quadratic);
    if (dim == 4) return CalibrationSpec(CalibrationFamily::ExpBump);
    return std::nullopt;
  }

  friend constexpr bool operator==(CalibrationSpec, CalibrationSpec) = default;

 private:
  CalibrationFamily family_;
};

/// Coefficient vector of a calibration function. Entries are finite.
class BetaVector {
 public:
  BetaVector() = default;
  explicit BetaVector(std::vector<double> coefficients) : c_(std::move(coefficients)) {
    for (double b : c_)
      if (!std::isfinite(b)) throw ValidationError("calibration coefficients must be finite");
  }
  BetaVector(std::initializer_list<double> coefficients) : BetaVector(std::vector<double>(coefficients)) {}

  std::size_t size() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }
  std::span<const double> values() const { return c_; }
  auto begin() const { return c_.begin(); }
  auto end() const { return c_.end(); }

  friend bool operator==(const BetaVector&, const BetaVector&) = default;

 private:
  std::vector<double> c_;
};

inline void require_conforming(const CalibrationSpec& spec, const BetaVector& beta) {
  if (beta.size() != spec.dim())
    throw std::invalid_argument("calibration '" + std::string(spec.name()) + "' needs " +
                                std::to_string(spec.dim()) + " coefficients, got " +
                                std::to_string(beta.size()));
}

// Unchecked evaluation for the sampler's inner loop.
inline double calibration_value(CalibrationFamily family, std::span<const double> b, double x) {
  if (family == CalibrationFamily::Quadratic) return b[0] + b[1] * x * x;
  return b[0] + b[1] * x + b[2] * std::exp(-b[3] * x * x);
}

inline double eval_calibration(const CalibrationSpec& spec, const BetaVector& beta, double x) {
  require_conforming(spec, beta);
  return calibration_value(spec.family(), beta.values(), x);
}

/// rho = 2 / (|theta| + 1) - 1. Even in theta, equal to 1 at theta = 0 and
/// decreasing towards -1 as |theta| grows.
inline double link_rho_value(double theta) { return 2.0 / (std::abs(theta) + 1.0) - 1.0; }

inline Correlation link_rho(double theta) { return Correlation(link_rho_value(theta)); }

/// Conditional Gaussian copula density c_{rho(x|beta)}(u, v).
///
/// rho is clamped to |rho| <= 1 - 1e-10 first, so theta = 0 (rho = 1) gives a
/// large finite value instead of a singularity.
inline double conditional_log_density(const UnitPair& p, double x, const BetaVector& beta,
                                      const CalibrationSpec& spec) {
  const double rho = clamp_rho(link_rho_value(eval_calibration(spec, beta, x)));
  return gaussian_copula_log_density(p, Correlation(rho));
}

inline double conditional_density(const UnitPair& p, double x, const BetaVector& beta,
                                  const CalibrationSpec& spec) {
  return std::exp(conditional_log_density(p, x, beta, spec));
}

}  // namespace bnpcc

#endif  // BNPCC_CALIBRATION_HPP
