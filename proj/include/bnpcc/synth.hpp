#ifndef BNPCC_SYNTH_HPP
#define BNPCC_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

#include "bnpcc/calibration.hpp"
#include "bnpcc/copula.hpp"
#include "bnpcc/error.hpp"
#include "bnpcc/pseudo.hpp"
#include "bnpcc/random.hpp"

namespace bnpcc {

enum class CopulaFamily { Gaussian, Frank };

inline CopulaFamily copula_family_from_name(std::string_view name) {
  if (name == "gaussian") return CopulaFamily::Gaussian;
  if (name == "frank") return CopulaFamily::Frank;
  throw ValidationError("unknown copula family '" + std::string(name) + "' (expected gaussian or frank)");
}

inline std::string_view copula_family_name(CopulaFamily family) {
  return family == CopulaFamily::Gaussian ? "gaussian" : "frank";
}

// Generating coefficients used when none are given. These are library
// defaults chosen to give covariate-varying dependence on [-2, 2].
inline BetaVector default_truth_beta(const CalibrationSpec& spec) {
  if (spec.family() == CalibrationFamily::Quadratic) return {0.5, 0.5};
  return {0.5, 0.2, 1.0, 1.0};
}

struct SimulationPlan {
  CopulaFamily family = CopulaFamily::Gaussian;
  CalibrationSpec truth_spec{CalibrationFamily::Quadratic};
  BetaVector truth_beta{0.5, 0.5};
  std::size_t n = 500;
  std::uint64_t seed = 1;
  double covariate_min = -2.0;
  double covariate_max = 2.0;

  void validate() const {
    if (n < 10) throw ValidationError("simulation needs n >= 10");
    if (truth_beta.size() != truth_spec.dim())
      throw ValidationError("truth coefficients do not match the calibration dimension");
    if (!(covariate_min < covariate_max) || !std::isfinite(covariate_min) || !std::isfinite(covariate_max))
      throw ValidationError("covariate range must be a finite interval with min < max");
  }

  /// Gaussian-copula correlation driving the dependence at covariate x.
  double true_rho(double x) const {
    return link_rho_value(calibration_value(truth_spec.family(), truth_beta.values(), x));
  }

  double true_tau(double x) const { return 2.0 / std::numbers::pi * std::asin(true_rho(x)); }
};

/// Draws x_i ~ U(covariate range) and (u_i, v_i) from the conditional copula
/// at x_i. The Frank family uses the Frank parameter whose Kendall's tau
/// matches the Gaussian target tau at x_i.
inline PseudoDataset simulate_dataset(const SimulationPlan& plan) {
  plan.validate();
  Rng rng(plan.seed);
  std::uniform_real_distribution<double> covariate(plan.covariate_min, plan.covariate_max);
  PseudoDataset out;
  out.u.reserve(plan.n);
  out.v.reserve(plan.n);
  out.x.reserve(plan.n);
  for (std::size_t i = 0; i < plan.n; ++i) {
    const double x = covariate(rng);
    const double rho = plan.true_rho(x);
    UnitPair p = plan.family == CopulaFamily::Gaussian
                     ? sample_gaussian_copula(Correlation(rho), rng)
                     : sample_frank_copula(rho >= 1.0 ? 1e4 : frank_parameter_for_tau(plan.true_tau(x)), rng);
    out.u.push_back(p.u());
    out.v.push_back(p.v());
    out.x.push_back(x);
  }
  return out;
}

}  // namespace bnpcc

#endif  // BNPCC_SYNTH_HPP
