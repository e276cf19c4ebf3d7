#ifndef BNPCC_POSTERIOR_HPP
#define BNPCC_POSTERIOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "bnpcc/calibration.hpp"
#include "bnpcc/copula.hpp"
#include "bnpcc/random.hpp"
#include "bnpcc/sampler.hpp"
#include "bnpcc/stats.hpp"

namespace bnpcc {

/// Kendall's tau of a finite mixture of Gaussian copulas,
///
///   tau = sum_j sum_k w_j w_k (2/pi) arcsin((rho_j + rho_k) / 2),
///
/// the closed form of 4 E[C(U,V)] - 1. Weights are renormalized to sum to one.
inline double mixture_kendall_tau(std::span<const double> weights, std::span<const double> rhos) {
  if (weights.size() != rhos.size()) throw std::invalid_argument("mixture_kendall_tau: length mismatch");
  if (weights.empty()) throw std::invalid_argument("mixture_kendall_tau: empty mixture");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("mixture_kendall_tau: weights must have positive sum");
  double tau = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    for (std::size_t k = 0; k < weights.size(); ++k)
      tau += weights[j] * weights[k] * std::asin(0.5 * (rhos[j] + rhos[k]));
  }
  tau *= 2.0 / std::numbers::pi / (total * total);
  return std::clamp(tau, -1.0, 1.0);
}

inline double draw_kendall_tau(const TraceDraw& draw, const CalibrationSpec& spec, double x) {
  std::vector<double> rhos(draw.atoms.size());
  for (std::size_t j = 0; j < rhos.size(); ++j)
    rhos[j] = link_rho_value(calibration_value(spec.family(), draw.atoms[j].values(), x));
  return mixture_kendall_tau(draw.weights, rhos);
}

struct TauCurve {
  std::vector<double> x_grid;
  std::vector<double> mean;
  std::vector<double> lower95;
  std::vector<double> upper95;
};

inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2) return {lo};
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

/// Pointwise posterior mean and equal-tailed 95% band of tau(x).
inline TauCurve tau_curve(const ChainTrace& trace, const CalibrationSpec& spec, std::span<const double> x_grid) {
  if (trace.empty()) throw std::invalid_argument("tau_curve: empty trace");
  TauCurve curve;
  curve.x_grid.assign(x_grid.begin(), x_grid.end());
  std::vector<double> taus(trace.size());
  for (double x : x_grid) {
    for (std::size_t t = 0; t < trace.size(); ++t) taus[t] = draw_kendall_tau(trace.draws[t], spec, x);
    curve.mean.push_back(mean(taus));
    curve.lower95.push_back(quantile(taus, 0.025));
    curve.upper95.push_back(quantile(taus, 0.975));
  }
  return curve;
}

struct PredictiveDraw {
  double x;
  double u;
  double v;
};

/// One posterior predictive pair per requested covariate: a kept iteration
/// uniformly at random, a component with probability proportional to its
/// weight, then a Gaussian copula draw at rho(x | beta_j).
inline std::vector<PredictiveDraw> predictive_sample(const ChainTrace& trace, const CalibrationSpec& spec,
                                                     std::span<const double> covariates, Rng& rng) {
  if (trace.empty()) throw std::invalid_argument("predictive_sample: empty trace");
  std::vector<PredictiveDraw> out;
  out.reserve(covariates.size());
  std::uniform_int_distribution<std::size_t> pick_draw(0, trace.size() - 1);
  for (double x : covariates) {
    const TraceDraw& draw = trace.draws[pick_draw(rng)];
    std::discrete_distribution<std::size_t> pick_component(draw.weights.begin(), draw.weights.end());
    const BetaVector& beta = draw.atoms[pick_component(rng)];
    const double rho = link_rho_value(calibration_value(spec.family(), beta.values(), x));
    const UnitPair p = sample_gaussian_copula(Correlation(std::clamp(rho, -1.0, 1.0)), rng);
    out.push_back({x, p.u(), p.v()});
  }
  return out;
}

struct SummaryStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

inline SummaryStats summarize_values(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summary of an empty sample");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  return {*mn, quantile(values, 0.25), quantile(values, 0.5), bnpcc::mean(values), quantile(values, 0.75), *mx};
}

/// Occupied-component counts and the two largest weights per kept iteration.
struct ComponentSummary {
  std::vector<std::size_t> iterations;
  std::vector<double> occupied;   // D*
  SummaryStats stats;
  std::vector<double> top_weight;
  std::vector<double> second_weight;
};

inline ComponentSummary component_summary(const ChainTrace& trace) {
  if (trace.empty()) throw std::invalid_argument("component_summary: empty trace");
  ComponentSummary out;
  for (const TraceDraw& draw : trace.draws) {
    out.iterations.push_back(draw.iteration);
    out.occupied.push_back(static_cast<double>(draw.occupied));
    std::vector<double> w = draw.weights;
    std::sort(w.begin(), w.end(), std::greater<>());
    out.top_weight.push_back(w.empty() ? 0.0 : w[0]);
    out.second_weight.push_back(w.size() < 2 ? 0.0 : w[1]);
  }
  out.stats = summarize_values(out.occupied);
  return out;
}

/// Posterior means for the components ranked by occupancy within each
/// iteration (rank 1 = most members). rho is averaged over `x_values`.
struct RankedComponent {
  std::size_t rank = 0;
  double mean_weight = 0.0;
  double mean_rho = 0.0;
  std::size_t iterations_present = 0;
};

inline std::vector<RankedComponent> ranked_components(const ChainTrace& trace, const CalibrationSpec& spec,
                                                      std::span<const double> x_values, std::size_t ranks = 2) {
  if (trace.empty()) throw std::invalid_argument("ranked_components: empty trace");
  if (x_values.empty()) throw std::invalid_argument("ranked_components: no covariate values");
  std::vector<RankedComponent> out(ranks);
  for (std::size_t r = 0; r < ranks; ++r) out[r].rank = r + 1;
  for (const TraceDraw& draw : trace.draws) {
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < draw.occupancy.size(); ++j)
      if (draw.occupancy[j] > 0) order.push_back(j);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return draw.occupancy[a] > draw.occupancy[b]; });
    for (std::size_t r = 0; r < std::min(ranks, order.size()); ++r) {
      const std::size_t j = order[r];
      double rho = 0.0;
      for (double x : x_values) rho += link_rho_value(calibration_value(spec.family(), draw.atoms[j].values(), x));
      out[r].mean_weight += draw.weights[j];
      out[r].mean_rho += rho / static_cast<double>(x_values.size());
      ++out[r].iterations_present;
    }
  }
  for (auto& rc : out) {
    if (rc.iterations_present == 0) continue;
    rc.mean_weight /= static_cast<double>(rc.iterations_present);
    rc.mean_rho /= static_cast<double>(rc.iterations_present);
  }
  return out;
}

}  // namespace bnpcc

#endif  // BNPCC_POSTERIOR_HPP
