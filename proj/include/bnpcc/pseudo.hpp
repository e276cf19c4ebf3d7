#ifndef BNPCC_PSEUDO_HPP
#define BNPCC_PSEUDO_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "bnpcc/error.hpp"

namespace bnpcc {

/// Raw bivariate responses with one covariate per observation.
struct Dataset {
  std::vector<double> y1;
  std::vector<double> y2;
  std::vector<double> x;

  std::size_t size() const { return x.size(); }

  void validate() const {
    if (y1.size() != x.size() || y2.size() != x.size())
      throw ValidationError("dataset columns have different lengths");
    if (x.size() < 2) throw ValidationError("dataset needs at least 2 observations");
    for (const auto* col : {&y1, &y2, &x})
      for (double value : *col)
        if (!std::isfinite(value)) throw ValidationError("dataset contains a non-finite value");
  }
};

/// Observations on the copula scale, (u, v) in (0,1)^2, with covariates.
struct PseudoDataset {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> x;

  std::size_t size() const { return x.size(); }

  void validate() const {
    if (u.size() != x.size() || v.size() != x.size())
      throw ValidationError("pseudo-dataset columns have different lengths");
    if (x.size() < 2) throw ValidationError("pseudo-dataset needs at least 2 observations");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(u[i] > 0.0 && u[i] < 1.0 && v[i] > 0.0 && v[i] < 1.0))
        throw ValidationError("pseudo-observations must lie strictly inside (0,1)");
      if (!std::isfinite(x[i])) throw ValidationError("covariate contains a non-finite value");
    }
  }
};

/// Ranks 1..n of `values`, ties receiving the average of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t start = 0; start < n;) {
    std::size_t stop = start + 1;
    while (stop < n && values[order[stop]] == values[order[start]]) ++stop;
    const double rank = 0.5 * static_cast<double>(start + 1 + stop);
    for (std::size_t k = start; k < stop; ++k) ranks[order[k]] = rank;
    start = stop;
  }
  return ranks;
}

/// Rescaled empirical ranks: u_i = rank(y1_i) / (n + 1), v_i likewise.
inline PseudoDataset to_pseudo(const Dataset& data) {
  data.validate();
  const double scale = 1.0 / static_cast<double>(data.size() + 1);
  PseudoDataset out;
  out.u = average_ranks(data.y1);
  out.v = average_ranks(data.y2);
  for (double& r : out.u) r *= scale;
  for (double& r : out.v) r *= scale;
  out.x = data.x;
  return out;
}

/// Empirical quantile of `reference` at level u, inverting to_pseudo.
///
/// The level maps to the fractional order statistic u * (n + 1), clamped to
/// [1, n], with linear interpolation between neighbours. Levels produced by
/// the rank transform land exactly on an observed value.
inline double from_pseudo(double u, std::span<const double> reference) {
  if (reference.empty()) throw std::invalid_argument("from_pseudo: empty reference");
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("from_pseudo: u must lie in (0,1)");
  std::vector<double> sorted(reference.begin(), reference.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double pos = u * (n + 1.0);
  if (std::abs(pos - std::round(pos)) < 1e-9) pos = std::round(pos);
  pos = std::clamp(pos, 1.0, n);
  const auto lo = static_cast<std::size_t>(std::floor(pos)) - 1;
  const double frac = pos - std::floor(pos);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Affine map sending [min x, max x] onto [lo, hi].
struct CovariateScaling {
  double source_min = 0.0;
  double source_max = 0.0;
  double target_min = -2.0;
  double target_max = 2.0;

  double apply(double x) const {
    if (source_max == source_min) return 0.5 * (target_min + target_max);
    return target_min + (target_max - target_min) * (x - source_min) / (source_max - source_min);
  }
};

inline CovariateScaling fit_covariate_scaling(std::span<const double> x, double lo = -2.0, double hi = 2.0) {
  if (x.empty()) throw std::invalid_argument("fit_covariate_scaling: empty covariate");
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  return {*mn, *mx, lo, hi};
}

inline void apply_scaling(const CovariateScaling& scaling, std::vector<double>& x) {
  for (double& value : x) value = scaling.apply(value);
}

}  // namespace bnpcc

#endif  // BNPCC_PSEUDO_HPP
