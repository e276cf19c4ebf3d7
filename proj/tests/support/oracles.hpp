// Independent reference computations used only by the test suites.
#ifndef BNPCC_TESTS_ORACLES_HPP
#define BNPCC_TESTS_ORACLES_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "bnpcc/copula.hpp"
#include "bnpcc/normal.hpp"
#include "bnpcc/random.hpp"

namespace oracle {

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double fa, double b, double fb, double m,
                           double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                        int max_depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

/// Nested adaptive quadrature over [ax, bx] x [ay, by].
inline double integrate2d(const std::function<double(double, double)>& f, double ax, double bx, double ay, double by,
                          double tol = 1e-9) {
  return integrate([&](double s) { return integrate([&](double t) { return f(s, t); }, ay, by, tol * 0.1); }, ax,
                   bx, tol);
}

/// Standard normal CDF as 1/2 + integral_0^z phi.
inline double normal_cdf_by_quadrature(double z) {
  const double half = integrate([](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); },
                                0.0, std::abs(z), 1e-15);
  return z >= 0.0 ? 0.5 + half : 0.5 - half;
}

/// Gaussian copula density written as the bivariate-normal density ratio
/// phi2(q1, q2; rho) / (phi(q1) phi(q2)).
inline double gaussian_copula_density_ratio(double u, double v, double rho) {
  const double q1 = bnpcc::std_normal_quantile(u), q2 = bnpcc::std_normal_quantile(v);
  const double det = 1.0 - rho * rho;
  const double phi2 =
      std::exp(-(q1 * q1 - 2.0 * rho * q1 * q2 + q2 * q2) / (2.0 * det)) / (2.0 * std::numbers::pi * std::sqrt(det));
  return phi2 / (bnpcc::std_normal_pdf(q1) * bnpcc::std_normal_pdf(q2));
}

/// Kendall's tau of the Frank copula through its Debye-function form,
/// evaluated with adaptive quadrature (no shared code with the library).
inline double frank_tau_debye(double theta) {
  const double d1 = integrate([](double t) { return t == 0.0 ? 1.0 : t / (std::exp(t) - 1.0); }, 0.0, theta, 1e-13) /
                    theta;
  return 1.0 - 4.0 / theta * (1.0 - d1);
}

/// Regularized incomplete beta I_x(a, b) for positive integer a, b through
/// the binomial identity.
inline double beta_cdf_integer(double x, int a, int b) {
  const int m = a + b - 1;
  double total = 0.0;
  for (int j = a; j <= m; ++j) {
    const double log_choose = std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0);
    total += std::exp(log_choose + j * std::log(x) + (m - j) * std::log1p(-x));
  }
  return total;
}

struct MonteCarloEstimate {
  double mean;
  double std_error;
};

/// Kendall's tau of a Gaussian-copula mixture as 4 E[C(U, V)] - 1, with
/// (U, V) drawn from the mixture and C the mixture CDF.
inline MonteCarloEstimate mixture_tau_monte_carlo(const std::vector<double>& weights, const std::vector<double>& rhos,
                                                  std::size_t draws, std::uint64_t seed) {
  bnpcc::Rng rng(seed);
  double total_w = 0.0;
  for (double w : weights) total_w += w;
  std::vector<double> cumulative;
  double acc = 0.0;
  for (double w : weights) cumulative.push_back(acc += w / total_w);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < draws; ++t) {
    const double pick = unif(rng);
    std::size_t j = 0;
    while (j + 1 < cumulative.size() && pick > cumulative[j]) ++j;
    const auto p = bnpcc::sample_gaussian_copula(bnpcc::Correlation(rhos[j]), rng);
    const double q1 = bnpcc::std_normal_quantile(p.u()), q2 = bnpcc::std_normal_quantile(p.v());
    double c = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k)
      c += weights[k] / total_w * bnpcc::bivariate_normal_cdf(q1, q2, rhos[k]);
    const double sample = 4.0 * c - 1.0;
    sum += sample;
    sum_sq += sample * sample;
  }
  const double n = static_cast<double>(draws);
  const double mean = sum / n;
  return {mean, std::sqrt((sum_sq / n - mean * mean) / n)};
}

/// Batch-means standard error of a correlated series.
inline double batch_means_se(const std::vector<double>& series, std::size_t batches) {
  const std::size_t len = series.size() / batches;
  double grand = 0.0;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t t = b * len; t < (b + 1) * len; ++t) means[b] += series[t];
    means[b] /= static_cast<double>(len);
    grand += means[b];
  }
  grand /= static_cast<double>(batches);
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= static_cast<double>(batches - 1);
  return std::sqrt(var / static_cast<double>(batches));
}

}  // namespace oracle

#endif  // BNPCC_TESTS_ORACLES_HPP
