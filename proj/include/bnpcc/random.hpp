#ifndef BNPCC_RANDOM_HPP
#define BNPCC_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace bnpcc {

using Rng = std::mt19937_64;

// Uniform draw on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  while (u <= 0.0) u = unif(rng);
  return u;
}

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> norm(0.0, 1.0);
  return norm(rng);
}

// Be(a, b) through two gamma variates. Result is kept strictly inside (0, 1).
inline double beta_draw(Rng& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  double p = x / (x + y);
  if (!(p > 0.0)) p = std::numeric_limits<double>::min();
  if (!(p < 1.0)) p = std::nextafter(1.0, 0.0);
  return p;
}

}  // namespace bnpcc

#endif  // BNPCC_RANDOM_HPP
