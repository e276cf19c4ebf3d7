#ifndef BNPCC_NORMAL_HPP
#define BNPCC_NORMAL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bnpcc {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Phi(z) through erfc, which keeps full relative accuracy in the lower tail.
inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

/// Inverse of the standard normal CDF.
///
/// Acklam's rational approximation (relative error ~1.2e-9) followed by one
/// Newton step on Phi, which brings the result to near machine precision.
/// Throws std::domain_error unless 0 < p < 1.
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("std_normal_quantile: p must lie in (0,1)");

  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Newton refinement; evaluate the residual in the tail nearer to p.
  const double density = std_normal_pdf(x);
  if (density > 0.0) {
    const double residual = (p <= 0.5) ? std_normal_cdf(x) - p : (1.0 - p) - std_normal_cdf(-x);
    x -= residual / density;
  }
  return x;
}

namespace detail {

// Gauss-Legendre half-rules (negative abscissae) used by the bivariate normal
// integral: 6, 12 and 20 points.
struct GaussRule {
  int size;
  std::array<double, 10> weight;
  std::array<double, 10> node;
};

inline constexpr std::array<GaussRule, 3> kBvnRules = {{
    {3,
     {0.1713244923791705, 0.3607615730481384, 0.4679139345726904},
     {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970}},
    {6,
     {0.04717533638651177, 0.1069393259953183, 0.1600783285433464, 0.2031674267230659,
      0.2334925365383547, 0.2491470458134029},
     {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050, -0.5873179542866171,
      -0.3678314989981802, -0.1252334085114692}},
    {10,
     {0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
      0.1019301198172404, 0.1181945319615184, 0.1316886384491766, 0.1420961093183821,
      0.1491729864726037, 0.1527533871307259},
     {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188,
      -0.7463319064601508, -0.6360536807265150, -0.5108670019508271, -0.3737060887154196,
      -0.2277858511416451, -0.07652652113349733}},
}};

// Upper orthant probability P(X > h, Y > k) for a standard bivariate normal
// with correlation r (Drezner-Wesolowsky reduction with Genz's refinements).
inline double bvn_upper(double h, double k, double r) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double abs_r = std::abs(r);
  const GaussRule& rule = abs_r < 0.3 ? kBvnRules[0] : (abs_r < 0.75 ? kBvnRules[1] : kBvnRules[2]);

  double hk = h * k;
  double bvn = 0.0;
  if (abs_r < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(r);
    for (int i = 0; i < rule.size; ++i) {
      for (double sign : {-1.0, 1.0}) {
        const double sn = std::sin(0.5 * asr * (1.0 + sign * rule.node[i]));
        bvn += rule.weight[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    return bvn * asr / (2.0 * two_pi) + std_normal_cdf(-h) * std_normal_cdf(-k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (abs_r < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-0.5 * (bs / as + hk)) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-0.5 * hk) * std::sqrt(two_pi) * std_normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a *= 0.5;
    for (int i = 0; i < rule.size; ++i) {
      for (double sign : {-1.0, 1.0}) {
        const double xs = std::pow(a * (sign * rule.node[i] + 1.0), 2);
        const double rs = std::sqrt(1.0 - xs);
        bvn += a * rule.weight[i] *
               (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                std::exp(-0.5 * (bs / xs + hk)) * (1.0 + c * xs * (1.0 + d * xs)));
      }
    }
    bvn = -bvn / two_pi;
  }
  if (r > 0.0) return bvn + std_normal_cdf(-std::max(h, k));
  bvn = -bvn;
  if (k > h) bvn += std_normal_cdf(k) - std_normal_cdf(h);
  return bvn;
}

}  // namespace detail

/// P(X <= h, Y <= k) for a standard bivariate normal with correlation r.
inline double bivariate_normal_cdf(double h, double k, double r) {
  return std::clamp(detail::bvn_upper(-h, -k, r), 0.0, 1.0);
}

}  // namespace bnpcc

#endif  // BNPCC_NORMAL_HPP
