#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "bnpcc/copula.hpp"
#include "bnpcc/stats.hpp"
#include "support/oracles.hpp"

namespace {

using namespace bnpcc;

// Density integrated over the unit square, in normal-score coordinates
// (u = Phi(a), v = Phi(b)) so the corner singularities are flattened.
double integrated_density(double rho, double tol) {
  auto f = [&](double a, double b) {
    return gaussian_copula_density(UnitPair(std_normal_cdf(a), std_normal_cdf(b)), Correlation(rho)) *
           std_normal_pdf(a) * std_normal_pdf(b);
  };
  return oracle::integrate2d(f, -8.0, 8.0, -8.0, 8.0, tol);
}

TEST(GaussianCopulaDensity, IndependenceIsUniform) {
  EXPECT_DOUBLE_EQ(gaussian_copula_density(UnitPair(0.5, 0.5), Correlation(0.0)), 1.0);
  for (double u : {0.01, 0.3, 0.77, 0.999})
    for (double v : {0.02, 0.5, 0.93}) EXPECT_DOUBLE_EQ(gaussian_copula_density(UnitPair(u, v), Correlation(0.0)), 1.0);
}

TEST(GaussianCopulaDensity, MatchesBivariateNormalRatio) {
  EXPECT_NEAR(gaussian_copula_density(UnitPair(0.3, 0.7), Correlation(0.5)),
              oracle::gaussian_copula_density_ratio(0.3, 0.7, 0.5), 1e-12);
  for (double rho : {-0.95, -0.3, 0.2, 0.9})
    for (auto [u, v] : {std::pair{0.1, 0.2}, std::pair{0.6, 0.45}, std::pair{0.97, 0.01}})
      EXPECT_NEAR(gaussian_copula_density(UnitPair(u, v), Correlation(rho)) /
                      oracle::gaussian_copula_density_ratio(u, v, rho),
                  1.0, 1e-10);
}

TEST(GaussianCopulaDensity, SingularAtUnitCorrelation) {
  EXPECT_THROW(gaussian_copula_density(UnitPair(0.4, 0.4), Correlation(1.0)), SingularCorrelationError);
  EXPECT_THROW(gaussian_copula_density(UnitPair(0.4, 0.6), Correlation(-1.0)), SingularCorrelationError);
  EXPECT_THROW(gaussian_copula_cdf(UnitPair(0.4, 0.6), Correlation(1.0)), SingularCorrelationError);
}

TEST(GaussianCopulaDensity, IntegratesToOne) {
  for (double rho : {-0.5, 0.0, 0.5}) EXPECT_NEAR(integrated_density(rho, 1e-6), 1.0, 1e-3) << "rho=" << rho;
}

TEST(GaussianCopulaDensity, ExchangeAndReflectionSymmetry) {
  for (double rho : {-0.8, -0.1, 0.4, 0.95}) {
    for (auto [u, v] : {std::pair{0.12, 0.8}, std::pair{0.5, 0.33}, std::pair{0.91, 0.07}}) {
      const double c = gaussian_copula_density(UnitPair(u, v), Correlation(rho));
      EXPECT_NEAR(gaussian_copula_density(UnitPair(v, u), Correlation(rho)), c, 1e-12 * c);
      EXPECT_NEAR(gaussian_copula_density(UnitPair(1.0 - u, v), Correlation(-rho)), c, 1e-9 * c);
    }
  }
}

TEST(GaussianCopulaCdf, IndependenceAndQuadrantIdentity) {
  EXPECT_NEAR(gaussian_copula_cdf(UnitPair(0.5, 0.5), Correlation(0.0)), 0.25, 1e-15);
  EXPECT_NEAR(gaussian_copula_cdf(UnitPair(0.2, 0.9), Correlation(0.0)), 0.18, 1e-15);
  EXPECT_NEAR(gaussian_copula_cdf(UnitPair(0.5, 0.5), Correlation(0.5)), 1.0 / 3.0, 1e-14);

  // Monte Carlo confirmation of P(U <= 1/2, V <= 1/2) = 1/3 at rho = 0.5.
  Rng rng(11);
  const int draws = 400000;
  int hits = 0;
  for (int t = 0; t < draws; ++t) {
    const auto p = sample_gaussian_copula(Correlation(0.5), rng);
    hits += (p.u() <= 0.5 && p.v() <= 0.5);
  }
  const double est = static_cast<double>(hits) / draws;
  EXPECT_NEAR(est, 1.0 / 3.0, 3.0 * std::sqrt(est * (1.0 - est) / draws));
}

TEST(GaussianCopulaCdf, AgreesWithIntegratedDensity) {
  for (double rho : {-0.9, -0.4, 0.3, 0.8}) {
    for (auto [u, v] : {std::pair{0.3, 0.6}, std::pair{0.85, 0.2}}) {
      auto f = [&](double a, double b) {
        return gaussian_copula_density(UnitPair(std_normal_cdf(a), std_normal_cdf(b)), Correlation(rho)) *
               std_normal_pdf(a) * std_normal_pdf(b);
      };
      const double reference = oracle::integrate2d(f, -8.0, std_normal_quantile(u), -8.0, std_normal_quantile(v), 1e-9);
      EXPECT_NEAR(gaussian_copula_cdf(UnitPair(u, v), Correlation(rho)), reference, 1e-6);
    }
  }
}

TEST(GaussianCopulaCdf, FrechetHoeffdingBounds) {
  for (double rho : {-0.99, -0.7, -0.2, 0.0, 0.3, 0.75, 0.99}) {
    for (double u = 0.05; u < 1.0; u += 0.1) {
      for (double v = 0.05; v < 1.0; v += 0.1) {
        const double c = gaussian_copula_cdf(UnitPair(u, v), Correlation(rho));
        EXPECT_GE(c, std::max(u + v - 1.0, 0.0) - 1e-12);
        EXPECT_LE(c, std::min(u, v) + 1e-12);
      }
    }
  }
}

std::vector<double> first(const std::vector<UnitPair>& s) {
  std::vector<double> out;
  for (const auto& p : s) out.push_back(p.u());
  return out;
}
std::vector<double> second(const std::vector<UnitPair>& s) {
  std::vector<double> out;
  for (const auto& p : s) out.push_back(p.v());
  return out;
}

TEST(SampleGaussianCopula, DegenerateCorrelations) {
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    const auto p = sample_gaussian_copula(Correlation(1.0), rng);
    EXPECT_EQ(p.u(), p.v());
    const auto q = sample_gaussian_copula(Correlation(-1.0), rng);
    EXPECT_NEAR(q.u() + q.v(), 1.0, 1e-12);
  }
}

TEST(SampleGaussianCopula, IndependenceAndKendallTau) {
  Rng rng(5);
  std::vector<UnitPair> indep, dep;
  for (int t = 0; t < 100000; ++t) {
    indep.push_back(sample_gaussian_copula(Correlation(0.0), rng));
    dep.push_back(sample_gaussian_copula(Correlation(0.8), rng));
  }
  const auto u = first(indep), v = second(indep);
  const double mu = mean(u), mv = mean(v);
  double cov = 0.0, vu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cov += (u[i] - mu) * (v[i] - mv);
    vu += (u[i] - mu) * (u[i] - mu);
    vv += (v[i] - mv) * (v[i] - mv);
  }
  EXPECT_NEAR(cov / std::sqrt(vu * vv), 0.0, 0.01);
  EXPECT_NEAR(kendall_tau(first(dep), second(dep)), 2.0 / std::numbers::pi * std::asin(0.8), 0.01);
}

TEST(SampleGaussianCopula, UniformMarginals) {
  Rng rng(8);
  std::vector<UnitPair> s;
  for (int t = 0; t < 100000; ++t) s.push_back(sample_gaussian_copula(Correlation(-0.6), rng));
  EXPECT_LT(ks_uniform_statistic(first(s)), ks_critical_1pct(s.size()));
  EXPECT_LT(ks_uniform_statistic(second(s)), ks_critical_1pct(s.size()));
}

TEST(FrankCopula, DebyeTauAgainstOracle) {
  EXPECT_NEAR(oracle::frank_tau_debye(5.736), 0.5, 1e-3);
  for (double theta : {-12.0, -3.0, 0.5, 2.0, 5.736, 20.0, 150.0})
    EXPECT_NEAR(frank_kendall_tau(theta), oracle::frank_tau_debye(theta), 1e-8) << "theta=" << theta;
  EXPECT_NEAR(frank_kendall_tau(1e-10), 0.0, 1e-10);
}

TEST(FrankCopula, ParameterForTauInvertsTau) {
  EXPECT_NEAR(frank_parameter_for_tau(0.5), 5.736, 1e-3);
  for (double tau : {-0.7, -0.2, 0.05, 0.5, 0.9}) EXPECT_NEAR(frank_kendall_tau(frank_parameter_for_tau(tau)), tau, 1e-9);
  EXPECT_EQ(frank_parameter_for_tau(0.0), 0.0);
  EXPECT_THROW(frank_parameter_for_tau(1.0), std::domain_error);
}

TEST(FrankCopula, SamplerKendallTau) {
  Rng rng(21);
  std::vector<UnitPair> zero, mid, high, neg;
  for (int t = 0; t < 100000; ++t) {
    zero.push_back(sample_frank_copula(0.0, rng));
    mid.push_back(sample_frank_copula(5.736, rng));
    neg.push_back(sample_frank_copula(-5.736, rng));
  }
  for (int t = 0; t < 20000; ++t) high.push_back(sample_frank_copula(500.0, rng));
  EXPECT_NEAR(kendall_tau(first(zero), second(zero)), 0.0, 0.01);
  EXPECT_NEAR(kendall_tau(first(mid), second(mid)), 0.5, 0.01);
  EXPECT_NEAR(kendall_tau(first(neg), second(neg)), -0.5, 0.01);
  EXPECT_GT(kendall_tau(first(high), second(high)), 0.98);
}

TEST(FrankCopula, UniformMarginals) {
  Rng rng(4);
  std::vector<UnitPair> s;
  for (int t = 0; t < 100000; ++t) s.push_back(sample_frank_copula(8.0, rng));
  EXPECT_LT(ks_uniform_statistic(first(s)), ks_critical_1pct(s.size()));
  EXPECT_LT(ks_uniform_statistic(second(s)), ks_critical_1pct(s.size()));
}

TEST(CopulaTypes, RejectOutOfRangeValues) {
  EXPECT_THROW(UnitPair(0.0, 0.5), std::domain_error);
  EXPECT_THROW(UnitPair(0.5, 1.0), std::domain_error);
  EXPECT_THROW(Correlation(1.2), std::domain_error);
  EXPECT_THROW(Correlation(std::nan("")), std::domain_error);
}

}  // namespace
