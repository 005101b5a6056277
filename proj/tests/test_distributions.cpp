#include <cmath>
#include <numbers>

#include <boost/math/distributions/fisher_f.hpp>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "precip/distributions.hpp"
#include "precip/errors.hpp"
#include "precip/rng.hpp"

using namespace precip;

namespace {

std::vector<double> draw(std::size_t n, std::uint64_t seed, const std::function<double(Rng&)>& f) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = f(rng);
  return v;
}

double ks_p(std::vector<double> x, const std::function<double(double)>& cdf) {
  const double d = oracle::ks_statistic(x, cdf);
  return oracle::ks_pvalue(d, static_cast<double>(x.size()));
}

// Integral of gg_pdf over (0, inf) in log space (x = e^u), piecewise so that
// the adaptive rule cannot skip a narrow peak.
double gg_mass(const GGParams& p) {
  double s = 0.0;
  for (double u = -60.0; u < 300.0; u += 1.0) {
    s += oracle::simpson([&](double v) { return gg_pdf(std::exp(v), p) * std::exp(v); }, u, u + 1.0, 1e-14);
  }
  return s;
}

}  // namespace

TEST(Rng, Reproducible) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  auto s1 = Rng::for_shard(7, 0), s2 = Rng::for_shard(7, 1), s3 = Rng::for_shard(7, 0);
  EXPECT_NE(s1.next(), s2.next());
  s1 = Rng::for_shard(7, 0);
  EXPECT_EQ(s1.next(), s3.next());
}

TEST(Rng, UniformOpenInterval) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(GG, ParameterValidation) {
  EXPECT_THROW(GGParams({0.0, 1.0, 1.0}).validate(), DomainError);
  EXPECT_THROW(GGParams({1.0, 0.0, 1.0}).validate(), DomainError);
  EXPECT_THROW(GGParams({1.0, 1.0, -1.0}).validate(), DomainError);
  EXPECT_NO_THROW(GGParams({1.0, -2.0, 1.0}).validate());
  EXPECT_THROW(gg_pdf(-1.0, {1, 1, 1}), DomainError);
  EXPECT_THROW(gg_cdf(-1.0, {1, 1, 1}), DomainError);
  EXPECT_THROW(gg_quantile(1.0, {1, 1, 1}), DomainError);
}

TEST(GG, PdfExamples) {
  EXPECT_NEAR(gg_pdf(1.0, {1, 1, 1}), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(gg_pdf(1.0, {1, 2, 1}), 2.0 * std::exp(-1.0), 1e-15);
  const GGParams p{0.847, 0.7, 0.5};
  const double ref = 0.7 * std::pow(0.5, 0.847) / std::tgamma(0.847) * std::pow(2.0, 0.7 * 0.847 - 1.0) *
                     std::exp(-0.5 * std::pow(2.0, 0.7));
  EXPECT_NEAR(gg_pdf(2.0, p), ref, 1e-14);
  EXPECT_NEAR(gg_mass(p), 1.0, 1e-8);
}

TEST(GG, PdfNormalized) {
  for (const GGParams& p : {GGParams{0.847, 1.286, 1.0}, GGParams{3.0, 0.5, 2.0}, GGParams{0.5, 2.5, 0.1},
                            GGParams{2.0, -1.5, 1.0}, GGParams{0.8, -0.6, 3.0}}) {
    EXPECT_NEAR(gg_mass(p), 1.0, 1e-8) << p.r << " " << p.gamma << " " << p.mu;
  }
}

TEST(GG, CdfMatchesIntegratedPdf) {
  for (const GGParams& p : {GGParams{0.876, 1.279, 1.0}, GGParams{2.0, -1.5, 1.0}, GGParams{1.7, 0.6, 0.4}}) {
    for (const double x : {0.3, 1.0, 2.5}) {
      const double ref =
          oracle::simpson([&](double u) { return gg_pdf(std::exp(u), p) * std::exp(u); }, -60.0, std::log(x), 1e-13);
      EXPECT_NEAR(gg_cdf(x, p), ref, 1e-9);
      EXPECT_NEAR(gg_cdf(x, p) + gg_sf(x, p), 1.0, 1e-14);
    }
  }
}

TEST(GG, CdfExamples) {
  EXPECT_NEAR(gg_cdf(1.0, {1, 1, 1}), 0.6321205588285577, 1e-14);
  EXPECT_EQ(gg_cdf(0.0, {0.5, 2, 3}), 0.0);
  EXPECT_NEAR(gg_cdf(1.5, {0.876, 1.279, 1}), oracle::gamma_p(0.876, std::pow(1.5, 1.279)), 1e-12);
  // gamma < 0: upper incomplete gamma, still increasing in x
  const GGParams neg{1.3, -0.8, 2.0};
  EXPECT_NEAR(gg_cdf(2.0, neg), 1.0 - oracle::gamma_p(1.3, 2.0 * std::pow(2.0, -0.8)), 1e-12);
  EXPECT_LT(gg_cdf(1.0, neg), gg_cdf(2.0, neg));
  EXPECT_EQ(gg_cdf(0.0, neg), 0.0);
}

TEST(GG, QuantileRoundTrip) {
  EXPECT_NEAR(gg_quantile(1.0 - std::exp(-1.0), {1, 1, 1}), 1.0, 1e-9);
  EXPECT_NEAR(gg_quantile(0.5, {1, 2, 1}), std::sqrt(std::log(2.0)), 1e-10);
  for (const GGParams& p : {GGParams{0.847, 1.0, 0.3}, GGParams{0.847, 1.286, 1.0}, GGParams{2.0, -1.5, 1.0},
                            GGParams{0.2, 0.4, 5.0}}) {
    for (int i = 1; i <= 99; ++i) {
      const double q = i / 100.0;
      EXPECT_NEAR(gg_cdf(gg_quantile(q, p), p), q, 1e-10) << q;
    }
  }
}

TEST(GG, SamplerMatchesCdf) {
  for (const GGParams& p : {GGParams{1, 1, 1}, GGParams{1, 2.5, 1}, GGParams{0.847, 1.286, 0.5},
                            GGParams{2.0, -1.5, 1.0}}) {
    auto x = draw(100000, 11, [&](Rng& g) { return gg_sample(p, g); });
    EXPECT_GT(ks_p(x, [&](double v) { return gg_cdf(v, p); }), 0.01) << p.r << " " << p.gamma;
  }
}

TEST(GG, MeanFormula) {
  const GGParams p{0.847, 1.286, 0.5};
  const double ref = oracle::simpson([&](double u) { return std::exp(2 * u) * gg_pdf(std::exp(u), p); }, -60, 8, 1e-12);
  EXPECT_NEAR(gg_mean(p), ref, 1e-9);
}

TEST(Gamma, Sampler) {
  auto e = draw(100000, 1, [](Rng& g) { return gamma_sample(1.0, 1.0, g); });
  EXPECT_GT(ks_p(e, [](double v) { return -std::expm1(-v); }), 0.01);
  auto h = draw(100000, 2, [](Rng& g) { return gamma_sample(0.5, 1.0, g); });
  EXPECT_GT(ks_p(h, [](double v) { return oracle::gamma_p(0.5, v); }), 0.01);
  auto m = draw(100000, 3, [](Rng& g) { return gamma_sample(2.0, 3.0, g); });
  const auto ms = oracle::mean_se(m);
  EXPECT_NEAR(ms.mean, 2.0 / 3.0, 3.0 * std::sqrt(2.0) / 3.0 / std::sqrt(1e5));
  auto tiny = draw(100000, 4, [](Rng& g) { return gamma_sample(0.05, 2.0, g); });
  EXPECT_GT(ks_p(tiny, [](double v) { return oracle::gamma_p(0.05, 2.0 * v); }), 0.01);
}

TEST(Weibull, Sampler) {
  for (const double g : {1.0, 2.0, 0.4}) {
    auto w = draw(100000, 5, [&](Rng& r) { return weibull_sample(g, r); });
    EXPECT_GT(ks_p(w, [&](double v) { return -std::expm1(-std::pow(v, g)); }), 0.01);
    for (auto& v : w) v = std::pow(v, g);
    EXPECT_GT(ks_p(w, [](double v) { return -std::expm1(-v); }), 0.01);
  }
}

TEST(Stable, DegenerateAndDomain) {
  Rng rng(1);
  EXPECT_EQ(stable_sample(1.0, rng), 1.0);
  EXPECT_THROW(stable_sample(1.5, rng), DomainError);
  EXPECT_THROW(stable_sample(0.0, rng), DomainError);
}

TEST(Stable, WeibullIdentity) {
  for (const double g : {0.5, 0.3, 0.9}) {
    auto w = draw(100000, 6, [&](Rng& r) { return r.exponential() / stable_sample(g, r); });
    EXPECT_GT(ks_p(w, [&](double v) { return -std::expm1(-std::pow(v, g)); }), 0.01) << g;
  }
}

TEST(ZRatio, Properties) {
  Rng a(8), b(8);
  for (int i = 0; i < 10000; ++i) {
    const double z1 = z_ratio_sample(0.3, 1.0, a);
    const double z2 = z_ratio_sample(0.3, 2.0, b);
    ASSERT_GE(z1, 1.0);
    ASSERT_DOUBLE_EQ(z2, 2.0 * z1);
  }
  Rng rng(9);
  EXPECT_THROW(z_ratio_sample(1.0, 1.0, rng), DomainError);
  EXPECT_THROW(z_ratio_sample(0.5, 0.0, rng), DomainError);
  auto g = draw(100000, 10, [](Rng& r) { return r.exponential() / z_ratio_sample(0.5, 1.0, r); });
  EXPECT_GT(ks_p(g, [](double v) { return oracle::gamma_p(0.5, v); }), 0.01);
}

TEST(ZRatio, FourWayRepresentationChain) {
  const double r = 0.6, g = 0.7;
  const std::size_t n = 100000;
  std::vector<std::vector<double>> s;
  s.push_back(draw(n, 20, [&](Rng& q) { return std::pow(gamma_sample(r, 1, q), 1 / g); }));
  s.push_back(draw(n, 21, [&](Rng& q) {
    return q.exponential() / (stable_sample(g, q) * std::pow(z_ratio_sample(r, 1, q), 1 / g));
  }));
  s.push_back(draw(n, 22, [&](Rng& q) { return std::pow(q.exponential() / z_ratio_sample(r, 1, q), 1 / g); }));
  s.push_back(draw(n, 23, [&](Rng& q) {
    const double a = gamma_sample(r, 1, q), b = gamma_sample(1 - r, 1, q);
    return std::pow(q.exponential() * a / (a + b), 1 / g);
  }));
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const double d = oracle::ks_two_sample(s[i], s[j]);
      EXPECT_GT(oracle::ks_pvalue(d, n / 2.0), 0.01) << i << " vs " << j;
    }
  }
}

TEST(SnedecorFisher, Basics) {
  EXPECT_EQ(sf_cdf(0.0, 1.5, 2.5), 0.0);
  for (const double d : {0.3, 1.0, 4.0, 50.0}) {
    EXPECT_NEAR(sf_cdf(1.0, d, d), 0.5, 1e-12);
    EXPECT_NEAR(sf_quantile(0.5, d, d), 1.0, 1e-8);
  }
  EXPECT_THROW(sf_cdf(1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(sf_cdf(-1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(sf_quantile(1.0, 1.0, 1.0), DomainError);
}

TEST(SnedecorFisher, GammaRatioConvention) {
  // Q_{d1,d2} is the textbook F law with 2 d1 and 2 d2 degrees of freedom.
  for (const auto& [d1, d2] : std::vector<std::pair<double, double>>{{0.85, 305.15}, {1.0, 1.0}, {0.5, 0.5}, {3, 7}}) {
    const boost::math::fisher_f_distribution<double> f(2 * d1, 2 * d2);
    for (const double x : {0.05, 0.9, 3.0, 40.0}) {
      EXPECT_NEAR(sf_cdf(x, d1, d2), boost::math::cdf(f, x), 1e-9);
    }
  }
  // Q_{1,1} is a ratio of two exponentials: P(Q <= x) = x / (1 + x).
  EXPECT_NEAR(sf_quantile(0.99, 1.0, 1.0), 99.0, 1e-7);
  EXPECT_NEAR(sf_quantile(0.99, 0.5, 0.5), 4052.18, 0.01);
  EXPECT_NEAR(sf_cdf(4052.18, 0.5, 0.5), 0.99, 1e-4);
}

TEST(SnedecorFisher, MonteCarloOracle) {
  Rng rng(12);
  const std::size_t n = 1000000;
  std::size_t below = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = (gamma_sample(0.5, 1, rng) / 0.5) / (gamma_sample(0.5, 1, rng) / 0.5);
    below += q <= 4052.18;
  }
  const double p = static_cast<double>(below) / n;
  EXPECT_NEAR(p, sf_cdf(4052.18, 0.5, 0.5), 4.0 * std::sqrt(0.99 * 0.01 / n));
}

TEST(SnedecorFisher, QuantileRoundTrip) {
  for (const auto& [d1, d2] : std::vector<std::pair<double, double>>{{0.85, 305.15}, {0.2, 0.3}, {12, 2}}) {
    for (const double q : {0.01, 0.5, 0.9, 0.95, 0.99, 0.999999}) {
      EXPECT_NEAR(sf_cdf(sf_quantile(q, d1, d2), d1, d2), q, 1e-8) << d1 << " " << d2 << " " << q;
    }
  }
}

TEST(SnedecorFisher, Sampler) {
  auto x = draw(100000, 13, [](Rng& r) { return sf_sample(0.85, 3.4, r); });
  EXPECT_GT(ks_p(x, [](double v) { return sf_cdf(v, 0.85, 3.4); }), 0.01);
}

TEST(Poisson, MeanAndVariance) {
  for (const double mean : {0.0, 0.3, 5.0, 11.9, 12.0, 80.0, 1e6}) {
    Rng rng(14);
    std::vector<double> v(200000);
    for (auto& x : v) x = static_cast<double>(poisson_sample(mean, rng));
    const auto ms = oracle::mean_se(v);
    EXPECT_NEAR(ms.mean, mean, 4.0 * std::sqrt(mean / 2e5) + 1e-12) << mean;
    double var = 0.0;
    for (const double x : v) var += (x - ms.mean) * (x - ms.mean);
    var /= static_cast<double>(v.size() - 1);
    EXPECT_NEAR(var, mean, 0.03 * mean + 1e-12) << mean;
  }
}

TEST(Poisson, PmfAtSmallAndLargeMean) {
  for (const double mean : {3.0, 30.0}) {
    Rng rng(15);
    const std::size_t n = 500000;
    std::map<std::uint64_t, std::size_t> counts;
    for (std::size_t i = 0; i < n; ++i) ++counts[poisson_sample(mean, rng)];
    double tv = 0.0;
    for (std::uint64_t k = 0; k < 200; ++k) {
      const double pk = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
      tv += std::fabs(static_cast<double>(counts[k]) / n - pk);
    }
    EXPECT_LT(0.5 * tv, 0.01) << mean;
  }
}

TEST(GNB, Geometric) {
  const GGParams p{1, 1, 1};
  EXPECT_NEAR(gnb_pmf(0, p), 0.5, 1e-12);
  EXPECT_NEAR(gnb_pmf(2, p), 0.125, 1e-12);
  for (unsigned k = 0; k < 60; ++k) EXPECT_NEAR(gnb_pmf(k, p) / std::pow(0.5, k + 1.0), 1.0, 1e-10);
}

TEST(GNB, NegativeBinomialReduction) {
  for (const auto& [r, mu] : std::vector<std::pair<double, double>>{{0.847, 0.3}, {5.0, 2.0}, {0.1, 0.01}}) {
    for (unsigned k = 0; k <= 200; ++k) {
      const double ref = oracle::neg_binomial_pmf(k, r, mu);
      EXPECT_NEAR(gnb_pmf(k, {r, 1.0, mu}) / ref, 1.0, 1e-8) << k;
    }
  }
}

TEST(GNB, MonteCarloOracle) {
  const GGParams p{0.847, 1.279, 0.3};
  Rng rng(16);
  std::vector<double> v(2000000);
  for (auto& x : v) {
    const double z = gg_sample(p, rng);
    x = std::exp(-z + 3.0 * std::log(z) - std::lgamma(4.0));
  }
  const auto ms = oracle::mean_se(v);
  EXPECT_NEAR(gnb_pmf(3, p), ms.mean, 4.0 * ms.se);
}

TEST(GNB, NormalizationWithTruncation) {
  for (const GGParams& p : {GGParams{0.847, 1.279, 0.3}, GGParams{0.5, 0.5, 0.2}, GGParams{2.0, -1.2, 1.0},
                            GGParams{0.85, 1.2, 0.4}, GGParams{3.0, 2.5, 1e-3}}) {
    const auto k_max = gnb_truncation_point(p, 1e-10);
    double sum = 0.0, mean = 0.0;
    for (std::uint64_t k = 0; k <= k_max; ++k) {
      const double q = gnb_pmf(k, p);
      sum += q;
      mean += k * q;
    }
    EXPECT_NEAR(sum, 1.0, 1e-8) << p.r << " " << p.gamma << " " << p.mu;
    EXPECT_NEAR(mean, gg_mean(p), 1e-6 * std::max(1.0, gg_mean(p)));
  }
}

TEST(GNB, SamplerTotalVariation) {
  const GGParams p{0.85, 1.2, 0.4};
  Rng rng(17);
  const std::size_t n = 1000000;
  std::map<std::uint64_t, std::size_t> counts;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = gnb_sample(p, rng);
    ++counts[k];
    mean += k;
  }
  mean /= n;
  double tv = 0.0, model_mean = 0.0, model_m2 = 0.0;
  const auto k_max = std::max<std::uint64_t>(gnb_truncation_point(p), counts.rbegin()->first);
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    const double q = gnb_pmf(k, p);
    tv += std::fabs(static_cast<double>(counts.count(k) ? counts[k] : 0) / n - q);
    model_mean += k * q;
    model_m2 += double(k) * k * q;
  }
  EXPECT_LT(0.5 * tv, 0.01);
  const double sd = std::sqrt(model_m2 - model_mean * model_mean);
  EXPECT_NEAR(mean, model_mean, 3.0 * sd / std::sqrt(double(n)));
}

TEST(GNB, GeometricStream) {
  Rng rng(18);
  std::size_t zeros = 0;
  const std::size_t n = 200000;
  for (std::size_t i = 0; i < n; ++i) zeros += gnb_sample({1, 1, 1}, rng) == 0;
  EXPECT_NEAR(static_cast<double>(zeros) / n, 0.5, 4.0 * std::sqrt(0.25 / n));
}
