#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hardedge/gap_engine.hpp"
#include "hardedge/io.hpp"
#include "hardedge/parallel.hpp"
#include "hardedge/random.hpp"
#include "hardedge/sampler.hpp"
#include "oracles.hpp"

using namespace hardedge;

TEST(Random, SplitMixReferenceOutput) {
  // First outputs of SplitMix64 started from state 0.
  EXPECT_EQ(random::mix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(random::mix64(random::kGoldenGamma), 0x6E789E6AA1B965F4ULL);
}

TEST(Random, StreamsDependOnlyOnMasterAndIndex) {
  EXPECT_EQ(random::stream_seed(42, 7), random::stream_seed(42, 7));
  EXPECT_NE(random::stream_seed(42, 7), random::stream_seed(42, 8));
  EXPECT_NE(random::stream_seed(42, 7), random::stream_seed(43, 7));
  random::Stream a(random::stream_seed(1, 2)), b(random::stream_seed(1, 2));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
}

TEST(Random, UniformAndNormalMoments) {
  random::Stream s(99);
  const int m = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < m; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / m, 0.5, 5 * std::sqrt(1.0 / 12 / m));
  EXPECT_NEAR(sn / m, 0.0, 5 / std::sqrt(m));
  EXPECT_NEAR(sn2 / m, 1.0, 5 * std::sqrt(2.0 / m));
}

TEST(Ks, SinglePointAtMedian) {
  const std::vector<double> one{0.0};
  EXPECT_DOUBLE_EQ(ks_distance(one, [](double x) { return oracle::normal_cdf(x); }), 0.5);
}

TEST(Ks, AgainstOwnStepFunction) {
  const std::vector<double> pts{0.3, -1.2, 2.0, 0.7, 0.3, 5.5};
  std::vector<double> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(pts.size());
  const auto step = [&](double x) {
    return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) / m;
  };
  const auto step_left = [&](double x) {
    return static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) / m;
  };
  EXPECT_EQ(ks_statistic(pts, step, 0, step_left).d, 0.0);
}

TEST(Ks, InverseTransformSampleFromTheCdf) {
  random::Stream s(2024);
  std::vector<double> u(100000);
  for (auto& v : u) v = s.uniform();
  const auto ks = ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_LE(ks.d, 0.01);
  EXPECT_EQ(ks.d, std::max(ks.d_plus, ks.d_minus));
  EXPECT_THROW(ks_distance(std::vector<double>{}, [](double) { return 0.0; }), InvalidArgument);
}

TEST(Sampler, SingleGinibreModeMatchesClosedForm) {
  const auto spec = make_ensemble(make_power(1.0), 1);
  const auto table = build_mode_table(spec);
  const ModulusSampler sampler(spec, table);
  std::vector<double> r(100000);
  for (std::size_t i = 0; i < r.size(); ++i) {
    random::Stream s(random::stream_seed(5, i));
    r[i] = sampler.draw_mode(0, s);
  }
  EXPECT_LE(ks_distance(r, [](double x) { return oracle::ginibre_n1_cdf(std::clamp(x, 0.0, 1.0)); }), 0.006);
}

TEST(Sampler, DrawsStayInSupport) {
  for (const char* desc : {"power:1", "power:3", "evenpoly:0,1,0.25"}) {
    const auto spec = make_ensemble(parse_potential(desc), 200);
    const auto table = build_mode_table(spec);
    const ModulusSampler sampler(spec, table);
    for (std::uint64_t t = 0; t < 50; ++t) {
      random::Stream s(random::stream_seed(9, t));
      for (double r : sampler.sample_moduli(s)) {
        EXPECT_GE(r, spec.drop.r0) << desc;
        EXPECT_LE(r, spec.drop.R0) << desc;
      }
    }
  }
}

TEST(Sampler, OuterModeMeanDistanceToEdge) {
  const long long n = 256;
  const auto spec = make_ensemble(make_power(1.0), n);
  const auto table = build_mode_table(spec);
  const ModulusSampler sampler(spec, table);
  const std::size_t j = n - 1;
  // Exact moments of R0 - r under the density proportional to r^{2j+1} e^{-n r^2}.
  const auto w = [&](double r) { return std::exp((2.0 * j + 1.0) * std::log(r) - n * r * r + n); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double z = GK::integrate(w, 0.5, 1.0, 10, 1e-12);
  const double m1 = GK::integrate([&](double r) { return (1.0 - r) * w(r); }, 0.5, 1.0, 10, 1e-12) / z;
  const double m2 = GK::integrate([&](double r) { return (1.0 - r) * (1.0 - r) * w(r); }, 0.5, 1.0, 10, 1e-12) / z;
  const int draws = 100000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    random::Stream s(random::stream_seed(17, static_cast<std::uint64_t>(i)));
    sum += 1.0 - sampler.draw_mode(j, s);
  }
  const double se = std::sqrt((m2 - m1 * m1) / draws);
  EXPECT_NEAR(sum / draws, m1, 3.0 * se);
  EXPECT_LT(m1, 1.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Sampler, ModeMarginalChiSquare) {
  const long long n = 8;
  const std::size_t j = 7;
  const auto spec = make_ensemble(make_power(1.0), n);
  const auto table = build_mode_table(spec);
  const ModulusSampler sampler(spec, table);
  const int draws = 100000, bins = 20;
  std::vector<int> counts(bins, 0);
  for (int i = 0; i < draws; ++i) {
    random::Stream s(random::stream_seed(23, static_cast<std::uint64_t>(i)));
    const double u = oracle::ginibre_mode_cdf(n, static_cast<long long>(j), sampler.draw_mode(j, s));
    ++counts[std::min(bins - 1, static_cast<int>(u * bins))];
  }
  const double expected = static_cast<double>(draws) / bins;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, oracle::chi_squared_quantile(bins - 1, 0.999));
}

TEST(Sampler, TableFallbackMatchesExactMode) {
  // Force every mode through the inverse-CDF table.
  const long long n = 64;
  const auto spec = make_ensemble(make_power(2.0), n);
  const auto table = build_mode_table(spec);
  SamplerConfig cfg;
  cfg.force_table = true;
  const ModulusSampler sampler(spec, table, cfg);
  for (std::size_t j : {0UL, 31UL, 63UL}) {
    EXPECT_TRUE(sampler.proposal(j).use_table);
    std::vector<double> r(50000);
    for (std::size_t i = 0; i < r.size(); ++i) {
      random::Stream s(random::stream_seed(31, i));
      r[i] = sampler.draw_mode(j, s);
    }
    const auto cdf = [&](double x) { return 1.0 - oracle::power_overlap(n, 2.0, static_cast<long long>(j), x); };
    EXPECT_LE(ks_distance(r, cdf), 0.01) << "j=" << j;
  }
}

TEST(Sampler, AcceptanceRatesAreProbabilities) {
  const auto spec = make_ensemble(make_evenpoly({0.0, 1.0, 0.25}), 300);
  const auto table = build_mode_table(spec);
  const ModulusSampler sampler(spec, table);
  for (std::size_t j = 0; j < 300; ++j) {
    const auto& p = sampler.proposal(j);
    EXPECT_GT(p.acceptance, 0.0);
    EXPECT_LE(p.acceptance, 1.0);
    EXPECT_EQ(p.use_table, p.acceptance < 0.1);
  }
}

TEST(SampleStatistic, SingleTrialIsReproducible) {
  const auto spec = make_ensemble(make_power(1.0), 50);
  const auto table = build_mode_table(spec);
  for (std::uint64_t seed : {0ULL, 1ULL, 123456789ULL}) {
    const auto a = sample_statistic(spec, table, Statistic{1}, 1, seed);
    const auto b = sample_statistic(spec, table, Statistic{1}, 1, seed);
    ASSERT_EQ(a.omega.size(), 1U);
    EXPECT_EQ(a.omega, b.omega);
    EXPECT_EQ(a.raw, b.raw);
    EXPECT_LE(a.omega[0], 0.0);
  }
}

TEST(SampleStatistic, IdenticalAcrossThreadCounts) {
  const auto spec = make_ensemble(make_power(1.0), 64);
  const auto table = build_mode_table(spec);
  const ModulusSampler sampler(spec, table);
  const auto one = sample_statistic(sampler, Statistic{2}, 2000, 77, 1);
  for (unsigned threads : {2U, 4U, 8U}) {
    const auto many = sample_statistic(sampler, Statistic{2}, 2000, 77, threads);
    EXPECT_EQ(one.omega, many.omega) << threads;
  }
}

TEST(SampleStatistic, RejectsBadArguments) {
  const auto spec = make_ensemble(make_power(1.0), 4);
  const auto table = build_mode_table(spec);
  EXPECT_THROW(sample_statistic(spec, table, Statistic{1}, 0, 1), InvalidArgument);
  EXPECT_THROW(sample_statistic(spec, table, Statistic{5}, 10, 1), InvalidArgument);
}

TEST(SampleStatistic, ExactChainForPowerTwo) {
  const auto spec = make_ensemble(make_power(2.0), 256);
  const auto table = build_mode_table(spec);
  const auto sample = sample_statistic(spec, table, Statistic{1}, 20000, 4242);
  // 20000 draws: KS null scale 1.36 / sqrt(20000) ~ 0.0096.
  EXPECT_LE(ks_distance(sample, exact_omega_cdf(spec, table)), 0.015);
}

TEST(SampleStatistic, SecondLargestMatchesOrderCdf) {
  const auto spec = make_ensemble(make_power(1.0), 256);
  const auto table = build_mode_table(spec);
  const auto sample = sample_statistic(spec, table, Statistic{2}, 20000, 99);
  EXPECT_EQ(sample.statistic.name(), "order(2)");
  EXPECT_LE(ks_distance(sample, exact_omega_cdf(spec, table, 2)), 0.015);
}

TEST(SampleStatistic, CsvAndMetadata) {
  const auto spec = make_ensemble(make_power(1.0), 16);
  const auto table = build_mode_table(spec);
  const auto sample = sample_statistic(spec, table, Statistic{1}, 3, 5);
  std::ostringstream os;
  io::write_csv(os, sample);
  EXPECT_EQ(os.str().rfind("trial,omega\n0,", 0), 0U);
  const auto meta = io::sample_metadata(sample);
  EXPECT_EQ(meta.at("potential"), "power:1");
  EXPECT_EQ(meta.at("n"), 16);
  EXPECT_EQ(meta.at("trials"), 3);
  EXPECT_EQ(meta.at("master_seed"), 5);
  EXPECT_EQ(meta.at("statistic"), "max");
}
