#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "hardedge/io.hpp"
#include "hardedge/potential.hpp"

using namespace hardedge;

TEST(Potential, GinibreEvaluators) {
  const auto p = make_power(1.0);
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    EXPECT_DOUBLE_EQ(p.q(r), r * r);
    EXPECT_DOUBLE_EQ(p.dq(r), 2.0 * r);
    EXPECT_DOUBLE_EQ(p.lap(r), 4.0);
  }
}

TEST(Potential, PowerEvaluators) {
  const auto p = make_power(2.5);
  for (double r : {0.2, 0.9, 1.7}) {
    EXPECT_NEAR(p.q(r), std::pow(r, 5.0), 1e-14 * std::pow(r, 5.0));
    EXPECT_NEAR(p.dq(r), 5.0 * std::pow(r, 4.0), 1e-13);
    // (r Q')' / r = 25 r^3
    EXPECT_NEAR(p.lap(r), 25.0 * std::pow(r, 3.0), 1e-12);
  }
}

TEST(Potential, EvenPolyReproducesPowerBitForBit) {
  for (int d : {1, 2, 3}) {
    std::vector<double> c(static_cast<std::size_t>(d) + 1, 0.0);
    c.back() = 1.0;
    const auto poly = make_evenpoly(c);
    const auto pow = make_power(d);
    for (double r = 0.01; r < 3.0; r += 0.037) {
      EXPECT_EQ(poly.q(r), pow.q(r)) << "d=" << d << " r=" << r;
      EXPECT_EQ(poly.dq(r), pow.dq(r)) << "d=" << d << " r=" << r;
      EXPECT_EQ(poly.lap(r), pow.lap(r)) << "d=" << d << " r=" << r;
    }
  }
}

TEST(Potential, Rejections) {
  EXPECT_THROW(make_power(0.5), InvalidArgument);
  EXPECT_THROW(make_power(std::nan("")), InvalidArgument);
  EXPECT_THROW(make_evenpoly({}), InvalidArgument);
  EXPECT_THROW(make_evenpoly({1.0}), InvalidArgument);
  EXPECT_THROW(make_evenpoly({0.0, 1.0, -0.5}), InvalidArgument);
  EXPECT_THROW(parse_potential("power"), InvalidArgument);
  EXPECT_THROW(parse_potential("power:x"), InvalidArgument);
  EXPECT_THROW(parse_potential("power:2abc"), InvalidArgument);
  EXPECT_THROW(parse_potential("cubic:1"), InvalidArgument);
  EXPECT_THROW(parse_potential("evenpoly:0,,1"), InvalidArgument);
}

TEST(Potential, DescriptorRoundTrip) {
  for (const std::string s : {"power:1", "power:2.5", "evenpoly:0,1,0.25", "evenpoly:-1,0,3"}) {
    const auto p = parse_potential(s);
    EXPECT_EQ(p.descriptor(), s);
    EXPECT_EQ(parse_potential(p.descriptor()).descriptor(), s);
  }
}

TEST(Potential, JsonRoundTrip) {
  const auto p = parse_potential("evenpoly:0,0,1");
  const auto j = io::potential_to_json(p);
  EXPECT_EQ(j.at("family"), "evenpoly");
  EXPECT_EQ(io::potential_from_json(j).descriptor(), p.descriptor());
  const auto q = io::potential_from_json(nlohmann::json::parse(R"({"family":"power","d":2.0})"));
  EXPECT_EQ(q.power_d(), 2.0);
  EXPECT_THROW(io::potential_from_json(nlohmann::json::parse(R"({"family":"power"})")), InvalidArgument);
  EXPECT_THROW(io::potential_from_json(nlohmann::json::parse(R"({"family":"cubic","d":1})")), InvalidArgument);
}

TEST(Droplet, Ginibre) {
  const auto drop = droplet(make_power(1.0));
  EXPECT_EQ(drop.r0, 0.0);
  EXPECT_NEAR(drop.R0, 1.0, 1e-15);
  EXPECT_NEAR(drop.delta, 1.0, 1e-15);
  EXPECT_NEAR(drop.C0, std::log(4.0), 1e-15);
}

TEST(Droplet, PowerRadiusAndDensity) {
  for (double d : {1.0, 1.5, 2.0, 3.0, 5.0}) {
    const auto p = make_power(d);
    const auto drop = droplet(p);
    EXPECT_NEAR(drop.R0, std::pow(1.0 / d, 1.0 / (2.0 * d)), 1e-10) << "d=" << d;
    EXPECT_NEAR(drop.delta, std::pow(d, (d + 1.0) / d), 1e-10) << "d=" << d;
    EXPECT_NEAR(drop.delta, p.lap(drop.R0) / 4.0, 1e-15) << "d=" << d;
    EXPECT_NEAR(drop.R0 * p.dq(drop.R0), 2.0, 1e-12) << "d=" << d;
  }
  EXPECT_NEAR(droplet(make_power(2.0)).R0, 0.8408964152537146, 1e-15);
}

TEST(Droplet, EvenPolyMatchesIndependentRoot) {
  // Q = r^2 + r^4/4: r Q' = 2 r^2 + r^4 = 2 gives r^2 = sqrt(3) - 1.
  const auto p = make_evenpoly({0.0, 1.0, 0.25});
  const auto drop = droplet(p);
  const double R0 = std::sqrt(std::sqrt(3.0) - 1.0);
  EXPECT_EQ(drop.r0, 0.0);
  EXPECT_NEAR(drop.R0, R0, 1e-14);
  // Laplacian 4 + 4 r^2.
  EXPECT_NEAR(drop.delta, 1.0 + R0 * R0, 1e-13);
  EXPECT_GT(p.dq(0.5 * drop.R0), 0.0);
}

TEST(EffectivePotential, Values) {
  const auto g = make_power(1.0);
  EXPECT_DOUBLE_EQ(effective_potential_vk(g, 1, 0, 1.0), 1.0);
  const auto p = make_power(2.0);
  EXPECT_NEAR(effective_potential_vk(p, 4, 1, 0.5), std::pow(0.5, 4.0) - 1.25 * std::log(0.5), 1e-15);
  const auto r = 0.7;
  EXPECT_NEAR(effective_potential_vk(g, 2, 1, r), r * r - 0.5 * std::log(r), 1e-15);
  EXPECT_THROW(effective_potential_vk(g, 0, 0, 1.0), InvalidArgument);
  EXPECT_THROW(effective_potential_vk(g, 1, 0, 0.0), InvalidArgument);
}

TEST(EffectivePotential, DerivativeMatchesFiniteDifference) {
  const auto p = make_evenpoly({0.0, 1.0, 0.25});
  for (long long k : {0LL, 3LL, 9LL})
    for (double r : {0.3, 0.6, 0.85}) {
      const double h = 1e-6;
      const double fd = (effective_potential_vk(p, 10, k, r + h) - effective_potential_vk(p, 10, k, r - h)) / (2 * h);
      EXPECT_NEAR(effective_potential_vk_deriv(p, 10, k, r), fd, 1e-7);
    }
}

TEST(Saddle, GinibreClosedForm) {
  const auto g = make_power(1.0);
  for (long long n : {1LL, 7LL, 100LL})
    for (long long k = 0; k < n; k += std::max(1LL, n / 10)) {
      const auto t = saddle_tk(g, n, k);
      ASSERT_TRUE(t.has_value());
      EXPECT_NEAR(*t, std::sqrt(1.0 - (2.0 * k + 1.0) / (2.0 * n)), 1e-12) << "n=" << n << " k=" << k;
    }
  // n odd, k = (n-1)/2: t Q'(t) = 1.
  EXPECT_NEAR(*saddle_tk(g, 9, 4), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Saddle, NoneWhenLevelNegative) {
  const auto g = make_power(1.0);
  // 2 - (2k+1)/n < 0 needs k > n - 1/2, outside [0, n-1]; probe it directly.
  EXPECT_FALSE(saddle_tk(g, 4, 4).has_value());
  EXPECT_TRUE(saddle_tk(g, 4, 3).has_value());
}

TEST(Saddle, MonotoneCriticalAndNearEdge) {
  const auto p = make_evenpoly({0.0, 1.0, 0.25});
  const auto drop = droplet(p);
  const long long n = 400;
  double prev = drop.R0;
  for (long long k = 0; k < n; ++k) {
    const double t = *saddle_tk(p, drop, n, k);
    EXPECT_LE(t, prev);
    prev = t;
    if (t > drop.r0 && t < drop.R0) EXPECT_NEAR(effective_potential_vk_deriv(p, n, k, t), 0.0, 1e-9);
  }
  // R0 - t_k ~ (2k+1) / (4 delta R0 n) near the edge.
  for (long long k : {0LL, 2LL, 5LL}) {
    const double gap = drop.R0 - *saddle_tk(p, drop, n, k);
    const double lead = (2.0 * k + 1.0) / (4.0 * drop.delta * drop.R0 * n);
    EXPECT_NEAR(gap / lead, 1.0, 0.05) << "k=" << k;
  }
}
