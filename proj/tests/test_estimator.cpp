#include "shiftest/estimator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace shiftest;

TEST(Gronwall, MatchesDirectDoubleSum) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const double dt = 1e-2;
    std::vector<double> a(100), b(100);
    for (int k = 0; k < 100; ++k) {
      a[k] = U(rng);
      b[k] = 3 * U(rng);
    }
    GronwallAccumulator acc;
    for (int i = 0; i < 100; ++i) {
      acc.step(a[i], b[i], dt);
      // F_i = sum_j alpha_j dt exp(sum_{k=j}^{i} beta_k dt)
      double direct = 0;
      for (int j = 0; j <= i; ++j) {
        double e = 0;
        for (int k = j; k <= i; ++k)
          e += b[k] * dt;
        direct += a[j] * dt * std::exp(e);
      }
      ASSERT_NEAR(acc.value, direct, 1e-12 * (1 + direct));
    }
  }
}

TEST(Gronwall, LimitsAndHalfSteps) {
  GronwallAccumulator g;
  g.value = 2;
  g.step(0, 1.5, 0.2);
  EXPECT_DOUBLE_EQ(g.value, 2 * std::exp(0.3));
  GronwallAccumulator s;
  for (int k = 0; k < 10; ++k)
    s.step(0.5, 0, 0.1);
  EXPECT_NEAR(s.value, 0.5, 1e-15);
  // zero source: two half steps equal one full step
  GronwallAccumulator one, two;
  one.value = two.value = 0.7;
  one.step(0, 2.0, 0.1);
  two.step(0, 2.0, 0.05);
  two.step(0, 2.0, 0.05);
  EXPECT_NEAR(one.value, two.value, 1e-12);
  EXPECT_DOUBLE_EQ(g.peek(0, 0, 1), g.value);
}

TEST(Zeta, ConstantRateAndDirectProduct) {
  std::vector<double> beta(50, 0.0), dt(50, 0.01);
  EXPECT_DOUBLE_EQ(zeta_product(beta, dt, 0), 1.0);
  std::fill(beta.begin(), beta.end(), 2.0);
  EXPECT_NEAR(zeta_product(beta, dt, 10), std::exp(2.0 * 0.4), 1e-14);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0, 2);
  double prod = 1;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    beta[k] = U(rng);
    if (k >= 5)
      prod *= std::exp(beta[k] * dt[k]);
  }
  EXPECT_NEAR(zeta_product(beta, dt, 5), prod, 1e-14 * prod);
}

TEST(RdPair, BurgersClosedFormAgainstGridSearch) {
  const auto law = burgers_model(3.0).law;
  const double rho = 1 - 1e-7; // grid spacing 0.01 hits w - u = 1
  EXPECT_DOUBLE_EQ(rd_pair_speed_gap(law, rho, 2.0), 0.5 * rho);
  EXPECT_NEAR(min_speed_difference(law, rho, 2.0, 401), 0.5 * rho, 1e-6);
}

TEST(RdPair, LatencyFromDirectEvaluation) {
  // rho = 1, all four terms 0.01: fires once 0.5 (t - t_tch) > 0.04
  const double m = 0.5, t0 = 0.1;
  EXPECT_FALSE(rd_pair_certified(m, t0 + 0.0799, t0, 0.01, 0.01, 0.01, 0.01));
  EXPECT_TRUE(rd_pair_certified(m, t0 + 0.0801, t0, 0.01, 0.01, 0.01, 0.01));
  EXPECT_TRUE(rd_pair_certified(m, t0 + 1e-12, t0, 0, 0, 0, 0));
}

TEST(FrontTrackBounds, ZeroSourcesGiveZero) {
  UpsilonInputs u;
  u.t = 0.2;
  u.s_floor = 0.1;
  u.delta = 0.05;
  u.C = 3;
  EXPECT_EQ(upsilon(u), 0.0);
  GammaInputs g;
  g.t = 0.2;
  g.width = 0.2;
  g.delta = 0.05;
  g.M_hat = 5;
  g.C = 3;
  EXPECT_EQ(gamma_bound(g), 0.0);
  EXPECT_EQ(delta_inner(0.0, 0.5, 1.0), 0.0);
  EXPECT_EQ(ft_worst_case(0, 1, 5, 0.2, 0, 0), 0.0);
}

TEST(FrontTrackBounds, ScalingAndFallback) {
  UpsilonInputs u;
  u.t = 0.2;
  u.s_floor = 0.1;
  u.R_nnd = 1e-4;
  const double y1 = upsilon(u);
  u.R_nnd = 4e-4;
  EXPECT_NEAR(upsilon(u), 2 * y1, 1e-15);
  u.s_bar = 0.1;
  EXPECT_NEAR(upsilon(u), 2 * y1 + 0.2 * 0.1, 1e-15);
  // the slope floor eps/2 applies for a missing or small slope
  EXPECT_DOUBLE_EQ(delta_inner(0.5, 0.5, std::nan("")), std::sqrt(2.0 * 0.5 / 0.25));
  EXPECT_DOUBLE_EQ(delta_inner(0.5, 0.5, 0.1), delta_inner(0.5, 0.5, 0.25));
  EXPECT_LT(delta_inner(0.5, 0.5, 4.0), delta_inner(0.5, 0.5, 1.0));
  // worst case grows with each input
  EXPECT_LT(ft_worst_case(0.1, 1, 5, 0.2, 0.01, 0.04),
            ft_worst_case(0.1, 1, 5, 0.2, 0.02, 0.04));
  EXPECT_LT(ft_worst_case(0.1, 1, 5, 0.2, 0.01, 0.04),
            ft_worst_case(0.1, 1, 5, 0.2, 0.01, 0.09));
}

TEST(Fixpoint, ConstantFlanksConvergeAtOnce) {
  int calls = 0;
  auto gap = [&](double, double) {
    ++calls;
    return 0.75;
  };
  auto radius = [](double s) { return 0.01 / s; };
  const auto r = shock_size_fixpoint(0.3, 0.5, gap, radius);
  EXPECT_DOUBLE_EQ(r.s, 0.75);
  EXPECT_EQ(r.iterations, 1);
}

TEST(Fixpoint, IteratesAreNondecreasing) {
  // flank difference grows away from the shrinking interval
  auto gap = [](double lo, double hi) { return 1.0 - 0.5 * (hi - lo); };
  auto radius = [](double s) { return 0.05 / s; };
  const auto r = shock_size_fixpoint(0.0, 0.8, gap, radius);
  EXPECT_GE(r.s, 1.0 - 0.8);
  EXPECT_GT(r.iterations, 1);
  EXPECT_NEAR(r.s, 1.0 - 0.05 / r.s, 1e-3);
}

TEST(Eoc, KnownSequences) {
  auto e = eoc({0.2, 0.1}, {1.0, 0.5});
  EXPECT_TRUE(std::isnan(e[0]));
  EXPECT_NEAR(e[1], 1.0, 1e-12);
  std::vector<double> h{0.1, 0.05, 0.025}, v;
  for (double x : h)
    v.push_back(3 * std::pow(x, 1.7));
  e = eoc(v, h);
  EXPECT_NEAR(e[1], 1.7, 1e-12);
  EXPECT_NEAR(e[2], 1.7, 1e-12);
  e = eoc({0.099, 0.073, 0.050, 0.036}, {1.0, 0.5, 0.25, 0.125});
  EXPECT_NEAR(e[1], 0.44, 0.005);
  EXPECT_NEAR(e[2], 0.55, 0.005);
  EXPECT_NEAR(e[3], 0.47, 0.005);
  e = eoc({0.1, 0.0}, {1.0, 0.5});
  EXPECT_TRUE(std::isnan(e[1]));
}
