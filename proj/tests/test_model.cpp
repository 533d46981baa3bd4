#include "shiftest/model.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace shiftest;

namespace {

const Model<double> &burgers() {
  static const Model<double> m = burgers_model(4.0);
  return m;
}

} // namespace

TEST(RhSpeed, BurgersValues) {
  const auto &law = burgers().law;
  EXPECT_DOUBLE_EQ(rh_speed(law, 2.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(rh_speed(law, 3.0, 3.0), 3.0);
  EXPECT_DOUBLE_EQ(rh_speed(law, 0.5, -0.5), 0.0);
}

TEST(RhSpeed, GenericBranchMatchesBurgers) {
  const auto m = polynomial_model({0.0, 0.0, 0.5, 0.0}, {0.0, 0.0, 0.5}, 3.0);
  EXPECT_FALSE(m.law.is_burgers);
  EXPECT_NEAR(rh_speed(m.law, 2.0, 0.0), 1.0, 1e-14);
  EXPECT_NEAR(rh_speed(m.law, 1.5, 1.5), 1.5, 1e-14);
}

TEST(RhSpeed, MonotoneInFirstArgument) {
  const auto &law = burgers().law;
  for (double w = -3; w <= 3; w += 0.5)
    for (double v = -3; v < 3; v += 0.25)
      EXPECT_LT(rh_speed(law, v, w), rh_speed(law, v + 0.25, w));
}

TEST(RelativeEntropy, Values) {
  const auto &e = burgers().entropy;
  EXPECT_DOUBLE_EQ(relative_entropy(e, 3.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(relative_entropy(e, 1.0, 1.0), 0.0);
}

TEST(RelativeEntropy, SandwichedByConstants) {
  const auto &m = burgers();
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(-m.law.band, m.law.band);
  for (int k = 0; k < 10000; ++k) {
    const double a = u(gen), b = u(gen), d2 = (a - b) * (a - b);
    const double r = relative_entropy(m.entropy, a, b);
    const double tol = 1e-13 * (1 + a * a + b * b);
    EXPECT_LE(m.k.cstar * d2, r + tol);
    EXPECT_GE(m.k.cstarstar * d2, r - tol);
  }
}

TEST(RelativeFlux, Values) {
  const auto &law = burgers().law;
  EXPECT_DOUBLE_EQ(relative_flux(law, 2.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(relative_flux(law, 1.0, 1.0), 0.0);
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int k = 0; k < 10000; ++k)
    EXPECT_GE(relative_flux(law, u(gen), u(gen)), 0.0);
}

TEST(RelativeEntropyFlux, Values) {
  const auto &m = burgers();
  EXPECT_DOUBLE_EQ(relative_entropy_flux(m.law, m.entropy, 2.0, 2.0), 0.0);
  EXPECT_NEAR(relative_entropy_flux(m.law, m.entropy, 1.0, 0.0), 1.0 / 3.0, 1e-15);
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(-m.law.band, m.law.band);
  for (int k = 0; k < 10000; ++k) {
    const double a = u(gen), b = u(gen);
    EXPECT_LE(std::abs(relative_entropy_flux(m.law, m.entropy, a, b)),
              m.k.info_speed * relative_entropy(m.entropy, a, b) + 1e-12);
  }
}

TEST(ModelConstants, BurgersClosedForms) {
  const auto &k = burgers().k;
  EXPECT_DOUBLE_EQ(k.amin, 1.0);
  EXPECT_DOUBLE_EQ(k.amax, 1.0);
  EXPECT_DOUBLE_EQ(k.hmin, 1.0);
  EXPECT_DOUBLE_EQ(k.hmax, 1.0);
  EXPECT_NEAR(k.cstar, 0.5, 1e-12);
  EXPECT_NEAR(k.cstarstar, 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(k.diss_c, 1.0 / 24.0);
  EXPECT_DOUBLE_EQ(k.sup_dA, 4.0);
  // |q(a;b)|/eta(a|b) = |a + 2b|/3 for Burgers; its sup on [-B,B] is B.
  EXPECT_NEAR(k.info_speed, 1.05 * 4.0, 2e-2);
  EXPECT_NEAR(gronwall_constant(k, 0.0), 3.0, 1e-10);
}

TEST(ModelConstants, EntropyCompatibility) {
  const auto m = polynomial_model({0.0, 0.3, 0.5, 0.1}, {1.0, 0.0, 0.7, 0.0, 0.05}, 1.5);
  for (double u = -1.5; u <= 1.5; u += 0.01)
    EXPECT_NEAR(m.entropy.q.derivative()(u), m.entropy.deta(u) * m.law.dA(u), 1e-12);
}

TEST(ModelConstants, RejectsNonConvex) {
  EXPECT_THROW(polynomial_model({0.0, 0.0, 0.0, 1.0}, {0.0, 0.0, 0.5}, 1.0),
               std::invalid_argument);
  EXPECT_THROW(model_by_name("euler", 1.0), std::invalid_argument);
}

TEST(Dissipation, BoundValues) {
  const auto &k = burgers().k;
  EXPECT_DOUBLE_EQ(dissipation_bound(k, 0.0, 1.0, 0.0, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(dissipation_bound(k, 1.0, 3.0, 0.0, 2.0, 1.0), -1.0 / 6.0);
  EXPECT_THROW(dissipation_bound(k, 0.0, 1.0, 0.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(dissipation_bound(k, 1.0, 0.0, 0.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(dissipation_bound(k, 0.0, 1.0, 0.0, 0.5, 1.0), std::invalid_argument);
}

TEST(Dissipation, ExhaustiveGrid) {
  const auto &m = burgers();
  const int n = 20;
  const double B = 3.0;
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = -B + 2 * B * i / (n - 1);
  int checked = 0;
  for (double up : g)
    for (double um : g) {
      if (um < up)
        continue;
      for (double bp : g)
        for (double bm : g) {
          const double floor = bm - bp;
          if (!(floor > 0))
            continue;
          const double lhs = dissipation_lhs(m.law, m.entropy, up, um, bp, bm);
          const double rhs = dissipation_bound(m.k, up, um, bp, bm, floor);
          EXPECT_LE(lhs, rhs + 1e-12) << up << " " << um << " " << bp << " " << bm;
          ++checked;
        }
    }
  EXPECT_GT(checked, 10000);
}

TEST(Polynomial, AlgebraRoundTrip) {
  const Polynomial<double> p{1.0, -2.0, 3.0};
  EXPECT_DOUBLE_EQ(p(2.0), 9.0);
  EXPECT_DOUBLE_EQ(p.derivative()(2.0), 10.0);
  EXPECT_DOUBLE_EQ(p.antiderivative().derivative()(1.7), p(1.7));
  EXPECT_DOUBLE_EQ((p * p)(0.5), p(0.5) * p(0.5));
}
