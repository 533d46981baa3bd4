#include "fixtures.hpp"
#include "shiftest/solver.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace shiftest;

namespace {

const Model<double> &burgers() {
  static const Model<double> m = burgers_model(4.0);
  return m;
}

PLFunction line(double x0, double y0, double x1, double y1) {
  return PLFunction{{x0, x1}, {y0, y1}};
}

VecX<double> gauss_averages(double (*f)(double), const Grid &g) {
  static const double z[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double w[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
  VecX<double> u(Eigen::Index(g.n));
  for (std::size_t j = 0; j < g.n; ++j) {
    double s = 0;
    for (int q = 0; q < 3; ++q)
      s += w[q] * f(g.center(j) + 0.5 * g.h * z[q]);
    u(Eigen::Index(j)) = 0.5 * s;
  }
  return u;
}

double smooth_data(double x) { return 1.0 + 0.5 * std::tanh(4.0 * x); }

double run_residual(const PLFunction *pl, double (*f)(double), int cells, double T) {
  const auto &m = burgers();
  const Grid g = Grid::covering(-3, 3, 1.0 / cells, 2.0);
  PieceSolution sol = pl ? PieceSolution(m.law, g, *pl)
                         : PieceSolution(m.law, g, gauss_averages(f, g));
  return evolve(sol, T, ConeWindow{1.0, 2.0}).residual_sq;
}

} // namespace

TEST(EoFlux, BurgersValues) {
  const auto &law = burgers().law;
  EXPECT_DOUBLE_EQ(eo_flux(law, 1.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(eo_flux(law, -1.0, 1.0), 0.0); // transonic rarefaction
  EXPECT_DOUBLE_EQ(eo_flux(law, 1.0, -1.0), 1.0);  // A(1) + A(-1) - A(0)
  for (double u : {-2.0, -0.3, 0.0, 0.7, 3.0})
    EXPECT_DOUBLE_EQ(eo_flux(law, u, u), 0.5 * u * u);
}

TEST(EoFlux, GeneralPathMatchesClosedForm) {
  const auto m = polynomial_model({0.0, 0.0, 0.5, 0.0}, {0.0, 0.0, 0.5}, 4.0);
  ASSERT_FALSE(m.law.is_burgers);
  const auto &b = burgers().law;
  for (double l = -3; l <= 3; l += 0.25)
    for (double r = -3; r <= 3; r += 0.25)
      EXPECT_NEAR(eo_flux(m.law, l, r), eo_flux(b, l, r), 1e-12);
}

TEST(EoFlux, MonotoneInEachArgument) {
  const auto m = polynomial_model({0.0, 0.3, 0.5, 0.05}, {0.0, 0.0, 0.5}, 3.0);
  for (double l = -3; l < 2.9; l += 0.1)
    for (double r = -3; r < 2.9; r += 0.1) {
      EXPECT_LE(eo_flux(m.law, l, r), eo_flux(m.law, l + 0.1, r) + 1e-12);
      EXPECT_GE(eo_flux(m.law, l, r), eo_flux(m.law, l, r + 0.1) - 1e-12);
    }
}

TEST(Grid, AlignedCoveringAndCfl) {
  const Grid g = Grid::covering(-0.33, 1.01, 0.1, 2.0);
  EXPECT_NEAR(g.x_lo, -0.4, 1e-15);
  EXPECT_NEAR(g.x_hi, 1.1, 1e-15);
  EXPECT_EQ(g.n, 15u);
  EXPECT_DOUBLE_EQ(g.dt, 0.45 * 0.1 / 2.0);
  EXPECT_THROW(Grid::covering(0, 1, 0.1, 1.0, 1.5), std::invalid_argument);
  PieceSolution s(burgers().law, g, line(0, 0, 1, 1));
  EXPECT_THROW(s.step(2 * g.dt), std::invalid_argument);
}

TEST(CellAverages, ExactForPiecewiseLinear) {
  const PLFunction f{{0.05, 0.32, 0.33, 0.9}, {1.0, 2.0, -1.0, 0.5}};
  const Grid g = Grid::covering(-0.2, 1.2, 0.1, 1.0);
  const VecX<double> u = cell_averages(f, g);
  for (std::size_t j = 0; j < g.n; ++j) {
    const double a = g.x_lo + double(j) * g.h;
    double s = 0;
    const int K = 20000;
    for (int k = 0; k < K; ++k)
      s += f(a + (k + 0.5) * g.h / K);
    EXPECT_NEAR(u(Eigen::Index(j)), s / K, 1e-8);
  }
}

TEST(PieceSolution, ConstantStaysConstantWithZeroResidual) {
  const Grid g = Grid::covering(-1, 1, 0.01, 2.0);
  PieceSolution s(burgers().law, g, line(0, 1.5, 1, 1.5));
  const auto r = evolve(s, 0.3, ConeWindow{0.0, 0.0});
  EXPECT_EQ(r.residual_sq, 0.0);
  for (Eigen::Index j = 0; j < s.current().size(); ++j)
    EXPECT_EQ(s.current()(j), 1.5);
  EXPECT_EQ(s.lip(), 0.0);
}

TEST(PieceSolution, LinearDataFollowsSimilaritySolution) {
  double prev = 0;
  for (int cells : {100, 200, 400}) {
    const Grid g = Grid::covering(-6, 6, 1.0 / cells, 3.0);
    PieceSolution s(burgers().law, g, line(-3, -3, 3, 3));
    evolve(s, 0.5, ConeWindow{0.0, 0.0});
    double err = 0;
    for (double x = -1; x <= 1; x += 0.01)
      err = std::max(err, std::abs(s.value(x) - x / 1.5));
    if (prev > 0)
      EXPECT_NEAR(prev / err, 2.0, 0.3);
    prev = err;
  }
}

TEST(PieceSolution, MonotoneAndMaximumPrinciple) {
  const Grid g = Grid::covering(-2, 2, 1.0 / 200, 3.0);
  const PLFunction f{{-1, -0.2, 0.1, 0.6}, {-1, 0.5, 0.6, 2.5}};
  PieceSolution s(burgers().law, g, f);
  EXPECT_NEAR(s.init_min(), -1.0, 1e-14);
  EXPECT_NEAR(s.init_max(), 2.5, 1e-14);
  while (s.t() < 0.4) {
    s.step(g.dt);
    const auto &u = s.current();
    for (Eigen::Index j = 0; j + 1 < u.size(); ++j)
      ASSERT_LE(u(j), u(j + 1) + 1e-14);
    ASSERT_GE(u.minCoeff(), s.init_min());
    ASSERT_LE(u.maxCoeff(), s.init_max());
    ASSERT_GE(s.min_slope(), -1e-10);
    ASSERT_LE(s.neg_slope(), 1e-10);
  }
}

TEST(PieceSolution, ConservesMassAwayFromBoundaries) {
  const Grid g = Grid::covering(-3, 3, 1.0 / 100, 3.0);
  const PLFunction f{{-0.5, 0.0, 0.5}, {0.0, 1.0, 0.0}};
  PieceSolution s(burgers().law, g, f);
  const double m0 = s.current().sum() * g.h;
  for (int k = 0; k < 100; ++k) {
    s.step(g.dt);
    ASSERT_NEAR(s.current().sum() * g.h, m0, 1e-12);
  }
}

TEST(Reconstruct, NodesAndTimeMidpoint) {
  const Grid g = Grid::covering(-1, 1, 0.05, 3.0);
  PieceSolution s(burgers().law, g, PLFunction{{-0.4, 0.4}, {0.0, 2.0}});
  s.step(g.dt);
  for (std::size_t j = 1; j + 1 < g.n; ++j) {
    EXPECT_DOUBLE_EQ(s.value(g.center(j), 1.0), s.current()(Eigen::Index(j)));
    EXPECT_DOUBLE_EQ(s.value(g.center(j), 0.0), s.previous()(Eigen::Index(j)));
  }
  for (double x = -0.9; x < 0.9; x += 0.037)
    EXPECT_NEAR(s.value(x, 0.5), 0.5 * (s.value(x, 0.0) + s.value(x, 1.0)), 1e-15);
}

TEST(Reconstruct, ExtensionsStayOrdered) {
  const auto prof = discretize(classify(fixtures::exp1_segments(), 0.5), 0.05);
  const auto ext = build_extensions(prof, slope_m(classify(fixtures::exp1_segments(), 0.5)));
  const double B = extension_value_bound(ext);
  const Grid g = Grid::covering(-4, 5, 1.0 / 200, B);
  std::vector<PieceSolution> sols;
  for (const auto &e : ext.ext)
    sols.emplace_back(burgers().law, g, e.v);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> X(-1.0, 2.0), Th(0.0, 1.0);
  int checked = 0;
  while (sols[0].t() < 0.3) {
    for (auto &s : sols)
      s.step(g.dt);
    for (int k = 0; k < 10; ++k) {
      const double x = X(rng), th = Th(rng);
      for (std::size_t i = 0; i + 1 < sols.size(); ++i)
        ASSERT_GT(sols[i].value(x, th), sols[i + 1].value(x, th));
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(Residual, SmoothDataIsFirstOrder) {
  std::vector<double> r;
  for (int cells : {100, 200, 400})
    r.push_back(std::sqrt(run_residual(nullptr, smooth_data, cells, 0.3)));
  for (std::size_t k = 1; k < r.size(); ++k)
    EXPECT_NEAR(std::log2(r[k - 1] / r[k]), 1.0, 0.2);
}

TEST(Residual, KinkGivesThreeHalves) {
  const PLFunction f{{-0.5, 0.0, 0.5}, {0.0, 0.25, 1.5}};
  std::vector<double> r;
  for (int cells : {200, 400, 800})
    r.push_back(run_residual(&f, nullptr, cells, 0.3));
  for (std::size_t k = 1; k < r.size(); ++k)
    EXPECT_NEAR(std::log2(r[k - 1] / r[k]), 1.5, 0.3);
}

TEST(AnalyticBounds, LipschitzDecay) {
  EXPECT_DOUBLE_EQ(lipschitz_bound(2.0, 0.0, 1.0, 1.0), 2.0 / 3.0);
  EXPECT_EQ(lipschitz_bound(0.0, 0.0, 5.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(lipschitz_bound(2.0, -3.0, 0.0, 1.0), 3.0);
  bool blow = false;
  EXPECT_TRUE(std::isinf(lipschitz_bound(1.0, -2.0, 1.0, 1.0, &blow)));
  EXPECT_TRUE(blow);
}

TEST(AnalyticBounds, GapBound) {
  EXPECT_EQ(gap_bound(0.7, 0.0, 3.0, 1.0), 0.7);
  EXPECT_DOUBLE_EQ(gap_bound(1.0, 1.0, 1.0, 1.0), 0.5);
  double prev = 2.0;
  for (double t = 0; t < 2; t += 0.1) {
    const double g = gap_bound(1.0, 2.0, t, 1.0);
    EXPECT_LE(g, prev);
    prev = g;
  }
}

TEST(AnalyticBounds, LinfHomogeneity) {
  EXPECT_EQ(linf_bound(3.0, 2.0, 0.3, 0.0, 0.0), 0.0);
  const double a = linf_bound(3.0, 2.0, 0.3, 0.0, 1e-6);
  const double b = linf_bound(3.0, 2.0, 0.3, 0.0, 2e-6);
  EXPECT_NEAR(b / a, std::cbrt(2.0), 1e-12);
}

TEST(AnalyticBounds, LinfBoundsRampError) {
  // clamp(M x, -B, B) has exact solution clamp(M x / (1 + M t), -B, B)
  const double M = 2, B = 2, T = 0.3, S = 1.5;
  const auto &m = burgers();
  const double C = gronwall_constant(m.k, 0.0);
  for (int cells : {200, 400, 800}) {
    const Grid g = Grid::covering(-6, 6, 1.0 / cells, B);
    const PLFunction f = line(-B / M, -B, B / M, B);
    PieceSolution s(m.law, g, f);
    double init = 0;
    for (std::size_t j = 0; j < g.n; ++j)
      for (int k = 0; k < 8; ++k) {
        const double x = g.x_lo + (double(j) + (k + 0.5) / 8) * g.h;
        const double d = s.value(x, 1.0) - f(x);
        init += d * d * g.h / 8;
      }
    const auto res = evolve(s, T, ConeWindow{S + 1.05 * B * T, 1.05 * B});
    double err = 0;
    for (double x = -S; x <= S; x += 0.5 / cells)
      err = std::max(err, std::abs(s.value(x) - std::clamp(M * x / (1 + M * T), -B, B)));
    const double bound = linf_bound(M / (1 + M * T) + s.lip(), C, T, init, res.residual_sq);
    EXPECT_GE(bound, err) << cells;
  }
}

TEST(LevelSet, CheckOutcomes) {
  const auto ok = level_set_check(0.0, 2.0, 0.1);
  EXPECT_TRUE(ok.pass);
  EXPECT_DOUBLE_EQ(ok.margin, 0.1);
  EXPECT_FALSE(level_set_check(1e-3, 2.0, 0.0).pass);
  EXPECT_FALSE(level_set_check(1e-3, 0.0, 1.0).pass);
}
