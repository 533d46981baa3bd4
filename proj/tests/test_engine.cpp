#include "fixtures.hpp"
#include "shiftest/engine.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace shiftest;

namespace {

RunConfig large_shocks(std::size_t cells) {
  RunConfig c;
  c.segments = fixtures::exp1_segments();
  c.T = 0.3;
  c.cells = cells;
  return c;
}

RunConfig rapid_piece(std::size_t cells) {
  RunConfig c;
  c.segments = fixtures::exp2_segments();
  c.T = 0.22;
  c.cells = cells;
  return c;
}

RunConfig smooth(std::size_t cells) {
  RunConfig c;
  c.segments = {{-kInf, -2, -2, 0}, {-2, 2, 0, 1}, {2, kInf, 2, 0}};
  c.T = 0.3;
  c.cells = cells;
  return c;
}

} // namespace

TEST(Engine, LargeShocksCertifiedAt800) {
  const RunReport r = run_rung(large_shocks(800));
  EXPECT_EQ(r.merges.size(), 2u);
  ASSERT_EQ(r.certificates.size(), 2u);
  for (const auto &c : r.certificates) {
    EXPECT_EQ(c.kind, "large");
    EXPECT_TRUE(std::isfinite(c.t_fire));
    EXPECT_LT(c.t_fire, 0.3);
    EXPECT_GE(c.t_fire, c.t_merge);
  }
  EXPECT_TRUE(r.certified);
  EXPECT_TRUE(r.finite);
  // all three jumps end in one glued curve near 0.87
  EXPECT_EQ(r.final_state.curve_x.size(), 1u);
  EXPECT_NEAR(r.final_state.curve_x[0], 0.869, 5e-3);
  EXPECT_TRUE(r.audit.ordering_ok && r.audit.downjump_ok && r.audit.gap_ok);
  EXPECT_GT(r.audit.audits, 10u);
}

TEST(Engine, FrontTrackingRegionReported) {
  const RunReport r = run_rung(rapid_piece(400));
  ASSERT_EQ(r.regions.size(), 1u);
  const auto &g = r.regions[0];
  EXPECT_GT(g.max_upsilon, 0);
  EXPECT_GT(g.gamma, 0);
  EXPECT_GT(g.delta_inner, 0);
  EXPECT_NEAR(g.M_hat, 1.0, 1e-9);
  EXPECT_TRUE(r.finite);
  EXPECT_TRUE(std::isfinite(r.l1));
  EXPECT_TRUE(r.audit.ordering_ok && r.audit.downjump_ok && r.audit.gap_ok);
}

TEST(Engine, ZeroedSourcesGiveExactZeros) {
  for (RunConfig c : {large_shocks(400), rapid_piece(400)}) {
    c.zero_sources = true;
    const RunReport r = run_rung(c);
    EXPECT_EQ(r.R, 0.0);
    EXPECT_EQ(r.l2, 0.0);
    EXPECT_EQ(r.l1, 0.0);
    EXPECT_EQ(r.max_delta, 0.0);
    for (const auto &row : r.rows)
      for (double d : row.delta)
        EXPECT_EQ(d, 0.0);
    for (const auto &g : r.regions) {
      EXPECT_EQ(g.max_upsilon, 0.0);
      EXPECT_EQ(g.gamma, 0.0);
      EXPECT_EQ(g.delta_inner, 0.0);
    }
  }
}

TEST(Engine, SmoothDataReducesToResidualBound) {
  const RunReport r = run_rung(smooth(400));
  EXPECT_TRUE(r.curves.empty());
  EXPECT_EQ(r.b_integral, 0.0);
  EXPECT_EQ(r.E_L2, 0.0);
  EXPECT_NEAR(r.l2, std::sqrt(r.C * std::exp(r.C * 0.3) * r.R), 1e-14);
  EXPECT_NEAR(r.l1, std::sqrt(1.0) * r.l2_coarse, 1e-14);
}

TEST(Engine, ResidualScalesWithMesh) {
  const RunReport a = run_rung(smooth(200)), b = run_rung(smooth(400));
  EXPECT_NEAR(std::log2(std::sqrt(a.R / b.R)), 1.0, 0.1);
}

TEST(Engine, BoundNotBelowFineReference) {
  for (const RunConfig &c : {large_shocks(400), rapid_piece(400)}) {
    const RunReport r = run_rung(c);
    const PieceSolution fine = fine_reference(c, 8);
    const double d = l1_against(r.final_state, fine, c.x_lo, c.x_hi);
    EXPECT_GT(d, 0);
    EXPECT_GE(r.l1, d);
  }
}

TEST(Engine, FineReferenceOfConstantDataMatches) {
  RunConfig c;
  c.segments = {{-kInf, kInf, 1.5, 0}};
  c.T = 0.1;
  c.cells = 100;
  const RunReport r = run_rung(c);
  EXPECT_NEAR(l1_against(r.final_state, fine_reference(c, 4), 0, 1), 0.0, 1e-12);
}

TEST(Engine, RowsAtOutputTimesAndDeterministic) {
  RunConfig c = large_shocks(400);
  c.output_times = {0.1, 0.2};
  int snaps = 0;
  RunHooks hooks;
  hooks.on_output = [&](const GluedSnapshot &) { ++snaps; };
  const RunReport a = run_rung(c, hooks), b = run_rung(c);
  ASSERT_EQ(a.rows.size(), 3u);
  EXPECT_DOUBLE_EQ(a.rows[0].t, 0.1);
  EXPECT_DOUBLE_EQ(a.rows[1].t, 0.2);
  EXPECT_DOUBLE_EQ(a.rows[2].t, 0.3);
  EXPECT_EQ(snaps, 3);
  EXPECT_EQ(a.l1, b.l1);
  EXPECT_EQ(a.l2, b.l2);
  EXPECT_EQ(a.max_delta, b.max_delta);
}

TEST(Engine, RejectsBadConfig) {
  RunConfig c = large_shocks(1);
  EXPECT_THROW(run_rung(c), std::invalid_argument);
  c = large_shocks(100);
  c.T = 0;
  EXPECT_THROW(run_rung(c), std::invalid_argument);
}
