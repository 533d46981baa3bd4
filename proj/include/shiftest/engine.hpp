#pragma once

#include "shiftest/model.hpp"
#include "shiftest/preprocess.hpp"
#include "shiftest/shocks.hpp"
#include "shiftest/solver.hpp"

#include <functional>
#include <string>
#include <vector>

namespace shiftest {

/// One mesh rung of an experiment.
struct RunConfig {
  std::string model = "burgers";
  std::vector<Segment> segments;
  double eps = 0.5;
  double delta = 0;          // <= 0: sqrt(h)
  double x_lo = 0, x_hi = 1; // cone at the final time
  double T = 0.3;
  double cfl = 0.45;
  std::size_t cells = 400;   // cells on [x_lo, x_hi]
  std::vector<double> output_times;
  bool strict_c = false;     // divide the C-factor of Delta by the dissipation constant
  bool zero_sources = false; // drop residual, initial error, defects and pair ambiguity
  std::size_t audit_every = 16;
};

struct PieceInfo {
  bool step = false;
  std::size_t sol = 0; // index into GluedPieces::sols for NND pieces
  StepSurrogate sur;
};

/// Evolved NND pieces plus the reference line solution shared by all steps.
struct GluedPieces {
  std::vector<PieceSolution> sols;
  std::vector<PieceSolution> ref; // empty without RD regions
  std::vector<PieceInfo> info;

  double value(std::size_t piece, double x, double theta = 1.0) const;
  double lip(std::size_t piece) const;
};

/// Frozen glued solution at one time level.
struct GluedSnapshot {
  double t = 0;
  GluedPieces pieces;
  std::vector<double> curve_x;         // one per glued curve
  std::vector<std::size_t> left_piece; // piece left of each glued curve
  std::size_t last_piece = 0;

  double operator()(double x) const;
  /// Sorted points in [lo, hi] between which the snapshot is (nearly) affine.
  std::vector<double> breakpoints(double lo, double hi) const;
};

struct ReportRow {
  double t = 0;
  double R = 0, R_nnd = 0;
  double l2 = 0;        // root of the L2 bound with the fine staircase start
  double l2_coarse = 0; // root with the coarse initial error
  double l1 = 0;        // total L1 bound
  double b_integral = 0;
  double ft_term = 0;
  double max_delta = 0;
  std::vector<double> delta; // effective Delta per curve
};

struct CertificateRecord {
  std::string kind; // "large", "nnd-boundary" or "rd-pair"
  std::size_t left = 0, right = 0;
  double t_merge = 0;
  double t_fire = std::numeric_limits<double>::quiet_NaN(); // NaN while pending
};

struct RegionReport {
  int region = 0;
  std::size_t first_piece = 0, last_piece = 0;
  double max_upsilon = 0, gamma = 0, delta_inner = 0;
  double slope = 0; // discrete slope, NaN below two fronts
  double s_bar = 0, M_hat = 0, width = 0, osc = 0, worst = 0;
};

struct CurveReport {
  std::size_t id = 0;
  ShockClass initial = ShockClass::Large, final_class = ShockClass::Large;
  double x0 = 0, x = 0, delta = 0, delta_sup = 0, s_min = kInf;
};

struct AuditReport {
  bool ordering_ok = true, downjump_ok = true, gap_ok = true;
  double min_gap_margin = kInf; // measured gap minus gap_bound, relative
  double min_ordering = kInf;
  std::size_t audits = 0;
};

struct RunReport {
  std::size_t cells = 0, grid_cells = 0, steps = 0;
  double h = 0, delta = 0, dt = 0, S = 0, info_speed = 0, band = 0, M = 0;
  double C = 0;
  double E_L2 = 0, E_L2_nnd = 0, E_eta = 0, E_eta_nnd = 0, E_fine = 0;

  // values at the final time
  double R = 0, R_nnd = 0, l2 = 0, l2_coarse = 0, l1 = 0, b_integral = 0;
  double max_delta = 0; // sup over time of the largest Large/Boundary Delta
  double l1_sup = 0;

  std::vector<ReportRow> rows;
  std::vector<RegionReport> regions;
  std::vector<CurveReport> curves;
  std::vector<MergeEvent> merges;
  std::vector<CertificateRecord> certificates;
  double ambiguity_time = 0; // summed over large / nnd-boundary certificates
  bool certified = true;     // every Large merge certified before T
  bool finite = true;
  AuditReport audit;
  double wall_seconds = 0;
  GluedSnapshot final_state;
};

struct RunHooks {
  std::function<void(const GluedSnapshot &)> on_output;
};

/// Runs the whole pipeline on one rung.
RunReport run_rung(const RunConfig &cfg, const RunHooks &hooks = {});

/// Initial L2 and relative-entropy errors of the glued data against the exact data.
struct InitialErrors {
  double l2 = 0, l2_nnd = 0, eta = 0, eta_nnd = 0;
};
InitialErrors initial_errors(const SegmentedProfile &exact, const DiscreteProfile &dp,
                             const EntropyPair<double> &e);

/// Plain first-order solution of the original data at `mult` times the cells.
PieceSolution fine_reference(const RunConfig &cfg, std::size_t mult);

/// L1 distance on [lo, hi] by common-refinement quadrature.
double l1_against(const GluedSnapshot &s, const PieceSolution &fine, double lo,
                  double hi);

} // namespace shiftest
