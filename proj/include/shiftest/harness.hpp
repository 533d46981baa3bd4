#pragma once

#include "shiftest/engine.hpp"
#include "shiftest/estimator.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace shiftest {

/// Malformed or inconsistent experiment file.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A rung stopped on a failed solver or estimator check.
class RungAbort : public std::runtime_error {
public:
  RungAbort(std::size_t cells, const std::string &what)
      : std::runtime_error("rung " + std::to_string(cells) + " cells: " + what),
        cells(cells) {}
  std::size_t cells;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string model = "burgers";
  std::vector<Segment> segments;
  double eps = 0.5;
  double delta = 0; // <= 0: sqrt(h) on every rung
  double T = 0.3;
  double x_lo = 0, x_hi = 1;
  double cfl = 0.45;
  std::vector<std::size_t> ladder{400, 800, 1600, 3200};
  std::vector<double> output_times;
  std::size_t fine_mult = 8;
  bool strict_c = false;
  bool zero_sources = false;
  std::string text; // source, hashed into the manifest
};

/// key = value lines, '#' starts a comment. Keys: name, model, eps,
/// delta (number or sqrt), T, domain (lo hi), cfl, ladder (cell counts),
/// output_times, fine_mult, strict_c, zero_sources, and one
/// `piece = a b c0 c1` per affine segment c0 + c1 x on (a, b); a, b may be -inf/inf.
ExperimentConfig parse_config(std::istream &in);
ExperimentConfig load_config(const std::string &path);

RunConfig rung_config(const ExperimentConfig &cfg, std::size_t cells);

struct RungResult {
  RunReport report;
  double fine_l1 = std::numeric_limits<double>::quiet_NaN(); // NaN when not computed
};

struct ExperimentOptions {
  bool with_fine = false;
  std::function<void(const RungResult &)> on_rung;                    // after each rung
  std::function<void(std::size_t, const GluedSnapshot &)> on_output; // cells, snapshot
};

/// Rungs in ladder order. Solver and estimator failures become RungAbort;
/// rungs finished before the abort have already gone through on_rung.
std::vector<RungResult> run_experiment(const ExperimentConfig &cfg,
                                       const ExperimentOptions &opt = {});

/// ||u_hat - u_fine||_L1 on the cone at T.
double fine_reference_compare(const RunConfig &rc, const RunReport &rep, std::size_t mult);

struct EocColumn {
  std::string name;
  std::vector<double> values, eoc; // eoc NaN on the first rung
};

struct EocTable {
  std::vector<std::size_t> cells;
  std::vector<double> h;
  std::vector<EocColumn> columns;

  const EocColumn &column(const std::string &name) const;
};

/// Per-rung scalar summary as stored in report.json.
struct RungSummary {
  std::size_t cells = 0;
  double h = 0, delta = 0;
  double max_delta = 0, l2 = 0, l2_coarse = 0, l1 = 0, fine_l1 = 0;
  double R = 0, ambiguity = 0;
  double upsilon = 0, gamma = 0, delta_inner = 0; // max over regions, NaN without
  bool certified = true, finite = true;
  double wall = 0;
};
RungSummary summarize(const RungResult &r);

/// Large-shock layout: max Delta, L2, L1, fine L1.
EocTable bounds_table(const std::vector<RungSummary> &rungs);
/// Front-tracking layout: Upsilon, Gamma, Delta_inner, L2, L1.
EocTable region_table(const std::vector<RungSummary> &rungs);
/// Residual and certified ambiguity.
EocTable residual_table(const std::vector<RungSummary> &rungs);

/// cells, then value and EoC per column, 6 significant digits.
void write_csv(const EocTable &t, const std::string &path);

/// report.json with full precision; manifest.json with config hash and status.
void write_report(const ExperimentConfig &cfg, const std::vector<RungSummary> &rungs,
                  const std::string &path);
std::vector<RungSummary> read_report(const std::string &path);
void write_manifest(const ExperimentConfig &cfg, const std::vector<RungSummary> &rungs,
                    const std::string &status, const std::string &error,
                    const std::string &path);

/// x, u_hat(x) at `samples` points on [lo, hi].
void write_snapshot(const GluedSnapshot &s, double lo, double hi, std::size_t samples,
                    const std::string &path);
/// t, curve, delta from the report rows.
void write_curves(const RunReport &rep, const std::string &path);

/// FNV-1a of the config text, 16 hex digits.
std::string config_hash(const std::string &text);

} // namespace shiftest
