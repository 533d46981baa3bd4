#pragma once

#include "shiftest/model.hpp"
#include "shiftest/preprocess.hpp"

#include <functional>
#include <ostream>
#include <vector>

namespace shiftest {

/// Evaluates piece `piece` at x, at fraction theta of the current step.
using PieceEval = std::function<double(std::size_t piece, double x, double theta)>;

struct MergeEvent {
  double t = 0;
  std::size_t left = 0, right = 0; // original curve ids meeting (rightmost of
                                   // the left group, leftmost of the right)
};

/// Merged curves form contiguous id ranges [first, last]; the glued curve has
/// flanks first (left piece) and last + 1 (right piece).
struct CurveGroup {
  std::size_t first = 0, last = 0;
  double x = 0, speed = 0;
  // Hermite data of the last step on [theta0, 1]
  double theta0 = 0, x0 = 0, s0 = 0;
  double defect = 0; // |h' - sigma| at the segment midpoint

  std::size_t left_piece() const { return first; }
  std::size_t right_piece() const { return last + 1; }
  double hermite(double theta, double dt) const;
  double hermite_speed(double theta, double dt) const;
};

class CurveSystem {
public:
  CurveSystem(const ScalarLaw<double> &law, const std::vector<double> &x0);

  /// Speeds at t = 0.
  void init(const PieceEval &v);
  /// RK4 over one step of length dt starting at t0; returns merges in time order.
  std::vector<MergeEvent> advance(double t0, double dt, const PieceEval &v);

  std::size_t size() const { return group_of_.size(); }
  const std::vector<CurveGroup> &groups() const { return groups_; }
  const CurveGroup &group(std::size_t curve) const { return groups_[group_of_[curve]]; }
  std::size_t group_index(std::size_t curve) const { return group_of_[curve]; }
  double position(std::size_t curve) const { return group(curve).x; }
  /// Position of a curve at fraction theta of the last step.
  double position(std::size_t curve, double theta) const;
  double step_length() const { return dt_; }

  /// Index of the piece shown by the glued solution at x (right trace on a curve).
  std::size_t piece_at(double x) const;
  std::size_t piece_at(double x, double theta) const;

private:
  double rk4(std::size_t L, std::size_t R, double x, double th0, double dt,
             const PieceEval &v, double *end_speed) const;
  void rebuild_index();

  ScalarLaw<double> law_;
  std::vector<CurveGroup> groups_;
  std::vector<std::size_t> group_of_;
  double dt_ = 0;
};

/// Scalar front tracking for a decreasing staircase; fronts move at the exact
/// Rankine-Hugoniot speed plus an optional fixed speed error per front.
class FrontTrack {
public:
  FrontTrack(const ScalarLaw<double> &law, std::vector<double> values,
             std::vector<double> fronts, std::vector<double> speed_error = {});

  void advance_to(double t);

  double t() const { return t_; }
  std::size_t fronts() const { return x_.size(); }
  const std::vector<double> &values() const { return u_; }
  const std::vector<double> &positions() const { return x_; }
  const std::vector<double> &speed_errors() const { return err_; }
  std::size_t events() const { return events_; }
  double speed(std::size_t k) const;
  double operator()(double x) const;

  /// inf over first front < x < y < last front with y > x + delta of
  /// (u(x) - u(y)) / (y - x); NaN when fewer than two fronts remain.
  double discrete_slope(double delta) const;

  /// Variant built from fronts p..q of this (initial) state, constant outside.
  FrontTrack clipped(std::size_t p, std::size_t q) const;

private:
  ScalarLaw<double> law_;
  std::vector<double> u_, x_, err_;
  double t_ = 0;
  std::size_t events_ = 0;
};

/// L1 distance of two piecewise-constant staircases (exact).
double l1_distance(const FrontTrack &a, const FrontTrack &b);

/// CSV trajectory writer: t, h_1..h_N, then one group id per curve.
void write_trajectory_header(std::ostream &os, std::size_t n);
void write_trajectory_row(std::ostream &os, double t, const CurveSystem &cs);

} // namespace shiftest
