#pragma once

#include "shiftest/model.hpp"
#include "shiftest/preprocess.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace shiftest {

/// Uniform cells on [x_lo, x_hi].
struct Grid {
  double x_lo = 0, x_hi = 1, h = 1, dt = 1, cfl = 0.45;
  std::size_t n = 1;

  double center(std::size_t j) const { return x_lo + (double(j) + 0.5) * h; }

  /// Cells of width h aligned to multiples of h, covering [a, b].
  static Grid covering(double a, double b, double h, double sup_dA,
                       double cfl = 0.45);
};

/// Cone of information [-S + s t, S - s t].
struct ConeWindow {
  double S = 1, s = 0;
  std::pair<double, double> at(double t) const { return {-S + s * t, S - s * t}; }
};

/// Engquist-Osher flux.
template <typename T> T eo_flux(const ScalarLaw<T> &law, T l, T r) {
  if (law.is_burgers) {
    const T lp = l > T(0) ? l : T(0), rm = r < T(0) ? r : T(0);
    return T(0.5) * (lp * lp + rm * rm);
  }
  if (!std::isfinite(law.sonic))
    return law.sonic < 0 ? law.A(l) : law.A(r); // A' of one sign on the band
  const T us = law.sonic;
  return law.A(l > us ? l : us) + law.A(r < us ? r : us) - law.A(us);
}

/// Squared residual of the bilinear patch with corners a=(0,0), b=(1,0),
/// c=(0,1), d=(1,1) at the 2x2 Gauss points (xi fastest).
template <typename T>
std::array<T, 4> slab_residual_sq(const ScalarLaw<T> &law, T a, T b, T c, T d,
                                  T h, T dt) {
  static const T g0 = T(0.5) - T(0.5) / std::sqrt(T(3));
  static const T g1 = T(0.5) + T(0.5) / std::sqrt(T(3));
  const T gp[2] = {g0, g1};
  std::array<T, 4> out{};
  for (int it = 0; it < 2; ++it) {
    const T tau = gp[it];
    for (int ix = 0; ix < 2; ++ix) {
      const T xi = gp[ix];
      const T v = (T(1) - tau) * ((T(1) - xi) * a + xi * b) +
                  tau * ((T(1) - xi) * c + xi * d);
      const T vt = ((T(1) - xi) * (c - a) + xi * (d - b)) / dt;
      const T vx = ((T(1) - tau) * (b - a) + tau * (d - c)) / h;
      const T dA = law.is_burgers ? v : law.dA(v);
      const T r = vt + dA * vx;
      out[2 * it + ix] = r * r;
    }
  }
  return out;
}

/// One extended piece under the first-order scheme. Keeps the previous and the
/// current level; the reconstruction is bilinear between them.
class PieceSolution {
public:
  PieceSolution(const ScalarLaw<double> &law, const Grid &grid,
                const PLFunction &init);
  /// Starts from given cell averages.
  PieceSolution(const ScalarLaw<double> &law, const Grid &grid,
                VecX<double> averages);

  /// Advances by dt <= grid.dt.
  void step(double dt);

  double t() const { return t_; }
  double t_prev() const { return t_prev_; }
  std::size_t level() const { return level_; }
  const Grid &grid() const { return grid_; }
  const VecX<double> &current() const { return cur_; }
  const VecX<double> &previous() const { return prev_; }

  /// Space interpolant of the current level.
  double value(double x) const { return interp(cur_, x); }
  /// theta in [0,1] between the previous and current level.
  double value(double x, double theta) const;
  double slope(double x, double theta) const;

  /// Residual squared at (x, t_prev + tau (t - t_prev)) of the last step.
  double residual_sq_at(double x, double tau) const;
  /// Gauss-point squared residuals of slab [center(j), center(j+1)], last step.
  std::array<double, 4> slab_residual(std::size_t j) const;

  /// Cells [lo, hi) that may differ from their neighbours.
  std::size_t active_lo() const { return lo_; }
  std::size_t active_hi() const { return hi_; }
  bool slab_constant(std::size_t j) const;
  /// Cells that changed during the last step.
  std::size_t dirty_lo() const { return dirty_lo_; }
  std::size_t dirty_hi() const { return dirty_hi_; }

  double lip() const { return lip_; }
  /// max of the negative part of the slope, current level.
  double neg_slope() const { return neg_; }
  double min_slope() const { return min_slope_; }
  double init_min() const { return init_min_; }
  double init_max() const { return init_max_; }

private:
  double interp(const VecX<double> &u, double x) const;
  void update_stats();
  void find_active(std::size_t from, std::size_t to);

  ScalarLaw<double> law_;
  Grid grid_;
  VecX<double> prev_, cur_, flux_;
  double t_ = 0, t_prev_ = 0;
  std::size_t level_ = 0;
  std::size_t lo_ = 0, hi_ = 0;
  std::size_t dirty_lo_ = 0, dirty_hi_ = 0; // cells touched by the last step
  double lip_ = 0, neg_ = 0, min_slope_ = 0;
  double init_min_ = 0, init_max_ = 0;
};

/// Exact cell averages of a piecewise-linear function.
VecX<double> cell_averages(const PLFunction &f, const Grid &grid);

struct EvolveResult {
  double residual_sq = 0; // space-time integral of R^2 over the cone
  double t = 0;
};

/// Evolves sol to time T, integrating R^2 over the cone (or the whole grid
/// when cone.S <= 0).
EvolveResult evolve(PieceSolution &sol, double T, const ConeWindow &cone);

/// Lipschitz bound of a smooth solution; +inf if the data steepens into a
/// shock before t (flag set).
double lipschitz_bound(double sup0, double inf0, double t, double amin,
                       bool *blowup = nullptr);

/// Lower bound on the gap between two ordered smooth solutions.
double gap_bound(double rho, double lip_min, double t, double amax);

/// Cube root of 8 (lip sum) C e^{CT} (init + resid).
double linf_bound(double lip_sum, double C, double T, double init_l2_sq,
                  double resid_sq);

struct LevelSetCheck {
  bool pass = false;
  double error = 0;  // level-set position error bound
  double margin = 0; // gap - error
};

LevelSetCheck level_set_check(double linf, double min_slope, double gap);

} // namespace shiftest
