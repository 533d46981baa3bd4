#pragma once

#include "shiftest/model.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace shiftest {

/// F_{k+1} = F_k e^{beta dt} + alpha dt e^{beta dt}.
struct GronwallAccumulator {
  double value = 0;

  void step(double alpha, double beta, double dt) {
    const double g = std::exp(beta * dt);
    value = value * g + alpha * dt * g;
  }
  /// Value after a tentative step, without committing it.
  double peek(double alpha, double beta, double dt) const {
    const double g = std::exp(beta * dt);
    return value * g + alpha * dt * g;
  }
};

/// exp(sum beta_k dt_k) over steps [from, beta.size()).
double zeta_product(const std::vector<double> &beta, const std::vector<double> &dt,
                    std::size_t from);

/// inf sigma(w,v) - sigma(v,u) over |w|,|v|,|u| <= B, w - u > rho, u <= v <= w,
/// by grid search with n points per axis.
double min_speed_difference(const ScalarLaw<double> &law, double rho, double B,
                            std::size_t n = 400);
/// Closed form rho / 2 for Burgers, grid search otherwise.
double rd_pair_speed_gap(const ScalarLaw<double> &law, double rho, double B);

/// m (t - t_tch) > d_left + d_right + y_left + y_right.
inline bool rd_pair_certified(double m, double t, double t_tch, double d_left,
                              double d_right, double y_left, double y_right) {
  return m * (t - t_tch) > d_left + d_right + y_left + y_right;
}

/// Velocity-error budget of one shock in a front-tracking region.
struct UpsilonInputs {
  double t = 0;
  double s_floor = 0;  // min over [0,t] of the jump floor of this shock
  double s0 = 0;       // its initial jump
  double s0_boundary_sq = 0; // sum of squared initial jumps of boundary shocks with continuous data
  double delta = 0;
  double H = 1;        // sup eta''
  double E_nnd = 0;    // initial relative entropy on nearly non-decreasing pieces
  double R_nnd = 0;    // residual integral of the nearly non-decreasing pieces
  double C = 0;        // Gronwall constant
  double s_bar = 0;    // max inter-piece gap over front-tracking shocks
  double A = 1;        // Lipschitz bound of the Rankine-Hugoniot speed
};
double upsilon(const UpsilonInputs &in);

struct GammaInputs {
  double t = 0;
  double osc = 0;      // max - min of the front-tracking data
  double width = 0;    // region width at t = 0
  double delta = 0;
  double M_hat = 0;
  double max_upsilon = 0;
  double C = 0;
  double E0 = 0;       // initial relative entropy
  double R = 0;        // residual integral
  double A = 1;
};
double gamma_bound(const GammaInputs &in);

/// sqrt(2 Gamma / max(eps/2, S)); S may be NaN (fewer than two fronts).
double delta_inner(double gamma, double eps, double slope);

/// Delta_inner + (A M_hat T + 1) max Upsilon + (A T + 1) sqrt(Gamma).
inline double ft_worst_case(double d_inner, double A, double M_hat, double T,
                            double max_upsilon, double gamma) {
  return d_inner + (A * M_hat * T + 1) * max_upsilon + (A * T + 1) * std::sqrt(gamma);
}

/// sqrt(C e^{Ct} (init + R)); the L2 bound root and the C-factor of Delta.
inline double l2_bound(double C, double t, double init_sq, double R) {
  return std::sqrt(C * std::exp(C * t) * (init_sq + R));
}

/// Fix-point for the jump floor s on an interval around a curve.
/// gap(lo, hi) returns the infimum of the flank difference on [lo, hi];
/// radius(s) returns the uncertainty radius implied by floor s.
struct FixpointResult {
  double s = 0;
  int iterations = 0;
};
FixpointResult shock_size_fixpoint(double x, double r0,
                                   const std::function<double(double, double)> &gap,
                                   const std::function<double(double)> &radius,
                                   int max_iter = 10, double rel_tol = 1e-3);

/// Experimental order of convergence; NaN where a value is not positive.
std::vector<double> eoc(const std::vector<double> &values,
                        const std::vector<double> &widths);

} // namespace shiftest
