#include "shiftest/estimator.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace shiftest {

double zeta_product(const std::vector<double> &beta, const std::vector<double> &dt,
                    std::size_t from) {
  if (beta.size() != dt.size())
    throw std::invalid_argument("zeta_product: beta and dt differ in length");
  double s = 0;
  for (std::size_t k = from; k < beta.size(); ++k)
    s += beta[k] * dt[k];
  return std::exp(s);
}

double min_speed_difference(const ScalarLaw<double> &law, double rho, double B,
                            std::size_t n) {
  if (!(rho > 0) || !(B > 0) || n < 2)
    throw std::invalid_argument("min_speed_difference: need rho, B > 0");
  double best = std::numeric_limits<double>::infinity();
  const double hstep = 2 * B / double(n - 1);
  for (std::size_t a = 0; a < n; ++a) {
    const double w = -B + hstep * double(a);
    for (std::size_t c = 0; c < n; ++c) {
      const double u = -B + hstep * double(c);
      if (!(w - u > rho))
        continue;
      for (std::size_t b = c; b <= a; ++b) {
        const double v = -B + hstep * double(b);
        best = std::min(best, rh_speed(law, w, v) - rh_speed(law, v, u));
      }
    }
  }
  return best;
}

double rd_pair_speed_gap(const ScalarLaw<double> &law, double rho, double B) {
  if (law.is_burgers)
    return 0.5 * rho;
  return min_speed_difference(law, rho, B);
}

double upsilon(const UpsilonInputs &in) {
  if (in.t <= 0)
    return 0;
  const double bracket = 2 * in.H * in.delta * (in.s0 * in.s0 + in.s0_boundary_sq) +
                         in.E_nnd + in.R_nnd;
  double first = 0;
  if (bracket > 0) {
    if (!(in.s_floor > 0))
      return std::numeric_limits<double>::infinity();
    first = std::sqrt(in.t) / std::sqrt(in.s_floor) * std::sqrt(bracket) *
            std::exp(in.C * in.t);
  }
  return first + in.t * in.s_bar * in.A;
}

double gamma_bound(const GammaInputs &in) {
  const double spread = in.width / in.delta * in.M_hat * in.max_upsilon;
  const double head = in.osc + spread;
  const double energy = in.C * (in.E0 + in.R) * std::exp(in.C * in.t);
  return std::sqrt(head) * std::sqrt(in.t) * std::sqrt(energy) +
         2 * spread * in.max_upsilon +
         head * 2 * in.A * in.M_hat * in.t * in.max_upsilon;
}

double delta_inner(double gamma, double eps, double slope) {
  const double s = std::isnan(slope) ? 0.5 * eps : std::max(0.5 * eps, slope);
  return std::sqrt(2.0) * std::sqrt(gamma) / std::sqrt(s);
}

FixpointResult shock_size_fixpoint(double x, double r0,
                                   const std::function<double(double, double)> &gap,
                                   const std::function<double(double)> &radius,
                                   int max_iter, double rel_tol) {
  FixpointResult out;
  double r = r0;
  out.s = gap(x - r, x + r);
  for (out.iterations = 1; out.iterations < max_iter; ++out.iterations) {
    if (!(out.s > 0))
      break;
    r = radius(out.s);
    if (!std::isfinite(r))
      break;
    const double s = gap(x - r, x + r);
    if (s < out.s)
      break; // every iterate is a valid floor, keep the largest
    const double rel = (s - out.s) / out.s;
    out.s = s;
    if (rel < rel_tol)
      break;
  }
  return out;
}

std::vector<double> eoc(const std::vector<double> &values,
                        const std::vector<double> &widths) {
  if (values.size() != widths.size() || values.size() < 2)
    throw std::invalid_argument("eoc: need matching lists of length >= 2");
  std::vector<double> out(values.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k - 1] > 0) || !(values[k] > 0) || !(widths[k - 1] > 0) ||
        !(widths[k] > 0) || widths[k] == widths[k - 1])
      continue;
    out[k] = std::log(values[k - 1] / values[k]) / std::log(widths[k - 1] / widths[k]);
  }
  return out;
}

} // namespace shiftest
