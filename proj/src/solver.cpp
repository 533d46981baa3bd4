#include "shiftest/solver.hpp"

#include <algorithm>
#include <limits>

namespace shiftest {

Grid Grid::covering(double a, double b, double h, double sup_dA, double cfl) {
  if (!(h > 0) || !(b > a))
    throw std::invalid_argument("Grid: need h > 0 and b > a");
  if (!(cfl > 0 && cfl <= 1))
    throw std::invalid_argument("Grid: CFL number must lie in (0, 1]");
  Grid g;
  const double lo = std::floor(a / h), hi = std::ceil(b / h);
  g.h = h;
  g.cfl = cfl;
  g.n = static_cast<std::size_t>(hi - lo);
  g.x_lo = lo * h;
  g.x_hi = hi * h;
  g.dt = sup_dA > 0 ? cfl * h / sup_dA : cfl * h;
  return g;
}

VecX<double> cell_averages(const PLFunction &f, const Grid &grid) {
  VecX<double> u(static_cast<Eigen::Index>(grid.n));
  std::size_t k = 0; // first node strictly right of the current left edge
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double xa = grid.x_lo + double(j) * grid.h, xb = xa + grid.h;
    while (k < f.x.size() && f.x[k] <= xa)
      ++k;
    if (k == f.x.size() || f.x[k] >= xb) {
      // linear on the cell: midpoint is exact
      u(Eigen::Index(j)) = f(0.5 * (xa + xb));
      continue;
    }
    double sum = 0, left = xa, fl = f(xa);
    for (std::size_t m = k; m < f.x.size() && f.x[m] < xb; ++m) {
      const double fr = f.y[m];
      sum += 0.5 * (fl + fr) * (f.x[m] - left);
      left = f.x[m];
      fl = fr;
    }
    sum += 0.5 * (fl + f(xb)) * (xb - left);
    u(Eigen::Index(j)) = sum / grid.h;
  }
  return u;
}

PieceSolution::PieceSolution(const ScalarLaw<double> &law, const Grid &grid,
                             const PLFunction &init)
    : PieceSolution(law, grid, cell_averages(init, grid)) {}

PieceSolution::PieceSolution(const ScalarLaw<double> &law, const Grid &grid,
                             VecX<double> averages)
    : law_(law), grid_(grid) {
  if (grid_.n < 2 || averages.size() != Eigen::Index(grid_.n))
    throw std::invalid_argument("PieceSolution: need n >= 2 matching averages");
  cur_ = std::move(averages);
  prev_ = cur_;
  flux_.resize(cur_.size() + 1);
  init_min_ = cur_.minCoeff();
  init_max_ = cur_.maxCoeff();
  if (!std::isfinite(init_min_) || !std::isfinite(init_max_))
    throw std::runtime_error("PieceSolution: non-finite initial data");
  find_active(0, grid_.n);
  dirty_lo_ = dirty_hi_ = 0;
  update_stats();
}

void PieceSolution::find_active(std::size_t from, std::size_t to) {
  // cells outside [lo, hi) are copies of their inner neighbour
  const std::size_t n = grid_.n;
  from = std::min(from, n - 1);
  to = std::min(to, n);
  std::size_t lo = n, hi = 0;
  for (std::size_t j = from; j + 1 < to; ++j)
    if (cur_(Eigen::Index(j)) != cur_(Eigen::Index(j + 1))) {
      lo = j;
      break;
    }
  if (lo == n) {
    lo_ = hi_ = 0;
    return;
  }
  for (std::size_t j = to - 1; j > lo; --j)
    if (cur_(Eigen::Index(j - 1)) != cur_(Eigen::Index(j))) {
      hi = j + 1;
      break;
    }
  lo_ = lo;
  hi_ = hi;
}

void PieceSolution::step(double dt) {
  if (!(dt > 0) || dt > grid_.dt * (1 + 1e-12))
    throw std::invalid_argument("PieceSolution::step: dt violates the CFL bound");
  const std::size_t n = grid_.n;
  // keep prev_ equal to the level before this step on every touched cell
  const std::size_t lo = lo_ > 0 ? lo_ - 1 : 0;
  const std::size_t hi = std::min(n, hi_ + 1);
  std::size_t copy_lo = lo, copy_hi = hi;
  if (dirty_hi_ > dirty_lo_) {
    copy_lo = std::min(copy_lo, dirty_lo_);
    copy_hi = std::max(copy_hi, dirty_hi_);
  }
  if (copy_hi > copy_lo)
    prev_.segment(Eigen::Index(copy_lo), Eigen::Index(copy_hi - copy_lo)) =
        cur_.segment(Eigen::Index(copy_lo), Eigen::Index(copy_hi - copy_lo));
  t_prev_ = t_;
  t_ += dt;
  ++level_;
  if (hi_ <= lo_) {
    dirty_lo_ = dirty_hi_ = 0;
    update_stats();
    return;
  }
  const double lam = dt / grid_.h;
  // interfaces j - 1/2 for j in [lo, hi]; ghost cells copy the edge cells
  for (std::size_t j = lo; j <= hi; ++j) {
    const double l = cur_(Eigen::Index(j > 0 ? j - 1 : 0));
    const double r = cur_(Eigen::Index(j < n ? j : n - 1));
    flux_(Eigen::Index(j)) = eo_flux(law_, l, r);
  }
  const double tol = 1e-12 * (1.0 + std::abs(init_max_) + std::abs(init_min_));
  for (std::size_t j = lo; j < hi; ++j) {
    const double v = cur_(Eigen::Index(j)) -
                     lam * (flux_(Eigen::Index(j + 1)) - flux_(Eigen::Index(j)));
    if (!std::isfinite(v))
      throw std::runtime_error("PieceSolution: non-finite value at t = " +
                               std::to_string(t_));
    if (v > init_max_ + tol || v < init_min_ - tol)
      throw std::runtime_error("PieceSolution: maximum principle violated at t = " +
                               std::to_string(t_));
    cur_(Eigen::Index(j)) = std::clamp(v, init_min_, init_max_);
  }
  dirty_lo_ = lo;
  dirty_hi_ = hi;
  find_active(lo > 0 ? lo - 1 : 0, std::min(n, hi + 1));
  update_stats();
}

void PieceSolution::update_stats() {
  lip_ = neg_ = min_slope_ = 0;
  if (hi_ <= lo_)
    return;
  double mn = std::numeric_limits<double>::infinity(), mx = 0;
  const std::size_t a = lo_ > 0 ? lo_ - 1 : 0;
  for (std::size_t j = a; j + 1 < hi_ + 1 && j + 1 < grid_.n; ++j) {
    const double d = cur_(Eigen::Index(j + 1)) - cur_(Eigen::Index(j));
    mn = std::min(mn, d);
    mx = std::max(mx, std::abs(d));
  }
  lip_ = mx / grid_.h;
  neg_ = std::max(0.0, -mn) / grid_.h;
  min_slope_ = mn / grid_.h;
}

double PieceSolution::interp(const VecX<double> &u, double x) const {
  const double p = (x - grid_.x_lo) / grid_.h - 0.5;
  if (!(p > 0))
    return u(0);
  const double last = double(grid_.n - 1);
  if (p >= last)
    return u(Eigen::Index(grid_.n - 1));
  const auto j = static_cast<Eigen::Index>(p);
  const double w = p - double(j);
  return u(j) + w * (u(j + 1) - u(j));
}

double PieceSolution::value(double x, double theta) const {
  return (1 - theta) * interp(prev_, x) + theta * interp(cur_, x);
}

double PieceSolution::slope(double x, double theta) const {
  const double p = (x - grid_.x_lo) / grid_.h - 0.5;
  if (!(p > 0) || p >= double(grid_.n - 1))
    return 0;
  const auto j = static_cast<Eigen::Index>(p);
  return ((1 - theta) * (prev_(j + 1) - prev_(j)) +
          theta * (cur_(j + 1) - cur_(j))) /
         grid_.h;
}

bool PieceSolution::slab_constant(std::size_t j) const {
  const auto a = Eigen::Index(j), b = Eigen::Index(j + 1);
  return prev_(a) == prev_(b) && cur_(a) == cur_(b) && prev_(a) == cur_(a);
}

std::array<double, 4> PieceSolution::slab_residual(std::size_t j) const {
  if (level_ == 0)
    throw std::logic_error("slab_residual: no step taken yet");
  const auto a = Eigen::Index(j), b = Eigen::Index(j + 1);
  return slab_residual_sq(law_, prev_(a), prev_(b), cur_(a), cur_(b), grid_.h,
                          t_ - t_prev_);
}

double PieceSolution::residual_sq_at(double x, double tau) const {
  if (level_ == 0)
    throw std::logic_error("residual_sq_at: no step taken yet");
  const double p = (x - grid_.x_lo) / grid_.h - 0.5;
  if (!(p > 0) || p >= double(grid_.n - 1))
    return 0; // constant ghosts
  const auto j = static_cast<Eigen::Index>(p);
  const double xi = p - double(j);
  const double a = prev_(j), b = prev_(j + 1), c = cur_(j), d = cur_(j + 1);
  const double v = (1 - tau) * ((1 - xi) * a + xi * b) + tau * ((1 - xi) * c + xi * d);
  const double vt = ((1 - xi) * (c - a) + xi * (d - b)) / (t_ - t_prev_);
  const double vx = ((1 - tau) * (b - a) + tau * (d - c)) / grid_.h;
  const double r = vt + (law_.is_burgers ? v : law_.dA(v)) * vx;
  return r * r;
}

EvolveResult evolve(PieceSolution &sol, double T, const ConeWindow &cone) {
  static const double g[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  const Grid &grid = sol.grid();
  EvolveResult out;
  while (sol.t() < T * (1 - 1e-14)) {
    const double dt = std::min(grid.dt, T - sol.t());
    sol.step(dt);
    const std::size_t lo = sol.dirty_lo() > 0 ? sol.dirty_lo() - 1 : 0;
    const std::size_t hi = std::min(grid.n - 1, sol.dirty_hi());
    const double w = grid.h * dt / 4;
    for (std::size_t j = lo; j < hi; ++j) {
      if (sol.slab_constant(j))
        continue;
      const auto r = sol.slab_residual(j);
      for (int it = 0; it < 2; ++it)
        for (int ix = 0; ix < 2; ++ix) {
          if (cone.S > 0) {
            const double x = grid.center(j) + g[ix] * grid.h;
            const auto [a, b] = cone.at(sol.t_prev() + g[it] * dt);
            if (x < a || x > b)
              continue;
          }
          out.residual_sq += w * r[2 * it + ix];
        }
    }
  }
  out.t = sol.t();
  return out;
}

double lipschitz_bound(double sup0, double inf0, double t, double amin,
                       bool *blowup) {
  bool blow = false;
  auto term = [&](double d) {
    if (d == 0)
      return 0.0;
    const double den = 1.0 / d + t * amin;
    if (d < 0 && den >= 0) {
      blow = true;
      return std::numeric_limits<double>::infinity();
    }
    return std::abs(1.0 / den);
  };
  const double r = std::max(term(sup0), term(inf0));
  if (blowup)
    *blowup = blow;
  return r;
}

double gap_bound(double rho, double lip_min, double t, double amax) {
  return rho / (1.0 + amax * lip_min * t);
}

double linf_bound(double lip_sum, double C, double T, double init_l2_sq,
                  double resid_sq) {
  return std::cbrt(8.0 * lip_sum * C * std::exp(C * T) * (init_l2_sq + resid_sq));
}

LevelSetCheck level_set_check(double linf, double min_slope, double gap) {
  LevelSetCheck c;
  if (!(min_slope > 0)) {
    c.error = std::numeric_limits<double>::infinity();
    c.margin = -c.error;
    return c;
  }
  c.error = linf / min_slope;
  c.margin = gap - c.error;
  c.pass = c.error < gap;
  return c;
}

} // namespace shiftest
