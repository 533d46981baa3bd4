#include "shiftest/engine.hpp"

#include "shiftest/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace shiftest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kG2[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
// Gauss-Legendre, 5 points on [0, 1]
const double kG5x[5] = {0.04691007703066800, 0.23076534494715845, 0.5,
                        0.76923465505284155, 0.95308992296933200};
const double kG5w[5] = {0.11846344252809454, 0.23931433524968324,
                        0.28444444444444444, 0.23931433524968324,
                        0.11846344252809454};

/// Delta = D0 + A + B + Cfac sqrt(Z), all zeta-weighted.
struct Tracker {
  GronwallAccumulator A, B, Z;
  double D0 = 0;

  void step(double defect, double alpha_b, double s, double beta, double dt) {
    A.step(defect, beta, dt);
    B.step(alpha_b, beta, dt);
    Z.step(1.0 / s, 2 * beta, dt);
    D0 *= std::exp(beta * dt);
  }
  double value(double cfac) const {
    return D0 + A.value + B.value + cfac * std::sqrt(Z.value);
  }
};

struct Curve {
  ShockClass cls0 = ShockClass::Large, cls = ShockClass::Large;
  int region = -1;
  int side = 0; // boundary curves: -1 region on the right, +1 region on the left
  Tracker tr;
  double delta = 0, delta_sup = 0, s_min = kInf;
  double rho0 = 0; // min gap of the flanking extensions at t = 0
  double upsilon = 0;
  bool failed = false;
};

struct Region {
  int id = 0;
  std::size_t p0 = 0, p1 = 0;          // first and last step piece
  std::size_t left_b = 0, right_b = 0; // boundary curves p0 - 1 and p1
  std::unique_ptr<FrontTrack> ft;
  double width = 0, osc = 0, s0b_sq = 0;
  double max_ups = 0, gamma = 0, d_inner = 0, slope = kNaN, worst = 0, dtilde = 0;
  bool active = true; // false once the pair certificate fired
  bool touched = false;
  double t_tch = 0, d_left = 0, d_right = 0, rho = kInf;
  std::size_t record = 0;
};

struct Pending {
  std::size_t i = 0, j = 0, record = 0;
  std::size_t La = 0, Ra = 0, Lb = 0, Rb = 0;
  double xa = 0, xb = 0, sa = 0, sb = 0;
  double da = 0, db = 0;
  Tracker a, b;
  bool done = false;
};

double gauss5(double a, double b, const std::function<double(double)> &f) {
  double s = 0;
  for (int k = 0; k < 5; ++k)
    s += kG5w[k] * f(a + (b - a) * kG5x[k]);
  return s * (b - a);
}

// exact integral of |f| for f affine on [a, b] with end values fa, fb
double abs_linear(double fa, double fb, double len) {
  if ((fa >= 0) == (fb >= 0))
    return 0.5 * std::abs(fa + fb) * len;
  return 0.5 * (fa * fa + fb * fb) / (std::abs(fa) + std::abs(fb)) * len;
}

class Engine {
public:
  Engine(const RunConfig &cfg, const RunHooks &hooks) : cfg_(cfg), hooks_(hooks) {}
  RunReport run();

private:
  void setup();
  void build_schedule();
  void ref_prepass();
  double val(std::size_t p, double x, double th = 1.0) const {
    return gp_.value(p, x, th);
  }
  std::pair<double, double> cone(double t) const {
    return {c_ - S_ + s_ * t, c_ + S_ - s_ * t};
  }
  std::pair<double, double> active_span(std::size_t p) const;
  double flank_gap(std::size_t L, std::size_t R, double lo, double hi) const;
  double rk4(std::size_t L, std::size_t R, double x, double dt, double s_start,
             double *s_end, double *defect) const;
  void residual_step(double t, double dt, const std::vector<double> &xprev);
  void regions_update(double t1);
  void curves_update(double t, double dt, double beta);
  void advance_pending(double t, double dt, double beta);
  void open_certificates(const std::vector<MergeEvent> &events, double t1);
  void rd_pairs(double t1);
  void join(std::size_t a, std::size_t b);
  void effective();
  double l1_bound(double t1, double l2c, double *b_int, double *ft_term) const;
  void audit(double t1);
  void downjump_check(double t1) const;
  GluedSnapshot snapshot(double t1) const;
  ReportRow row(double t1, double l2, double l2c, double l1, double b, double ft) const;

  RunConfig cfg_;
  RunHooks hooks_;
  Model<double> model_;
  ModelConstants<double> k_;
  SegmentedProfile prof_;
  DiscreteProfile dp_;
  ExtensionSet ext_;
  Grid grid_;
  GluedPieces gp_;
  std::unique_ptr<CurveSystem> cs_;
  std::vector<Curve> cur_;
  std::vector<std::size_t> set_lo_, set_hi_;
  std::vector<Region> regions_;
  std::vector<Pending> pending_;
  std::vector<double> schedule_, lip_before_, deff_, deff_prev_, rmax_;
  std::vector<std::size_t> left_chain_, right_chain_;
  RunReport rep_;
  std::size_t N_ = 0;
  double h_ = 0, delta_ = 0, M_ = 1, band_ = 1;
  double c_ = 0, S_ = 1, s_ = 0, supdA_ = 0, amax_ = 0;
  double R_ = 0, R_nnd_ = 0, neg_run_ = 0, C_ = 0, cfac_ = 0, zeta_log_ = 0;
  double E_L2_ = 0, E_eta_ = 0, E_fine_ = 0, E_eta_nnd_ = 0;
  double M_hat_ = 0, s_bar_ = 0;
  double gap_lo_ = -kInf, gap_hi_ = kInf; // cone at the current time level
  bool zero_ = false;
};

void Engine::setup() {
  if (cfg_.cells < 2 || !(cfg_.x_hi > cfg_.x_lo) || !(cfg_.T > 0))
    throw std::invalid_argument("run_rung: need cells >= 2, x_hi > x_lo, T > 0");
  zero_ = cfg_.zero_sources;
  h_ = (cfg_.x_hi - cfg_.x_lo) / double(cfg_.cells);
  delta_ = cfg_.delta > 0 ? cfg_.delta : std::sqrt(h_);
  prof_ = classify(cfg_.segments, cfg_.eps);
  dp_ = discretize(prof_, delta_);
  M_ = slope_m(dp_);
  ext_ = build_extensions(dp_, M_);
  band_ = extension_value_bound(ext_);
  model_ = model_by_name(cfg_.model, band_);
  k_ = model_.k;
  const auto &law = model_.law;
  s_ = k_.info_speed;
  supdA_ = k_.sup_dA;
  amax_ = k_.amax;
  c_ = 0.5 * (cfg_.x_lo + cfg_.x_hi);
  S_ = 0.5 * (cfg_.x_hi - cfg_.x_lo) + s_ * cfg_.T;
  grid_ = Grid::covering(c_ - S_, c_ + S_, h_, supdA_, cfg_.cfl);
  N_ = dp_.N();

  double lo_val = kInf, hi_val = -kInf;
  for (std::size_t p = 0; p <= N_; ++p) {
    PieceInfo info;
    if (dp_.pieces[p].is_step) {
      info.step = true;
      info.sur = make_step_surrogate(dp_, ext_, p);
      lo_val = std::min(lo_val, info.sur.lower);
      hi_val = std::max(hi_val, info.sur.upper);
    } else {
      info.sol = gp_.sols.size();
      gp_.sols.emplace_back(law, grid_, ext_.ext[p].v);
    }
    gp_.info.push_back(info);
  }
  if (std::isfinite(lo_val)) {
    const PLFunction line{{lo_val / M_, hi_val / M_}, {lo_val, hi_val}};
    const double pad = supdA_ * cfg_.T + 4 * h_;
    const Grid rg = Grid::covering(lo_val / M_ - pad, hi_val / M_ + pad, h_, supdA_,
                                   cfg_.cfl);
    gp_.ref.emplace_back(law, rg, line);
  }

  // initial errors
  const InitialErrors ie = initial_errors(prof_, dp_, model_.entropy);
  rep_.E_L2 = ie.l2;
  rep_.E_L2_nnd = ie.l2_nnd;
  rep_.E_eta = ie.eta;
  rep_.E_eta_nnd = ie.eta_nnd;

  // curves and regions
  cur_.resize(N_);
  set_lo_.resize(N_);
  set_hi_.resize(N_);
  for (std::size_t i = 0; i < N_; ++i) {
    cur_[i].cls0 = cur_[i].cls = dp_.shock_class[i];
    set_lo_[i] = set_hi_[i] = i;
    const PLFunction &a = ext_.ext[i].v, &b = ext_.ext[i + 1].v;
    double rho = kInf;
    for (const auto *f : {&a, &b})
      for (double x : f->x)
        rho = std::min(rho, a(x) - b(x));
    cur_[i].rho0 = rho;
  }
  const auto &law_ref = model_.law;
  for (std::size_t r = 0; r < dp_.steps.size(); ++r) {
    Region R;
    R.id = int(r);
    bool found = false;
    for (std::size_t p = 0; p <= N_; ++p)
      if (dp_.pieces[p].is_step && dp_.pieces[p].region == int(r)) {
        if (!found)
          R.p0 = p;
        R.p1 = p;
        found = true;
      }
    if (!found)
      continue;
    R.left_b = R.p0 - 1;
    R.right_b = R.p1;
    std::vector<double> plateaus, fronts;
    for (std::size_t p = R.p0; p <= R.p1; ++p)
      plateaus.push_back(dp_.pieces[p].plateau);
    for (std::size_t p = R.p0; p < R.p1; ++p) {
      fronts.push_back(dp_.x[p]);
      cur_[p].region = int(r);
    }
    R.ft = std::make_unique<FrontTrack>(law_ref, plateaus, fronts);
    R.width = dp_.x[R.right_b] - dp_.x[R.left_b];
    R.osc = plateaus.front() - plateaus.back();
    cur_[R.left_b].region = cur_[R.right_b].region = int(r);
    cur_[R.left_b].side = -1;
    cur_[R.right_b].side = +1;
    // boundary shocks next to continuous data
    const std::size_t parent = dp_.pieces[R.p0].parent;
    const auto &pp = prof_.pieces;
    auto cont = [](double u, double v) {
      return std::abs(u - v) <= 1e-12 * (1 + std::abs(u));
    };
    if (parent > 0 && cont(pp[parent - 1].right_value(), pp[parent].left_value()))
      R.s0b_sq += dp_.jump(R.left_b) * dp_.jump(R.left_b);
    if (parent + 1 < pp.size() &&
        cont(pp[parent].right_value(), pp[parent + 1].left_value()))
      R.s0b_sq += dp_.jump(R.right_b) * dp_.jump(R.right_b);
    double s0max = 0;
    for (std::size_t p = R.p0; p < R.p1; ++p)
      s0max = std::max(s0max, dp_.jump(p) * dp_.jump(p));
    E_fine_ += 2 * delta_ * k_.hmax * (s0max + R.s0b_sq) / k_.cstar;
    regions_.push_back(std::move(R));
  }
  E_L2_ = rep_.E_L2;
  E_eta_ = rep_.E_eta;
  E_eta_nnd_ = rep_.E_eta_nnd;
  rep_.E_fine = E_fine_ = regions_.empty() ? 0.0 : rep_.E_L2_nnd + E_fine_;
  if (zero_) {
    E_L2_ = E_eta_ = E_fine_ = E_eta_nnd_ = 0;
    rep_.E_fine = 0;
  }

  cs_ = std::make_unique<CurveSystem>(law, dp_.x);
  cs_->init([this](std::size_t p, double x, double th) { return val(p, x, th); });
  deff_.assign(N_, 0.0);
  rmax_.assign(4 * grid_.n, 0.0);
  lip_before_.assign(N_ + 1, 0.0);
  C_ = gronwall_constant(k_, 0.0);

  rep_.cells = cfg_.cells;
  rep_.grid_cells = grid_.n;
  rep_.h = h_;
  rep_.delta = delta_;
  rep_.S = S_;
  rep_.info_speed = s_;
  rep_.band = band_;
  rep_.M = M_;
}

void Engine::build_schedule() {
  double dt = grid_.dt;
  if (!gp_.ref.empty())
    dt = std::min(dt, gp_.ref[0].grid().dt);
  rep_.dt = dt;
  std::vector<double> stops;
  for (double t : cfg_.output_times)
    if (t > 0 && t < cfg_.T)
      stops.push_back(t);
  stops.push_back(cfg_.T);
  std::sort(stops.begin(), stops.end());
  double t = 0;
  for (double stop : stops) {
    while (t < stop * (1 - 1e-13)) {
      const double step = std::min(dt, stop - t);
      schedule_.push_back(step);
      t = std::min(stop, t + step);
    }
  }
}

void Engine::ref_prepass() {
  if (gp_.ref.empty())
    return;
  PieceSolution ref = gp_.ref[0];
  M_hat_ = ref.lip();
  // FT pairs: both flanks are steps
  std::vector<std::size_t> pairs;
  double xs_lo = kInf, xs_hi = -kInf;
  for (const auto &R : regions_)
    for (std::size_t p = R.p0; p < R.p1; ++p)
      pairs.push_back(p);
  for (const auto &in : gp_.info)
    if (in.step) {
      xs_lo = std::min(xs_lo, ref.grid().x_lo + std::min(in.sur.shift_lambda, in.sur.shift_p));
      xs_hi = std::max(xs_hi, ref.grid().x_hi + std::max(in.sur.shift_lambda, in.sur.shift_p));
    }
  auto eval = [&](std::size_t p, double x) {
    return rd_extension_surrogate(
        gp_.info[p].sur, [&](double y, double) { return ref.value(y); }, x, 0.0);
  };
  auto sample = [&]() {
    if (pairs.empty())
      return;
    const double a = std::max(xs_lo, grid_.x_lo), b = std::min(xs_hi, grid_.x_hi);
    for (double x = a; x <= b; x += h_)
      for (std::size_t p : pairs)
        s_bar_ = std::max(s_bar_, eval(p, x) - eval(p + 1, x));
  };
  sample();
  for (std::size_t n = 0; n < schedule_.size(); ++n) {
    ref.step(schedule_[n]);
    M_hat_ = std::max(M_hat_, ref.lip());
    if (n % 16 == 15 || n + 1 == schedule_.size())
      sample();
  }
  if (zero_)
    s_bar_ = 0;
}

std::pair<double, double> Engine::active_span(std::size_t p) const {
  // both levels are constant outside this span
  auto span = [](const PieceSolution &u) {
    const auto &g = u.grid();
    if (u.active_hi() <= u.active_lo())
      return std::pair{kInf, -kInf};
    const double pad = 2 * g.h;
    return std::pair{g.center(u.active_lo()) - pad, g.center(u.active_hi() - 1) + pad};
  };
  const auto &info = gp_.info[p];
  if (!info.step)
    return span(gp_.sols[info.sol]);
  const auto [a, b] = span(gp_.ref[0]);
  if (!(b >= a))
    return {a, b};
  return {a + std::min(info.sur.shift_lambda, info.sur.shift_p),
          b + std::max(info.sur.shift_lambda, info.sur.shift_p)};
}

double Engine::flank_gap(std::size_t L, std::size_t R, double lo, double hi) const {
  lo = std::clamp(lo, gap_lo_, gap_hi_);
  hi = std::clamp(hi, gap_lo_, gap_hi_);
  const auto [la, lb] = active_span(L);
  const auto [ra, rb] = active_span(R);
  const double a = std::max({lo, grid_.center(0), std::min(la, ra)});
  const double b = std::min({hi, grid_.center(grid_.n - 1), std::max(lb, rb)});
  double best = kInf;
  for (double th : {0.0, 1.0})
    for (double x : {lo, hi})
      best = std::min(best, val(L, x, th) - val(R, x, th));
  if (!(b > a))
    return best;
  const double p0 = std::ceil((a - grid_.x_lo) / h_ - 0.5);
  const double p1 = std::floor((b - grid_.x_lo) / h_ - 0.5);
  if (p1 < p0)
    return best;
  const auto j0 = std::size_t(p0), j1 = std::size_t(p1);
  const std::size_t count = j1 - j0 + 1;
  const std::size_t stride = std::max<std::size_t>(1, count / 1024);
  const bool pl = !gp_.info[L].step && !gp_.info[R].step;
  double sampled = kInf;
  for (std::size_t j = j0; j <= j1; j += stride)
    for (double th : {0.0, 1.0})
      sampled = std::min(sampled, val(L, grid_.center(j), th) - val(R, grid_.center(j), th));
  for (double th : {0.0, 1.0})
    sampled = std::min(sampled, val(L, grid_.center(j1), th) - val(R, grid_.center(j1), th));
  if (stride > 1 || !pl) {
    // Lipschitz margin between samples
    const double lip = std::max(lip_before_[L], gp_.lip(L)) +
                       std::max(lip_before_[R], gp_.lip(R));
    sampled -= 0.5 * lip * double(stride) * h_;
  }
  return std::min(best, sampled);
}

double Engine::rk4(std::size_t L, std::size_t R, double x, double dt, double s_start,
                   double *s_end, double *defect) const {
  const auto &law = model_.law;
  auto f = [&](double z, double th) { return rh_speed(law, val(L, z, th), val(R, z, th)); };
  const double k1 = f(x, 0.0);
  const double k2 = f(x + 0.5 * dt * k1, 0.5);
  const double k3 = f(x + 0.5 * dt * k2, 0.5);
  const double k4 = f(x + dt * k3, 1.0);
  const double y = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  *s_end = f(y, 1.0);
  CurveGroup g;
  g.x0 = x;
  g.s0 = s_start;
  g.x = y;
  g.speed = *s_end;
  const double z = g.hermite(0.5, dt);
  *defect = std::abs(g.hermite_speed(0.5, dt) - f(z, 0.5));
  return y;
}

void Engine::residual_step(double t, double dt, const std::vector<double> &xprev) {
  const double pad = 2 * supdA_ * dt;
  const auto [clo, chi] = cone(t);
  const double w = h_ * dt / 4;
  std::size_t tlo = rmax_.size(), thi = 0;
  double step_total = 0, neg = 0;

  // prefix sums of the reference residual
  std::vector<double> prefix;
  if (!gp_.ref.empty()) {
    const PieceSolution &ref = gp_.ref[0];
    const std::size_t n = ref.grid().n;
    prefix.assign(n, 0.0);
    const std::size_t lo = ref.dirty_lo() > 0 ? ref.dirty_lo() - 1 : 0;
    const std::size_t hi = std::min(n - 1, ref.dirty_hi());
    for (std::size_t j = lo; j < hi; ++j) {
      if (ref.slab_constant(j))
        continue;
      const auto r = ref.slab_residual(j);
      prefix[j + 1] = (r[0] + r[1] + r[2] + r[3]) * w;
    }
    for (std::size_t j = 1; j < n; ++j)
      prefix[j] += prefix[j - 1];
  }

  for (std::size_t p = 0; p <= N_; ++p) {
    double lo = p == 0 ? -kInf
                       : std::min(xprev[p - 1], cs_->position(p - 1)) - (deff_[p - 1] + pad);
    double hi = p == N_ ? kInf : std::max(xprev[p], cs_->position(p)) + (deff_[p] + pad);
    lo = std::max(lo, clo);
    hi = std::min(hi, chi);
    if (!(hi > lo))
      continue;
    const PieceInfo &info = gp_.info[p];
    if (!info.step) {
      const PieceSolution &sol = gp_.sols[info.sol];
      const auto &u = sol.current();
      const std::size_t n = grid_.n;
      std::size_t ja = sol.dirty_lo() > 0 ? sol.dirty_lo() - 1 : 0;
      std::size_t jb = std::min(n - 1, sol.dirty_hi());
      const double wa = std::floor((lo - grid_.x_lo) / h_ - 0.5);
      const double wb = std::ceil((hi - grid_.x_lo) / h_ - 0.5);
      if (wa > double(ja))
        ja = std::size_t(wa);
      if (wb < double(jb))
        jb = wb < 0 ? 0 : std::size_t(wb);
      for (std::size_t j = ja; j < jb; ++j) {
        if (sol.slab_constant(j))
          continue;
        const double xc = grid_.center(j);
        if (xc >= lo && xc + h_ <= hi)
          neg = std::max(neg, -(u(Eigen::Index(j + 1)) - u(Eigen::Index(j))) / h_);
        if (zero_)
          continue;
        const auto r = sol.slab_residual(j);
        for (int it = 0; it < 2; ++it) {
          const auto [a, b] = cone(t + kG2[it] * dt);
          for (int ix = 0; ix < 2; ++ix) {
            const double x = xc + kG2[ix] * h_;
            if (x < lo || x > hi || x < a || x > b)
              continue;
            const std::size_t idx = 4 * j + 2 * std::size_t(it) + std::size_t(ix);
            rmax_[idx] = std::max(rmax_[idx], r[2 * it + ix] * w);
            tlo = std::min(tlo, idx);
            thi = std::max(thi, idx + 1);
          }
        }
      }
    } else if (!zero_ && !prefix.empty()) {
      const PieceSolution &ref = gp_.ref[0];
      const Grid &rg = ref.grid();
      const std::size_t n = rg.n;
      const auto &up = ref.previous(), &uc = ref.current();
      auto first_gt = [&](double v) {
        const auto a = std::upper_bound(up.data(), up.data() + n, v) - up.data();
        const auto b = std::upper_bound(uc.data(), uc.data() + n, v) - uc.data();
        return std::size_t(std::min(a, b));
      };
      auto first_ge = [&](double v) {
        const auto a = std::lower_bound(up.data(), up.data() + n, v) - up.data();
        const auto b = std::lower_bound(uc.data(), uc.data() + n, v) - uc.data();
        return std::size_t(std::max(a, b));
      };
      auto branch = [&](double shift, double vlo, double vhi) {
        const double ya = std::floor((lo - shift - rg.x_lo) / h_ - 0.5);
        const double yb = std::ceil((hi - shift - rg.x_lo) / h_ - 0.5);
        std::size_t ja = ya < 0 ? 0 : std::size_t(std::min(ya, double(n - 1)));
        std::size_t jb = yb < 0 ? 0 : std::size_t(std::min(yb, double(n - 1)));
        const std::size_t g = first_gt(vlo);
        ja = std::max(ja, g > 0 ? g - 1 : 0);
        jb = std::min(jb, first_ge(vhi));
        // prefix[j] sums slabs [0, j)
        return jb > ja ? prefix[jb] - prefix[ja] : 0.0;
      };
      const StepSurrogate &s = info.sur;
      step_total += branch(s.shift_lambda, s.lower, s.plateau);
      step_total += branch(s.shift_p, s.plateau, s.upper);
    }
  }
  double nnd = 0;
  for (std::size_t i = tlo; i < thi; ++i) {
    nnd += rmax_[i];
    rmax_[i] = 0;
  }
  R_nnd_ += nnd;
  R_ += nnd + step_total;
  neg_run_ = std::max(neg_run_, neg);
}

void Engine::regions_update(double t1) {
  for (auto &R : regions_) {
    R.ft->advance_to(t1);
    if (!R.active)
      continue;
    R.slope = R.ft->discrete_slope(delta_);
    auto ups = [&](std::size_t i) {
      UpsilonInputs u;
      u.t = t1;
      u.s_floor = gap_bound(cur_[i].rho0, M_, t1, amax_);
      u.s0 = zero_ ? 0.0 : dp_.jump(i);
      u.s0_boundary_sq = zero_ ? 0.0 : R.s0b_sq;
      u.delta = delta_;
      u.H = k_.hmax;
      u.E_nnd = E_eta_nnd_;
      u.R_nnd = R_nnd_;
      u.C = C_;
      u.s_bar = s_bar_;
      u.A = amax_;
      return upsilon(u);
    };
    double mx = 0;
    for (std::size_t i = R.p0; i < R.p1; ++i) {
      cur_[i].upsilon = ups(i);
      mx = std::max(mx, cur_[i].upsilon);
    }
    cur_[R.left_b].upsilon = ups(R.left_b);
    cur_[R.right_b].upsilon = ups(R.right_b);
    R.max_ups = mx;
    GammaInputs g;
    g.t = t1;
    g.osc = R.osc;
    g.width = R.width;
    g.delta = delta_;
    g.M_hat = M_hat_;
    g.max_upsilon = mx;
    g.C = C_;
    g.E0 = E_eta_;
    g.R = R_;
    g.A = amax_;
    R.gamma = std::max(R.gamma, gamma_bound(g));
    R.d_inner = delta_inner(R.gamma, dp_.eps, R.slope);
    R.worst = ft_worst_case(R.d_inner, amax_, M_hat_, cfg_.T, mx, R.gamma);
    R.dtilde = std::max(R.dtilde, std::exp(zeta_log_) * R.worst);
  }
}

void Engine::curves_update(double t, double dt, double beta) {
  (void)t;
  const auto &law = model_.law;
  const double pad = 2 * supdA_ * dt;
  std::vector<double> x(N_), lo(N_), hi(N_);
  for (std::size_t k = 0; k < N_; ++k) {
    x[k] = cs_->position(k);
    lo[k] = x[k] - (deff_[k] + pad);
    hi[k] = x[k] + (deff_[k] + pad);
  }
  left_chain_.assign(N_, 0);
  right_chain_.assign(N_, 0);
  for (std::size_t k = 0; k < N_; ++k)
    left_chain_[k] = (k > 0 && hi[k - 1] >= lo[k]) ? left_chain_[k - 1] : k;
  for (std::size_t k = N_; k-- > 0;)
    right_chain_[k] = (k + 1 < N_ && hi[k] >= lo[k + 1]) ? right_chain_[k + 1] : k;

  for (std::size_t k = 0; k < N_; ++k) {
    Curve &c = cur_[k];
    if (c.failed)
      continue;
    if (c.cls == ShockClass::FrontTracking) {
      const Region &R = regions_[std::size_t(c.region)];
      const auto &f = R.ft->positions();
      const bool valid = f.size() >= 2 && x[k] - R.d_inner > f.front() &&
                         x[k] + R.d_inner < f.back();
      c.delta = valid ? R.d_inner : R.worst;
      continue;
    }
    const std::size_t Lt = set_lo_[k], Rt = set_hi_[k] + 1;
    const CurveGroup &g = cs_->group(k);
    const std::size_t Lh = g.left_piece(), Rh = g.right_piece();
    const std::size_t Lmin = std::min(left_chain_[k], Lt);
    const std::size_t Rmax = std::max(right_chain_[k] + 1, Rt);
    double alpha = 0;
    if (!zero_) {
      const double xk = x[k];
      if (c.cls == ShockClass::Boundary) {
        if (c.side < 0) {
          for (std::size_t L : {Lmin, Lt})
            alpha = std::max(alpha, std::abs(val(Lh, xk) - val(L, xk)));
        } else {
          for (std::size_t R : {Rt, Rmax})
            alpha = std::max(alpha, std::abs(val(Rh, xk) - val(R, xk)));
        }
        alpha *= amax_;
      } else {
        const double sh = rh_speed(law, val(Lh, xk), val(Rh, xk));
        for (std::size_t L : {Lmin, Lt})
          for (std::size_t R : {Rt, Rmax})
            alpha = std::max(alpha, std::abs(sh - rh_speed(law, val(L, xk), val(R, xk))));
        alpha = std::min(alpha, 2 * supdA_);
      }
    }
    const double defect = zero_ ? 0.0 : g.defect;
    const double dtil = (c.cls == ShockClass::Boundary && c.region >= 0 &&
                         regions_[std::size_t(c.region)].active)
                            ? regions_[std::size_t(c.region)].dtilde
                            : 0.0;
    auto tentative = [&](double s) {
      Tracker tr = c.tr;
      tr.step(defect, alpha, s, beta, dt);
      return tr.value(cfac_) + dtil + supdA_ * dt;
    };
    const auto fp = shock_size_fixpoint(
        x[k], deff_[k] + pad,
        [&](double a, double b) { return flank_gap(Lt, Rt, a, b); }, tentative);
    if (!(fp.s > 0)) {
      c.failed = true;
      c.delta = kInf;
      continue;
    }
    c.s_min = std::min(c.s_min, fp.s);
    c.tr.step(defect, alpha, fp.s, beta, dt);
    c.delta = c.tr.value(cfac_) + dtil;
  }
}

void Engine::effective() {
  for (std::size_t k = 0; k < N_; ++k) {
    double d = kInf;
    for (std::size_t m = set_lo_[k]; m <= set_hi_[k]; ++m)
      d = std::min(d, cur_[m].delta);
    deff_[k] = d;
    cur_[k].delta_sup = std::max(cur_[k].delta_sup, d);
  }
}

void Engine::join(std::size_t a, std::size_t b) {
  const std::size_t lo = std::min(set_lo_[a], set_lo_[b]);
  const std::size_t hi = std::max(set_hi_[a], set_hi_[b]);
  for (std::size_t m = lo; m <= hi; ++m) {
    set_lo_[m] = lo;
    set_hi_[m] = hi;
  }
}

void Engine::advance_pending(double t, double dt, double beta) {
  const double pad = 2 * supdA_ * dt;
  const double t1 = t + dt;
  for (auto &pc : pending_) {
    if (pc.done)
      continue;
    auto one = [&](std::size_t L, std::size_t R, double &xx, double &ss, double &dd,
                   Tracker &tr, std::size_t owner) {
      if (!std::isfinite(dd))
        return;
      double s_end = 0, defect = 0;
      const double r0 = dd + pad;
      xx = rk4(L, R, xx, dt, ss, &s_end, &defect);
      ss = s_end;
      if (zero_)
        defect = 0;
      const Curve &c = cur_[owner];
      const double dtil = (c.cls == ShockClass::Boundary && c.region >= 0 &&
                           regions_[std::size_t(c.region)].active)
                              ? regions_[std::size_t(c.region)].dtilde
                              : 0.0;
      auto tentative = [&](double s) {
        Tracker t2 = tr;
        t2.step(defect, 0.0, s, beta, dt);
        return t2.value(cfac_) + dtil + supdA_ * dt;
      };
      const auto fp = shock_size_fixpoint(
          xx, r0, [&](double a, double b) { return flank_gap(L, R, a, b); }, tentative);
      if (!(fp.s > 0)) {
        dd = kInf;
        return;
      }
      tr.step(defect, 0.0, fp.s, beta, dt);
      dd = tr.value(cfac_) + dtil;
    };
    one(pc.La, pc.Ra, pc.xa, pc.sa, pc.da, pc.a, pc.i);
    one(pc.Lb, pc.Rb, pc.xb, pc.sb, pc.db, pc.b, pc.j);
    if (pc.xa - pc.da > pc.xb + pc.db) {
      pc.done = true;
      rep_.certificates[pc.record].t_fire = t1;
      join(pc.i, pc.j);
    }
  }
}

void Engine::open_certificates(const std::vector<MergeEvent> &events, double t1) {
  const auto &law = model_.law;
  for (const auto &ev : events) {
    const std::size_t i = ev.left, j = ev.right;
    if (set_lo_[i] == set_lo_[j])
      continue;
    const ShockClass ci = cur_[i].cls, cj = cur_[j].cls;
    if (ci == ShockClass::FrontTracking || cj == ShockClass::FrontTracking)
      continue;
    if (ci == ShockClass::Boundary && cj == ShockClass::Boundary &&
        cur_[i].region == cur_[j].region)
      continue; // pair certificate of the region
    CertificateRecord rec;
    rec.kind = (ci == ShockClass::Boundary || cj == ShockClass::Boundary)
                   ? "nnd-boundary"
                   : "large";
    rec.left = i;
    rec.right = j;
    rec.t_merge = ev.t;
    Pending pc;
    pc.i = i;
    pc.j = j;
    pc.record = rep_.certificates.size();
    rep_.certificates.push_back(rec);
    pc.La = set_lo_[i];
    pc.Ra = i + 1;
    pc.Lb = j;
    pc.Rb = set_hi_[j] + 1;
    pc.xa = pc.xb = cs_->position(i);
    pc.sa = rh_speed(law, val(pc.La, pc.xa), val(pc.Ra, pc.xa));
    pc.sb = rh_speed(law, val(pc.Lb, pc.xb), val(pc.Rb, pc.xb));
    pc.a = cur_[i].tr;
    pc.b = cur_[j].tr;
    pc.da = cur_[i].delta;
    pc.db = cur_[j].delta;
    (void)t1;
    pending_.push_back(pc);
  }
}

void Engine::rd_pairs(double t1) {
  for (auto &R : regions_) {
    if (!R.active)
      continue;
    if (!R.touched && cs_->group_index(R.left_b) == cs_->group_index(R.right_b)) {
      R.touched = true;
      R.t_tch = t1;
      R.d_left = cur_[R.left_b].delta;
      R.d_right = cur_[R.right_b].delta;
      CertificateRecord rec;
      rec.kind = "rd-pair";
      rec.left = R.left_b;
      rec.right = R.right_b;
      rec.t_merge = t1;
      R.record = rep_.certificates.size();
      rep_.certificates.push_back(rec);
    }
    if (!R.touched)
      continue;
    const auto [a, b] = cone(t1);
    const std::size_t Lo = R.left_b, Ro = R.right_b + 1;
    for (double x = a; x <= b; x += h_)
      R.rho = std::min(R.rho, val(Lo, x) - val(Ro, x));
    if (!(R.rho > 0))
      continue;
    const double m = rd_pair_speed_gap(model_.law, R.rho, band_);
    if (!rd_pair_certified(m, t1, R.t_tch, R.d_left, R.d_right,
                           cur_[R.left_b].upsilon, cur_[R.right_b].upsilon))
      continue;
    rep_.certificates[R.record].t_fire = t1;
    R.active = false;
    const double d0 = std::min(cur_[R.left_b].delta, cur_[R.right_b].delta);
    for (std::size_t m2 = R.left_b; m2 <= R.right_b; ++m2) {
      Curve &c = cur_[m2];
      c.cls = ShockClass::Large;
      c.region = -1;
      c.tr = Tracker{};
      c.tr.D0 = d0;
      c.delta = d0;
    }
    join(R.left_b, R.right_b);
  }
}

double Engine::l1_bound(double t1, double l2c, double *b_int, double *ft_term) const {
  const auto [a, b] = cone(t1);
  std::vector<std::pair<double, double>> iv;
  for (std::size_t k = 0; k < N_; ++k) {
    if (cur_[k].cls0 == ShockClass::FrontTracking)
      continue;
    if (!std::isfinite(deff_[k]))
      return kInf;
    const double x = cs_->position(k);
    const double lo = std::max(a, x - deff_[k]), hi = std::min(b, x + deff_[k]);
    if (hi > lo)
      iv.emplace_back(lo, hi);
  }
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto &p : iv) {
    if (!merged.empty() && p.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, p.second);
    else
      merged.push_back(p);
  }
  std::vector<double> xs(N_), ds(N_);
  for (std::size_t k = 0; k < N_; ++k) {
    xs[k] = cs_->position(k);
    ds[k] = deff_[k];
  }
  double B = 0;
  for (const auto &[lo, hi] : merged) {
    std::vector<double> pts{lo, hi};
    for (std::size_t k = 0; k < N_; ++k)
      for (double e : {xs[k] - ds[k], xs[k] + ds[k]})
        if (e > lo && e < hi)
          pts.push_back(e);
    const double p0 = std::ceil((lo - grid_.x_lo) / h_ - 0.5);
    const double p1 = std::floor((hi - grid_.x_lo) / h_ - 0.5);
    for (double p = std::max(p0, 0.0); p <= p1 && p < double(grid_.n); p += 1)
      pts.push_back(grid_.center(std::size_t(p)));
    std::sort(pts.begin(), pts.end());
    for (std::size_t q = 0; q + 1 < pts.size(); ++q) {
      const double u = pts[q], v = pts[q + 1];
      if (!(v > u))
        continue;
      const double xm = 0.5 * (u + v);
      std::size_t m = N_, M = 0;
      bool any = false;
      for (std::size_t k = 0; k < N_; ++k)
        if (std::abs(xm - xs[k]) <= ds[k]) {
          m = std::min(m, k);
          M = std::max(M, k + 1);
          any = true;
        }
      if (!any)
        continue;
      for (double g : kG2) {
        const double x = u + g * (v - u);
        B += 0.5 * (v - u) * std::abs(val(m, x) - val(M, x));
      }
    }
  }
  double ft = 0;
  for (const auto &R : regions_)
    if (R.active)
      ft += R.gamma + 2 * S_ * M_hat_ * R.max_ups;
  *b_int = B;
  *ft_term = ft;
  return std::sqrt(b - a) * l2c + B + ft;
}

void Engine::downjump_check(double t1) const {
  for (const auto &g : cs_->groups()) {
    const double d = val(g.left_piece(), g.x) - val(g.right_piece(), g.x);
    if (!(d > 0))
      throw std::runtime_error("down-jump check failed at t = " + std::to_string(t1) +
                               " on curve " + std::to_string(g.first + 1));
  }
  for (std::size_t k = 1; k < N_; ++k)
    if (cs_->position(k) < cs_->position(k - 1))
      throw std::runtime_error("curve ordering failed at t = " + std::to_string(t1));
}

void Engine::audit(double t1) {
  AuditReport &au = rep_.audit;
  ++au.audits;
  const auto [a, b] = cone(t1);
  const double p0 = std::max(0.0, std::ceil((a - grid_.x_lo) / h_ - 0.5));
  const double p1 = std::min(double(grid_.n - 1), std::floor((b - grid_.x_lo) / h_ - 0.5));
  for (std::size_t p = 0; p < N_; ++p) {
    double mn = kInf;
    for (double q = p0; q <= p1; q += 1) {
      const double x = grid_.center(std::size_t(q));
      mn = std::min(mn, val(p, x) - val(p + 1, x));
    }
    au.min_ordering = std::min(au.min_ordering, mn);
    if (!(mn > 0)) {
      au.ordering_ok = false;
      throw std::runtime_error("ordering check failed at t = " + std::to_string(t1) +
                               " between pieces " + std::to_string(p + 1) + " and " +
                               std::to_string(p + 2));
    }
    const double bound = gap_bound(cur_[p].rho0, M_, t1, amax_);
    const double margin = (mn - bound) / bound;
    au.min_gap_margin = std::min(au.min_gap_margin, margin);
    // first-order smearing of the pieces costs O(h) relative to the exact gap
    const double tol = amax_ * M_ * h_;
    if (margin < -tol - 1e-12)
      au.gap_ok = false;
  }
  for (auto &R : regions_) {
    if (!R.active)
      continue;
    const std::size_t Lo = R.left_b, Ro = R.right_b + 1;
    for (double q = p0; q <= p1; q += 1) {
      const double x = grid_.center(std::size_t(q));
      R.rho = std::min(R.rho, val(Lo, x) - val(Ro, x));
    }
  }
}

GluedSnapshot Engine::snapshot(double t1) const {
  GluedSnapshot s;
  s.t = t1;
  s.pieces = gp_;
  for (const auto &g : cs_->groups()) {
    s.curve_x.push_back(g.x);
    s.left_piece.push_back(g.left_piece());
  }
  s.last_piece = N_;
  return s;
}

ReportRow Engine::row(double t1, double l2, double l2c, double l1, double b,
                      double ft) const {
  ReportRow r;
  r.t = t1;
  r.R = R_;
  r.R_nnd = R_nnd_;
  r.l2 = l2;
  r.l2_coarse = l2c;
  r.l1 = l1;
  r.b_integral = b;
  r.ft_term = ft;
  r.delta = deff_;
  for (std::size_t k = 0; k < N_; ++k)
    if (cur_[k].cls0 != ShockClass::FrontTracking)
      r.max_delta = std::max(r.max_delta, deff_[k]);
  return r;
}

RunReport Engine::run() {
  const auto clock0 = std::chrono::steady_clock::now();
  setup();
  build_schedule();
  ref_prepass();

  const PieceEval ev = [this](std::size_t p, double x, double th) { return val(p, x, th); };
  std::vector<double> xprev(N_);
  std::vector<double> outs(cfg_.output_times);
  std::sort(outs.begin(), outs.end());
  std::size_t next_out = 0;
  while (next_out < outs.size() && outs[next_out] <= 0)
    ++next_out;

  double t = 0, l1_last = 0, b_last = 0, ft_last = 0;
  const std::size_t l1_every = 8;
  for (std::size_t n = 0; n < schedule_.size(); ++n) {
    const double dt = schedule_[n];
    const double t1 = n + 1 == schedule_.size() ? cfg_.T : t + dt;
    double lip_b = 0, lip_a = 0;
    for (std::size_t p = 0; p <= N_; ++p) {
      lip_before_[p] = gp_.lip(p);
      lip_b = std::max(lip_b, lip_before_[p]);
    }
    for (std::size_t k = 0; k < N_; ++k)
      xprev[k] = cs_->position(k);
    for (auto &s : gp_.sols)
      s.step(dt);
    for (auto &s : gp_.ref)
      s.step(dt);
    for (std::size_t p = 0; p <= N_; ++p)
      lip_a = std::max(lip_a, gp_.lip(p));
    const double beta = amax_ * std::max(lip_b, lip_a);
    zeta_log_ += beta * dt;

    const auto events = cs_->advance(t, dt, ev);
    rep_.merges.insert(rep_.merges.end(), events.begin(), events.end());

    residual_step(t, dt, xprev);
    C_ = gronwall_constant(k_, neg_run_ * k_.hmax);
    {
      double cf = C_ * std::exp(C_ * t1) * (E_eta_ + R_);
      if (cfg_.strict_c)
        cf /= k_.diss_c;
      cfac_ = std::sqrt(cf);
    }
    regions_update(t1);
    std::tie(gap_lo_, gap_hi_) = cone(t1);
    curves_update(t, dt, beta);
    advance_pending(t, dt, beta);
    effective();
    open_certificates(events, t1);
    rd_pairs(t1);
    effective();
    downjump_check(t1);

    const bool last = n + 1 == schedule_.size();
    const bool is_out = next_out < outs.size() &&
                        std::abs(t1 - outs[next_out]) <= 1e-12 * (1 + outs[next_out]);
    if (n % cfg_.audit_every == 0 || last)
      audit(t1);

    const double l2c = l2_bound(C_, t1, E_L2_, R_);
    const double l2 = regions_.empty() ? l2c : l2_bound(C_, t1, E_fine_, R_);
    if (n % l1_every == 0 || last || is_out) {
      l1_last = l1_bound(t1, l2c, &b_last, &ft_last);
      rep_.l1_sup = std::max(rep_.l1_sup, l1_last);
    }
    for (std::size_t k = 0; k < N_; ++k)
      if (cur_[k].cls0 != ShockClass::FrontTracking)
        rep_.max_delta = std::max(rep_.max_delta, deff_[k]);

    if (is_out || last) {
      rep_.rows.push_back(row(t1, l2, l2c, l1_last, b_last, ft_last));
      if (is_out)
        ++next_out;
      if (hooks_.on_output)
        hooks_.on_output(snapshot(t1));
    }
    if (last) {
      rep_.R = R_;
      rep_.R_nnd = R_nnd_;
      rep_.l2 = l2;
      rep_.l2_coarse = l2c;
      rep_.l1 = l1_last;
      rep_.b_integral = b_last;
    }
    t = t1;
  }
  rep_.steps = schedule_.size();
  rep_.C = C_;

  for (const auto &R : regions_) {
    RegionReport rr;
    rr.region = R.id;
    rr.first_piece = R.p0;
    rr.last_piece = R.p1;
    rr.max_upsilon = R.max_ups;
    rr.gamma = R.gamma;
    rr.delta_inner = R.d_inner;
    rr.slope = R.slope;
    rr.s_bar = s_bar_;
    rr.M_hat = M_hat_;
    rr.width = R.width;
    rr.osc = R.osc;
    rr.worst = R.worst;
    rep_.regions.push_back(rr);
  }
  for (std::size_t k = 0; k < N_; ++k) {
    CurveReport cr;
    cr.id = k;
    cr.initial = cur_[k].cls0;
    cr.final_class = cur_[k].cls;
    cr.x0 = dp_.x[k];
    cr.x = cs_->position(k);
    cr.delta = deff_[k];
    cr.delta_sup = cur_[k].delta_sup;
    cr.s_min = cur_[k].s_min;
    rep_.curves.push_back(cr);
    if (!std::isfinite(deff_[k]))
      rep_.finite = false;
  }
  for (const auto &c : rep_.certificates) {
    if (c.kind == "rd-pair")
      continue;
    if (std::isnan(c.t_fire)) {
      rep_.certified = false;
      rep_.ambiguity_time += cfg_.T - c.t_merge;
    } else {
      rep_.ambiguity_time += c.t_fire - c.t_merge;
    }
  }
  if (!std::isfinite(rep_.l1) || !std::isfinite(rep_.l2))
    rep_.finite = false;
  rep_.final_state = snapshot(cfg_.T);
  rep_.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
  return std::move(rep_);
}

} // namespace

double GluedPieces::value(std::size_t piece, double x, double theta) const {
  const PieceInfo &in = info[piece];
  if (!in.step)
    return sols[in.sol].value(x, theta);
  const PieceSolution &r = ref.front();
  return rd_extension_surrogate(
      in.sur, [&](double y, double) { return r.value(y, theta); }, x, 0.0);
}

double GluedPieces::lip(std::size_t piece) const {
  const PieceInfo &in = info[piece];
  return in.step ? ref.front().lip() : sols[in.sol].lip();
}

double GluedSnapshot::operator()(double x) const {
  for (std::size_t g = 0; g < curve_x.size(); ++g)
    if (curve_x[g] > x)
      return pieces.value(left_piece[g], x);
  return pieces.value(last_piece, x);
}

std::vector<double> GluedSnapshot::breakpoints(double lo, double hi) const {
  std::vector<double> pts{lo, hi};
  for (double x : curve_x)
    if (x > lo && x < hi)
      pts.push_back(x);
  auto add_grid = [&](const Grid &g, double shift) {
    const double a = std::max(0.0, std::ceil((lo - shift - g.x_lo) / g.h - 0.5));
    const double b = std::min(double(g.n - 1), std::floor((hi - shift - g.x_lo) / g.h - 0.5));
    for (double q = a; q <= b; q += 1)
      pts.push_back(g.center(std::size_t(q)) + shift);
  };
  if (!pieces.sols.empty())
    add_grid(pieces.sols.front().grid(), 0.0);
  if (!pieces.ref.empty())
    for (const auto &in : pieces.info)
      if (in.step) {
        add_grid(pieces.ref.front().grid(), in.sur.shift_lambda);
        add_grid(pieces.ref.front().grid(), in.sur.shift_p);
      }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  while (!pts.empty() && pts.front() < lo)
    pts.erase(pts.begin());
  while (!pts.empty() && pts.back() > hi)
    pts.pop_back();
  return pts;
}

RunReport run_rung(const RunConfig &cfg, const RunHooks &hooks) {
  Engine e(cfg, hooks);
  return e.run();
}

InitialErrors initial_errors(const SegmentedProfile &exact, const DiscreteProfile &dp,
                             const EntropyPair<double> &e) {
  std::vector<double> pts;
  for (const auto &p : exact.pieces)
    for (const auto &s : p.segs)
      for (double x : {s.a, s.b})
        if (std::isfinite(x))
          pts.push_back(x);
  for (const auto &p : dp.pieces)
    for (double x : {p.a, p.b})
      if (std::isfinite(x))
        pts.push_back(x);
  for (double x : dp.x)
    pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  InitialErrors out;
  for (std::size_t q = 0; q + 1 < pts.size(); ++q) {
    const double a = pts[q], b = pts[q + 1];
    const double xm = 0.5 * (a + b);
    const auto piece = std::size_t(std::upper_bound(dp.x.begin(), dp.x.end(), xm) - dp.x.begin());
    const bool nnd = !dp.pieces[piece].is_step;
    const double l2 = gauss5(a, b, [&](double x) {
      const double d = exact(x) - dp(x);
      return d * d;
    });
    const double eta = gauss5(a, b, [&](double x) {
      return relative_entropy(e, exact(x), dp(x));
    });
    out.l2 += l2;
    out.eta += eta;
    if (nnd) {
      out.l2_nnd += l2;
      out.eta_nnd += eta;
    }
  }
  return out;
}

PieceSolution fine_reference(const RunConfig &cfg, std::size_t mult) {
  if (mult < 1)
    throw std::invalid_argument("fine_reference: multiplier must be >= 1");
  if (cfg.segments.empty())
    throw std::invalid_argument("fine_reference: no segments");
  double band = 0;
  for (const Segment &s : cfg.segments)
    for (double x : {s.a, s.b})
      band = std::max(band, std::abs(std::isfinite(x) ? s(x) : s.c0));
  const Model<double> m = model_by_name(cfg.model, std::max(band, 1e-3));
  const double hf = (cfg.x_hi - cfg.x_lo) / double(cfg.cells * mult);
  const double reach = m.k.sup_dA * cfg.T * 1.05 + 8 * hf;
  const Grid g = Grid::covering(cfg.x_lo - reach, cfg.x_hi + reach, hf, m.k.sup_dA, cfg.cfl);
  // exact cell averages, so jumps in the data stay sharp
  VecX<double> avg = VecX<double>::Zero(Eigen::Index(g.n));
  for (std::size_t j = 0; j < g.n; ++j) {
    const double l = g.center(j) - 0.5 * g.h, r = l + g.h;
    double sum = 0;
    for (const Segment &s : cfg.segments) {
      const double a = std::max(l, s.a), b = std::min(r, s.b);
      if (b > a)
        sum += s.c0 * (b - a) + 0.5 * s.c1 * (b * b - a * a);
    }
    avg[Eigen::Index(j)] = sum / g.h;
  }
  PieceSolution sol(m.law, g, std::move(avg));
  while (sol.t() < cfg.T * (1 - 1e-14))
    sol.step(std::min(g.dt, cfg.T - sol.t()));
  return sol;
}

double l1_against(const GluedSnapshot &s, const PieceSolution &fine, double lo,
                  double hi) {
  std::vector<double> pts = s.breakpoints(lo, hi);
  const Grid &g = fine.grid();
  const double a = std::max(0.0, std::ceil((lo - g.x_lo) / g.h - 0.5));
  const double b = std::min(double(g.n - 1), std::floor((hi - g.x_lo) / g.h - 0.5));
  for (double q = a; q <= b; q += 1)
    pts.push_back(g.center(std::size_t(q)));
  std::sort(pts.begin(), pts.end());
  double sum = 0;
  for (std::size_t q = 0; q + 1 < pts.size(); ++q) {
    const double u = pts[q], v = pts[q + 1], len = v - u;
    if (!(len > 0))
      continue;
    // both sides are affine inside; extrapolate from interior samples
    const double x1 = u + 0.25 * len, x2 = u + 0.75 * len;
    const double f1 = s(x1) - fine.value(x1), f2 = s(x2) - fine.value(x2);
    const double fa = 1.5 * f1 - 0.5 * f2, fb = 1.5 * f2 - 0.5 * f1;
    sum += abs_linear(fa, fb, len);
  }
  return sum;
}

} // namespace shiftest
