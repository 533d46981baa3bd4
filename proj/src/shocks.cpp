#include "shiftest/shocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace shiftest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// cubic Hermite basis on s in [0, 1]
void hermite_basis(double s, double b[4], double d[4]) {
  const double s2 = s * s, s3 = s2 * s;
  b[0] = 2 * s3 - 3 * s2 + 1;
  b[1] = s3 - 2 * s2 + s;
  b[2] = -2 * s3 + 3 * s2;
  b[3] = s3 - s2;
  d[0] = 6 * s2 - 6 * s;
  d[1] = 3 * s2 - 4 * s + 1;
  d[2] = -6 * s2 + 6 * s;
  d[3] = 3 * s2 - 2 * s;
}

} // namespace

double CurveGroup::hermite(double theta, double dt) const {
  const double span = 1 - theta0;
  if (span <= 0 || theta <= theta0)
    return theta >= 1 ? x : x0;
  const double L = span * dt, s = (theta - theta0) / span;
  double b[4], d[4];
  hermite_basis(s, b, d);
  return b[0] * x0 + b[1] * L * s0 + b[2] * x + b[3] * L * speed;
}

double CurveGroup::hermite_speed(double theta, double dt) const {
  const double span = 1 - theta0;
  if (span <= 0 || theta <= theta0)
    return theta >= 1 ? speed : s0;
  const double L = span * dt, s = (theta - theta0) / span;
  double b[4], d[4];
  hermite_basis(s, b, d);
  return (d[0] * x0 + d[1] * L * s0 + d[2] * x + d[3] * L * speed) / L;
}

CurveSystem::CurveSystem(const ScalarLaw<double> &law, const std::vector<double> &x0)
    : law_(law) {
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (i > 0 && !(x0[i] > x0[i - 1]))
      throw std::invalid_argument("CurveSystem: positions must increase");
    CurveGroup g;
    g.first = g.last = i;
    g.x = g.x0 = x0[i];
    groups_.push_back(g);
  }
  rebuild_index();
}

void CurveSystem::rebuild_index() {
  group_of_.assign(groups_.empty() ? 0 : groups_.back().last + 1, 0);
  for (std::size_t g = 0; g < groups_.size(); ++g)
    for (std::size_t i = groups_[g].first; i <= groups_[g].last; ++i)
      group_of_[i] = g;
}

void CurveSystem::init(const PieceEval &v) {
  for (auto &g : groups_) {
    g.speed = g.s0 =
        rh_speed(law_, v(g.left_piece(), g.x, 0.0), v(g.right_piece(), g.x, 0.0));
    g.x0 = g.x;
    g.theta0 = 0;
  }
}

double CurveSystem::rk4(std::size_t L, std::size_t R, double x, double th0,
                        double dt, const PieceEval &v, double *end_speed) const {
  auto f = [&](double z, double th) {
    return rh_speed(law_, v(L, z, th), v(R, z, th));
  };
  const double H = (1 - th0) * dt, thm = 0.5 * (th0 + 1);
  const double k1 = f(x, th0);
  const double k2 = f(x + 0.5 * H * k1, thm);
  const double k3 = f(x + 0.5 * H * k2, thm);
  const double k4 = f(x + H * k3, 1.0);
  const double y = x + H / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  *end_speed = f(y, 1.0);
  return y;
}

std::vector<MergeEvent> CurveSystem::advance(double t0, double dt,
                                             const PieceEval &v) {
  if (!(dt > 0))
    throw std::invalid_argument("CurveSystem::advance: dt must be positive");
  dt_ = dt;
  for (auto &g : groups_) {
    g.theta0 = 0;
    g.x0 = g.x;
    g.s0 = g.speed;
    g.x = rk4(g.left_piece(), g.right_piece(), g.x0, 0.0, dt, v, &g.speed);
    if (!std::isfinite(g.x))
      throw std::runtime_error("CurveSystem: non-finite curve position");
  }

  std::vector<MergeEvent> events;
  for (;;) {
    // earliest contact of adjacent groups within the step
    double best = kInf;
    std::size_t best_g = 0;
    for (std::size_t g = 0; g + 1 < groups_.size(); ++g) {
      const CurveGroup &a = groups_[g], &b = groups_[g + 1];
      auto gap = [&](double th) { return b.hermite(th, dt) - a.hermite(th, dt); };
      const double start = std::max(a.theta0, b.theta0);
      if (start >= best)
        continue;
      double lo = start, hit = kNaN;
      if (gap(start) <= 0) {
        hit = start;
      } else {
        constexpr int kSamples = 8;
        for (int k = 1; k <= kSamples; ++k) {
          const double th = start + (1 - start) * k / kSamples;
          if (gap(th) <= 0) {
            double hi = th;
            for (int it = 0; it < 60; ++it) {
              const double mid = 0.5 * (lo + hi);
              (gap(mid) > 0 ? lo : hi) = mid;
            }
            hit = hi;
            break;
          }
          lo = th;
        }
      }
      if (!std::isnan(hit) && hit < best) {
        best = hit;
        best_g = g;
      }
    }
    if (!(best <= 1))
      break;

    const CurveGroup a = groups_[best_g], b = groups_[best_g + 1];
    events.push_back({t0 + best * dt, a.last, b.first});
    CurveGroup m;
    m.first = a.first;
    m.last = b.last;
    m.theta0 = best;
    m.x0 = a.hermite(best, dt);
    m.s0 = rh_speed(law_, v(m.left_piece(), m.x0, best),
                    v(m.right_piece(), m.x0, best));
    if (best < 1) {
      m.x = rk4(m.left_piece(), m.right_piece(), m.x0, best, dt, v, &m.speed);
    } else {
      m.x = m.x0;
      m.speed = m.s0;
    }
    groups_[best_g] = m;
    groups_.erase(groups_.begin() + std::ptrdiff_t(best_g) + 1);
  }
  rebuild_index();

  for (auto &g : groups_) {
    if (g.theta0 >= 1) {
      g.defect = 0;
      continue;
    }
    const double th = 0.5 * (g.theta0 + 1), z = g.hermite(th, dt);
    const double sig =
        rh_speed(law_, v(g.left_piece(), z, th), v(g.right_piece(), z, th));
    g.defect = std::abs(g.hermite_speed(th, dt) - sig);
  }
  return events;
}

double CurveSystem::position(std::size_t curve, double theta) const {
  const CurveGroup &g = group(curve);
  return g.hermite(std::max(theta, g.theta0), dt_);
}

std::size_t CurveSystem::piece_at(double x) const { return piece_at(x, 1.0); }

std::size_t CurveSystem::piece_at(double x, double theta) const {
  for (const auto &g : groups_)
    if (g.hermite(std::max(theta, g.theta0), dt_) > x)
      return g.left_piece();
  return groups_.empty() ? 0 : groups_.back().right_piece();
}

FrontTrack::FrontTrack(const ScalarLaw<double> &law, std::vector<double> values,
                       std::vector<double> fronts, std::vector<double> speed_error)
    : law_(law), u_(std::move(values)), x_(std::move(fronts)),
      err_(std::move(speed_error)) {
  if (u_.size() != x_.size() + 1)
    throw std::invalid_argument("FrontTrack: need one more value than fronts");
  if (err_.empty())
    err_.assign(x_.size(), 0.0);
  if (err_.size() != x_.size())
    throw std::invalid_argument("FrontTrack: one speed error per front");
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (!(u_[k] > u_[k + 1]))
      throw std::invalid_argument("FrontTrack: values must strictly decrease");
    if (k > 0 && !(x_[k] > x_[k - 1]))
      throw std::invalid_argument("FrontTrack: fronts must increase");
  }
}

double FrontTrack::speed(std::size_t k) const {
  return rh_speed(law_, u_[k], u_[k + 1]) + err_[k];
}

void FrontTrack::advance_to(double t) {
  if (t < t_)
    throw std::invalid_argument("FrontTrack: cannot go back in time");
  for (;;) {
    double tc = kInf;
    std::size_t kc = 0;
    for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
      const double ds = speed(k) - speed(k + 1);
      if (ds <= 0)
        continue;
      const double c = t_ + std::max(0.0, x_[k + 1] - x_[k]) / ds;
      if (c < tc) {
        tc = c;
        kc = k;
      }
    }
    const double stop = std::min(tc, t);
    for (std::size_t k = 0; k < x_.size(); ++k)
      x_[k] += speed(k) * (stop - t_);
    t_ = stop;
    if (tc > t)
      break;
    // merged front keeps the left error
    x_[kc + 1] = x_[kc];
    u_.erase(u_.begin() + std::ptrdiff_t(kc) + 1);
    x_.erase(x_.begin() + std::ptrdiff_t(kc) + 1);
    err_.erase(err_.begin() + std::ptrdiff_t(kc) + 1);
    ++events_;
  }
}

double FrontTrack::operator()(double x) const {
  const auto k = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
  return u_[std::size_t(k)];
}

double FrontTrack::discrete_slope(double delta) const {
  const std::size_t n = x_.size();
  if (n < 2)
    return kNaN;
  // inner plateau a in [1, n-1] covers [x_{a-1}, x_a]
  double best = kInf;
  const double min_len = delta * (1 + 1e-12); // steps exactly delta wide do not count
  for (std::size_t a = 1; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      const double len = x_[b] - x_[a - 1];
      if (len > min_len)
        best = std::min(best, (u_[a] - u_[b]) / len);
    }
  return best;
}

FrontTrack FrontTrack::clipped(std::size_t p, std::size_t q) const {
  if (p > q || q >= x_.size())
    throw std::invalid_argument("FrontTrack::clipped: bad front range");
  FrontTrack out(law_,
                 std::vector<double>(u_.begin() + std::ptrdiff_t(p),
                                     u_.begin() + std::ptrdiff_t(q) + 2),
                 std::vector<double>(x_.begin() + std::ptrdiff_t(p),
                                     x_.begin() + std::ptrdiff_t(q) + 1),
                 std::vector<double>(err_.begin() + std::ptrdiff_t(p),
                                     err_.begin() + std::ptrdiff_t(q) + 1));
  out.t_ = t_;
  return out;
}

double l1_distance(const FrontTrack &a, const FrontTrack &b) {
  if (a.values().front() != b.values().front() ||
      a.values().back() != b.values().back())
    return kInf;
  std::vector<double> pts(a.positions());
  pts.insert(pts.end(), b.positions().begin(), b.positions().end());
  std::sort(pts.begin(), pts.end());
  double sum = 0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double len = pts[k + 1] - pts[k];
    if (len <= 0)
      continue;
    const double mid = 0.5 * (pts[k] + pts[k + 1]);
    sum += std::abs(a(mid) - b(mid)) * len;
  }
  return sum;
}

void write_trajectory_header(std::ostream &os, std::size_t n) {
  os << "t";
  for (std::size_t i = 0; i < n; ++i)
    os << ",h" << i + 1;
  for (std::size_t i = 0; i < n; ++i)
    os << ",g" << i + 1;
  os << '\n';
}

void write_trajectory_row(std::ostream &os, double t, const CurveSystem &cs) {
  os.precision(12);
  os << t;
  for (std::size_t i = 0; i < cs.size(); ++i)
    os << ',' << cs.position(i);
  for (std::size_t i = 0; i < cs.size(); ++i)
    os << ',' << cs.group(i).first + 1;
  os << '\n';
}

} // namespace shiftest
