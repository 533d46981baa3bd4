#include "shiftest/preprocess.hpp"

#include <algorithm>
#include <stdexcept>

namespace shiftest {

namespace {

double rel_tol(double a, double b) {
  return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

PieceClass label(const Segment &s, double eps) {
  return s.c1 > -eps ? PieceClass::NND : PieceClass::RD;
}

void push_node(PLFunction &f, double x, double y) {
  if (!f.x.empty() && x <= f.x.back() + 1e-15 * std::max(1.0, std::abs(x))) {
    f.y.back() = y;
    return;
  }
  f.x.push_back(x);
  f.y.push_back(y);
}

} // namespace

double ProfilePiece::operator()(double x) const {
  for (const auto &s : segs)
    if (x < s.b)
      return s(std::max(x, s.a));
  return segs.back()(std::min(x, segs.back().b));
}

double ProfilePiece::lip() const {
  double l = 0;
  for (const auto &s : segs)
    l = std::max(l, std::abs(s.c1));
  return l;
}

double ProfilePiece::sup() const {
  double v = -kInf;
  for (const auto &s : segs) {
    if (std::isfinite(s.a))
      v = std::max(v, s(s.a));
    if (std::isfinite(s.b))
      v = std::max(v, s(s.b));
    if (!std::isfinite(s.a) && !std::isfinite(s.b))
      v = std::max(v, s.c0);
  }
  return v;
}

double ProfilePiece::inf() const {
  double v = kInf;
  for (const auto &s : segs) {
    if (std::isfinite(s.a))
      v = std::min(v, s(s.a));
    if (std::isfinite(s.b))
      v = std::min(v, s(s.b));
    if (!std::isfinite(s.a) && !std::isfinite(s.b))
      v = std::min(v, s.c0);
  }
  return v;
}

double SegmentedProfile::operator()(double x) const {
  for (const auto &p : pieces)
    if (x < p.b())
      return p(x);
  return pieces.back()(x);
}

SegmentedProfile classify(const std::vector<Segment> &segments, double eps) {
  if (!(eps > 0))
    throw std::invalid_argument("classify: epsilon must be > 0");
  if (segments.empty())
    throw std::invalid_argument("classify: empty profile");
  std::vector<Segment> segs = segments;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (!(segs[k].a < segs[k].b))
      throw std::invalid_argument("classify: empty segment interval");
    if (k + 1 < segs.size() && segs[k].b != segs[k + 1].a)
      throw std::invalid_argument("classify: segments must be contiguous");
  }
  // Outermost segments must be constant; they are continued to infinity.
  if (segs.front().c1 != 0 || segs.back().c1 != 0)
    throw std::invalid_argument("classify: outermost segments must be constant");
  segs.front().a = -kInf;
  segs.back().b = kInf;

  SegmentedProfile out;
  out.eps = eps;
  ProfilePiece cur;
  cur.segs.push_back(segs[0]);
  cur.cls = label(segs[0], eps);
  for (std::size_t k = 1; k < segs.size(); ++k) {
    const Segment &prev = segs[k - 1], &s = segs[k];
    const double vl = prev(prev.b), vr = s(s.a);
    if (vr > vl + rel_tol(vl, vr))
      throw std::invalid_argument("classify: up-jump at x = " +
                                  std::to_string(s.a));
    const PieceClass c = label(s, eps);
    const bool continuous = std::abs(vl - vr) <= rel_tol(vl, vr);
    if (continuous && c == cur.cls) {
      cur.segs.push_back(s);
      continue;
    }
    out.pieces.push_back(cur);
    cur = ProfilePiece{};
    cur.segs.push_back(s);
    cur.cls = c;
  }
  out.pieces.push_back(cur);
  return out;
}

StepApproximation discretize_rd(const ProfilePiece &seg, std::size_t parent,
                                double delta) {
  if (!(delta > 0))
    throw std::invalid_argument("discretize_rd: delta must be > 0");
  if (seg.cls != PieceClass::RD)
    throw std::invalid_argument("discretize_rd: piece is not rapidly decreasing");
  const double a = seg.a(), b = seg.b(), len = b - a;
  if (!std::isfinite(len))
    throw std::invalid_argument("discretize_rd: unbounded piece");
  StepApproximation st;
  st.parent = parent;
  st.delta = delta;
  std::size_t n = 1;
  if (delta < len)
    n = static_cast<std::size_t>(std::ceil(len / delta * (1 - 1e-12)));
  else
    st.single_step_warning = delta > len * (1 + 1e-12);
  st.width = len / static_cast<double>(n);
  st.edges.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    st.edges[k] = a + st.width * static_cast<double>(k);
  st.edges[n] = b;
  st.plateaus.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    st.plateaus[k] = seg(0.5 * (st.edges[k] + st.edges[k + 1]));
  return st;
}

double slope_m(const SegmentedProfile &profile) {
  double m = 1.0;
  for (const auto &p : profile.pieces)
    m = std::max(m, p.lip());
  return m;
}

double slope_m(const DiscreteProfile &profile) {
  double m = 1.0;
  for (const auto &p : profile.pieces)
    if (!p.is_step)
      m = std::max(m, p.nnd.lip());
  return m;
}

double DiscreteProfile::operator()(double s) const {
  const auto it = std::upper_bound(x.begin(), x.end(), s);
  return pieces[static_cast<std::size_t>(it - x.begin())](s);
}

DiscreteProfile discretize(const SegmentedProfile &profile, double delta) {
  DiscreteProfile d;
  d.eps = profile.eps;
  d.delta = delta;
  for (std::size_t p = 0; p < profile.pieces.size(); ++p) {
    const ProfilePiece &pc = profile.pieces[p];
    if (p > 0)
      d.x.push_back(pc.a());
    if (pc.cls == PieceClass::NND) {
      DiscretePiece dp;
      dp.nnd = pc;
      dp.a = pc.a();
      dp.b = pc.b();
      dp.parent = p;
      d.pieces.push_back(dp);
      continue;
    }
    StepApproximation st = discretize_rd(pc, p, delta);
    const int region = static_cast<int>(d.steps.size());
    for (std::size_t k = 0; k < st.plateaus.size(); ++k) {
      if (k > 0)
        d.x.push_back(st.edges[k]);
      DiscretePiece dp;
      dp.is_step = true;
      dp.plateau = st.plateaus[k];
      dp.a = st.edges[k];
      dp.b = st.edges[k + 1];
      dp.parent = p;
      dp.region = region;
      d.pieces.push_back(dp);
    }
    d.steps.push_back(std::move(st));
  }
  for (std::size_t i = 0; i < d.N(); ++i) {
    if (!(d.jump(i) > 0))
      throw std::invalid_argument("discretize: breakpoint without a down-jump at x = " +
                                  std::to_string(d.x[i]));
    const bool ls = d.pieces[i].is_step, rs = d.pieces[i + 1].is_step;
    d.shock_class.push_back(ls && rs   ? ShockClass::FrontTracking
                            : ls || rs ? ShockClass::Boundary
                                       : ShockClass::Large);
  }
  return d;
}

double PLFunction::operator()(double s) const {
  if (s <= x.front())
    return y.front();
  if (s >= x.back())
    return y.back();
  const auto k = static_cast<std::size_t>(
      std::upper_bound(x.begin(), x.end(), s) - x.begin());
  const double th = (s - x[k - 1]) / (x[k] - x[k - 1]);
  return y[k - 1] + th * (y[k] - y[k - 1]);
}

double PLFunction::lip() const {
  double l = 0;
  for (std::size_t k = 1; k < x.size(); ++k)
    l = std::max(l, std::abs((y[k] - y[k - 1]) / (x[k] - x[k - 1])));
  return l;
}

double PLFunction::min_slope() const {
  double l = 0;
  for (std::size_t k = 1; k < x.size(); ++k)
    l = std::min(l, (y[k] - y[k - 1]) / (x[k] - x[k - 1]));
  return l;
}

ExtensionSet build_extensions(const DiscreteProfile &profile, double M) {
  if (!(M >= 1))
    throw std::invalid_argument("build_extensions: slope M must be >= 1");
  const std::size_t N = profile.N();
  const auto &pc = profile.pieces;
  const auto &x = profile.x;
  std::vector<double> jump(N), dm(N), dp(N), xI(N + 1, kInf), xJ(N + 1, -kInf);
  for (std::size_t k = 0; k < N; ++k) {
    jump[k] = profile.jump(k);
    dm[k] = pc[k].right_slope();
    dp[k] = pc[k + 1].left_slope();
    xI[k] = x[k] + std::min(kRunCap, jump[k] / (2 * (M + std::abs(dm[k]))));
    xJ[k + 1] = x[k] - std::min(kRunCap, jump[k] / (2 * (M + std::abs(dp[k]))));
  }

  ExtensionSet out;
  out.M = M;
  out.ext.resize(N + 1);
  for (std::size_t p = 0; p <= N; ++p) {
    Extension &e = out.ext[p];
    PLFunction &f = e.v;
    if (p > 0) {
      const double tl = pc[p].left_value() - (x[p - 1] - xJ[p]) * dp[p - 1];
      double inf_left = kInf, drop = 0;
      // Middle pieces take the infimum over (-inf, x_i), the last over (-inf, x_N).
      for (std::size_t q = 0; q <= std::min(p, N - 1); ++q)
        inf_left = std::min(inf_left, pc[q].inf());
      for (std::size_t q = 0; q < p; ++q)
        drop += jump[q];
      // The absolute value keeps this a downward offset for any slope sign.
      for (std::size_t q = 1; q < p; ++q)
        drop += (x[q - 1] - xJ[q]) * std::abs(dp[q - 1]);
      e.lower = std::min(tl, inf_left - drop);
      e.xJ = xJ[p];
      e.xL = e.xJ - (tl - e.lower) / M;
      push_node(f, e.xL, e.lower);
      push_node(f, e.xJ, tl);
    }
    if (pc[p].is_step) {
      push_node(f, pc[p].a, pc[p].plateau);
      push_node(f, pc[p].b, pc[p].plateau);
    } else {
      for (const auto &s : pc[p].nnd.segs) {
        if (std::isfinite(s.a))
          push_node(f, s.a, s(s.a));
        if (std::isfinite(s.b))
          push_node(f, s.b, s(s.b));
      }
    }
    if (p < N) {
      const double tr = pc[p].right_value() + (xI[p] - x[p]) * dm[p];
      double sup_right = -kInf, rise = 0;
      for (std::size_t q = p + 1; q <= N; ++q)
        sup_right = std::max(sup_right, pc[q].sup());
      for (std::size_t k = p; k < N; ++k)
        rise += jump[k];
      for (std::size_t q = p + 1; q < N; ++q)
        rise += (xI[q] - x[q]) * std::abs(dm[q]);
      e.upper = std::max(tr, sup_right + rise);
      e.xI = xI[p];
      e.xR = e.xI + (e.upper - tr) / M;
      push_node(f, e.xI, tr);
      push_node(f, e.xR, e.upper);
    }
    if (f.x.empty())
      push_node(f, 0.0, pc[p].sup());
  }

  // Ordering: the difference of two PL functions is extremal at their nodes.
  for (std::size_t i = 0; i < N; ++i) {
    const PLFunction &a = out.ext[i].v, &b = out.ext[i + 1].v;
    std::vector<double> nodes = a.x;
    nodes.insert(nodes.end(), b.x.begin(), b.x.end());
    double margin = kInf;
    for (double s : nodes)
      margin = std::min(margin, a(s) - b(s) - 0.5 * jump[i]);
    out.min_ordering_margin = std::min(out.min_ordering_margin, margin);
    if (margin < -1e-12 * std::max(1.0, jump[i]))
      throw std::logic_error("build_extensions: ordering violated between pieces " +
                             std::to_string(i) + " and " + std::to_string(i + 1));
  }
  return out;
}

StepSurrogate make_step_surrogate(const DiscreteProfile &profile,
                                  const ExtensionSet &ext, std::size_t piece) {
  const DiscretePiece &pc = profile.pieces.at(piece);
  if (!pc.is_step || piece == 0 || piece == profile.N())
    throw std::invalid_argument("make_step_surrogate: not an interior step");
  const Extension &e = ext.ext[piece];
  StepSurrogate s;
  s.plateau = pc.plateau;
  s.upper = e.upper;
  s.lower = e.lower;
  s.shift_lambda = e.xJ - pc.plateau / ext.M;
  s.shift_p = e.xI - pc.plateau / ext.M;
  s.gap_left = profile.x[piece - 1] - e.xJ;
  s.gap_right = e.xI - profile.x[piece];
  return s;
}

double extension_value_bound(const ExtensionSet &ext) {
  double b = 0;
  for (const auto &e : ext.ext)
    for (double y : e.v.y)
      b = std::max(b, std::abs(y));
  return b;
}

} // namespace shiftest
