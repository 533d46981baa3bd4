#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace shiftest {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Cap on the extension run lengths x_I - x_i and x_{i-1} - x_J.
constexpr double kRunCap = 1.0;

/// Affine segment c0 + c1 x on (a, b).
struct Segment {
  double a = -kInf, b = kInf;
  double c0 = 0, c1 = 0;
  double operator()(double x) const { return c0 + c1 * x; }
};

enum class PieceClass { NND, RD };

/// A continuous run of affine segments sharing one class.
struct ProfilePiece {
  std::vector<Segment> segs;
  PieceClass cls = PieceClass::NND;

  double a() const { return segs.front().a; }
  double b() const { return segs.back().b; }
  double operator()(double x) const;
  double left_value() const { return segs.front()(segs.front().a); }
  double right_value() const { return segs.back()(segs.back().b); }
  double left_slope() const { return segs.front().c1; }
  double right_slope() const { return segs.back().c1; }
  double lip() const;
  double sup() const;
  double inf() const;
};

struct SegmentedProfile {
  std::vector<ProfilePiece> pieces;
  double eps = 0.5;

  std::size_t n_breaks() const { return pieces.empty() ? 0 : pieces.size() - 1; }
  double breakpoint(std::size_t i) const { return pieces[i].b(); }
  double operator()(double x) const;
};

/// Labels each affine segment and merges continuous same-class neighbours.
SegmentedProfile classify(const std::vector<Segment> &segments, double eps);

struct StepApproximation {
  std::size_t parent = 0;
  double delta = 0;
  double width = 0;
  std::vector<double> plateaus;
  std::vector<double> edges; // n+1 positions, first = parent a, last = parent b
  bool single_step_warning = false;
};

StepApproximation discretize_rd(const ProfilePiece &seg, std::size_t parent,
                                double delta);

double slope_m(const SegmentedProfile &profile);

enum class ShockClass { Large, Boundary, FrontTracking };

/// One piece of the discontinuous initial data used to build the glued solution.
struct DiscretePiece {
  bool is_step = false;
  ProfilePiece nnd;      // valid when !is_step
  double plateau = 0;    // valid when is_step
  double a = -kInf, b = kInf;
  std::size_t parent = 0; // index in the classified profile
  int region = -1;        // RD region id for steps

  double operator()(double x) const { return is_step ? plateau : nnd(x); }
  double left_value() const { return is_step ? plateau : nnd.left_value(); }
  double right_value() const { return is_step ? plateau : nnd.right_value(); }
  double left_slope() const { return is_step ? 0.0 : nnd.left_slope(); }
  double right_slope() const { return is_step ? 0.0 : nnd.right_slope(); }
  double sup() const { return is_step ? plateau : nnd.sup(); }
  double inf() const { return is_step ? plateau : nnd.inf(); }
};

/// Initial data with every rapidly decreasing piece replaced by steps.
struct DiscreteProfile {
  std::vector<DiscretePiece> pieces; // N+1 pieces
  std::vector<double> x;             // N breakpoints
  std::vector<ShockClass> shock_class;
  std::vector<StepApproximation> steps; // one per RD region
  double eps = 0.5;
  double delta = 0;

  std::size_t N() const { return x.size(); }
  double jump(std::size_t i) const {
    return pieces[i].right_value() - pieces[i + 1].left_value();
  }
  double operator()(double x) const;
};

DiscreteProfile discretize(const SegmentedProfile &profile, double delta);

/// Slope cap over the pieces of the discretized data; steps count as flat.
double slope_m(const DiscreteProfile &profile);

/// Piecewise-linear function, constant beyond the first and last nodes.
struct PLFunction {
  std::vector<double> x, y;
  double operator()(double s) const;
  double lip() const;
  double min_slope() const;
};

struct Extension {
  PLFunction v;
  double xL = -kInf, xJ = -kInf, xI = kInf, xR = kInf;
  double lower = -kInf, upper = kInf;
};

struct ExtensionSet {
  std::vector<Extension> ext;
  double M = 1;
  double min_ordering_margin = kInf; // min over pairs of (v_i - v_{i+1}) - jump/2
};

/// Builds v_1 .. v_{N+1}; throws std::logic_error if the ordering fails.
ExtensionSet build_extensions(const DiscreteProfile &profile, double M);

/// Parameters of the clamped numerical surrogate of an RD step extension.
struct StepSurrogate {
  double plateau = 0;
  double upper = 0, lower = 0;
  double shift_lambda = 0; // Lambda_i(x,t) = ref(x - shift_lambda, t)
  double shift_p = 0;      // P_i(x,t) = ref(x - shift_p, t)
  double gap_left = 0;     // x_{i-1} - x_J
  double gap_right = 0;    // x_I - x_i
};

/// ref is the line solution with data M x.
StepSurrogate make_step_surrogate(const DiscreteProfile &profile,
                                  const ExtensionSet &ext, std::size_t piece);

/// min{upper, max{P, min{plateau, Lambda}, lower}} with the translated
/// reference solution; ref(x, t) evaluates the reference line solution.
template <typename F>
double rd_extension_surrogate(const StepSurrogate &s, F &&ref, double x,
                              double t) {
  const double lam = ref(x - s.shift_lambda, t);
  const double p = ref(x - s.shift_p, t);
  return std::min(s.upper, std::max({p, std::min(s.plateau, lam), s.lower}));
}

/// Which branch of the surrogate is active: 0 constant, 1 Lambda, 2 P.
template <typename F>
int rd_surrogate_branch(const StepSurrogate &s, F &&ref, double x, double t) {
  const double lam = ref(x - s.shift_lambda, t);
  const double p = ref(x - s.shift_p, t);
  const double mid = std::min(s.plateau, lam);
  const double inner = std::max({p, mid, s.lower});
  if (inner >= s.upper)
    return 0;
  if (inner == p && p > mid && p > s.lower)
    return 2;
  if (inner == lam && lam < s.plateau && lam > s.lower)
    return 1;
  return 0;
}

/// Range of values reached by all extensions.
double extension_value_bound(const ExtensionSet &ext);

} // namespace shiftest
