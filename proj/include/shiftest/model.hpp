#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace shiftest {

template <typename T> using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Polynomial with coefficients stored lowest degree first.
template <typename T> class Polynomial {
public:
  Polynomial() : c_(VecX<T>::Zero(1)) {}
  explicit Polynomial(VecX<T> c) : c_(std::move(c)) {
    if (c_.size() == 0)
      c_ = VecX<T>::Zero(1);
  }
  Polynomial(std::initializer_list<T> c) : c_(static_cast<Eigen::Index>(c.size())) {
    Eigen::Index k = 0;
    for (T v : c)
      c_(k++) = v;
    if (c_.size() == 0)
      c_ = VecX<T>::Zero(1);
  }

  T operator()(T x) const {
    T r = c_(c_.size() - 1);
    for (Eigen::Index k = c_.size() - 2; k >= 0; --k)
      r = r * x + c_(k);
    return r;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1)
      return Polynomial();
    VecX<T> d(c_.size() - 1);
    for (Eigen::Index k = 1; k < c_.size(); ++k)
      d(k - 1) = T(k) * c_(k);
    return Polynomial(d);
  }

  /// Antiderivative vanishing at 0.
  Polynomial antiderivative() const {
    VecX<T> a = VecX<T>::Zero(c_.size() + 1);
    for (Eigen::Index k = 0; k < c_.size(); ++k)
      a(k + 1) = c_(k) / T(k + 1);
    return Polynomial(a);
  }

  Polynomial operator*(const Polynomial &o) const {
    VecX<T> p = VecX<T>::Zero(c_.size() + o.c_.size() - 1);
    for (Eigen::Index i = 0; i < c_.size(); ++i)
      for (Eigen::Index j = 0; j < o.c_.size(); ++j)
        p(i + j) += c_(i) * o.c_(j);
    return Polynomial(p);
  }

  const VecX<T> &coeffs() const { return c_; }
  Eigen::Index degree() const { return c_.size() - 1; }

private:
  VecX<T> c_;
};

/// Flux A with derivatives on the value band [-B, B].
template <typename T> struct ScalarLaw {
  Polynomial<T> A, dA, ddA;
  T band = T(1);
  /// Minimiser of A on the real line (where A' = 0); infinite if A' has no root.
  T sonic = std::numeric_limits<T>::infinity();
  /// Burgers flux: exposes closed forms to the hot loops.
  bool is_burgers = false;
};

template <typename T> struct EntropyPair {
  Polynomial<T> eta, deta, ddeta, q;
};

template <typename T> struct ModelConstants {
  T sup_dA = 0;     // sup |A'|
  T info_speed = 0; // s
  T amax = 0;       // sup A''
  T amin = 0;       // inf A''
  T hmin = 0;       // inf eta''
  T hmax = 0;       // sup eta''
  T cstar = 0;
  T cstarstar = 0;
  T diss_c = 0;
};

template <typename T> struct Model {
  ScalarLaw<T> law;
  EntropyPair<T> entropy;
  ModelConstants<T> k;
  std::string name;
};

namespace detail {

template <typename T> T find_sonic(const Polynomial<T> &dA, T band) {
  // A' is increasing for convex A, so bisection on a bracketing interval.
  T lo = -band, hi = band;
  if (dA(lo) > 0 || dA(hi) < 0)
    return dA(lo) > 0 ? -std::numeric_limits<T>::infinity()
                      : std::numeric_limits<T>::infinity();
  for (int it = 0; it < 200; ++it) {
    T mid = T(0.5) * (lo + hi);
    (dA(mid) > 0 ? hi : lo) = mid;
  }
  return T(0.5) * (lo + hi);
}

} // namespace detail

template <typename T>
ScalarLaw<T> make_law(const Polynomial<T> &A, T band, bool burgers = false) {
  ScalarLaw<T> law;
  law.A = A;
  law.dA = A.derivative();
  law.ddA = law.dA.derivative();
  law.band = band;
  law.sonic = detail::find_sonic(law.dA, band);
  law.is_burgers = burgers;
  return law;
}

template <typename T>
EntropyPair<T> make_entropy(const Polynomial<T> &eta, const ScalarLaw<T> &law) {
  EntropyPair<T> e;
  e.eta = eta;
  e.deta = eta.derivative();
  e.ddeta = e.deta.derivative();
  e.q = (e.deta * law.dA).antiderivative();
  return e;
}

/// Rankine-Hugoniot speed; A'(w) on the diagonal.
template <typename T> T rh_speed(const ScalarLaw<T> &law, T v, T w) {
  if (law.is_burgers)
    return T(0.5) * (v + w);
  if (v == w)
    return law.dA(w);
  return (law.A(v) - law.A(w)) / (v - w);
}

template <typename T> T relative_entropy(const EntropyPair<T> &e, T a, T b) {
  return e.eta(a) - e.eta(b) - e.deta(b) * (a - b);
}

/// A(a|b)
template <typename T> T relative_flux(const ScalarLaw<T> &law, T a, T b) {
  return law.A(a) - law.A(b) - law.dA(b) * (a - b);
}

/// q(a;b)
template <typename T>
T relative_entropy_flux(const ScalarLaw<T> &law, const EntropyPair<T> &e, T a,
                        T b) {
  return e.q(a) - e.q(b) - e.deta(b) * (law.A(a) - law.A(b));
}

/// Left side of the shifted-shock dissipation inequality.
template <typename T>
T dissipation_lhs(const ScalarLaw<T> &law, const EntropyPair<T> &e, T u_plus,
                  T u_minus, T ub_plus, T ub_minus) {
  const T sig = rh_speed(law, u_plus, u_minus);
  return relative_entropy_flux(law, e, u_plus, ub_plus) -
         relative_entropy_flux(law, e, u_minus, ub_minus) -
         sig * (relative_entropy(e, u_plus, ub_plus) -
                relative_entropy(e, u_minus, ub_minus));
}

/// Right side -(1/12) inf A'' inf eta'' s ((u+ - ub+)^2 + (u- - ub-)^2).
template <typename T>
T dissipation_bound(const ModelConstants<T> &k, T u_plus, T u_minus, T ub_plus,
                    T ub_minus, T shock_floor) {
  if (!(shock_floor > 0))
    throw std::invalid_argument("dissipation_bound: shock floor must be > 0");
  if (u_minus < u_plus)
    throw std::invalid_argument("dissipation_bound: need u_minus >= u_plus");
  if (ub_minus - ub_plus < shock_floor)
    throw std::invalid_argument("dissipation_bound: ub gap below shock floor");
  const T dp = u_plus - ub_plus, dm = u_minus - ub_minus;
  return -k.amin * k.hmin * shock_floor * (dp * dp + dm * dm) / T(12);
}

/// Samples the band to fix every derived constant.
template <typename T>
ModelConstants<T> model_constants(const ScalarLaw<T> &law,
                                  const EntropyPair<T> &e, int samples = 801) {
  const T B = law.band;
  ModelConstants<T> k;
  k.amin = std::numeric_limits<T>::infinity();
  k.hmin = std::numeric_limits<T>::infinity();
  k.cstar = std::numeric_limits<T>::infinity();
  k.amax = k.hmax = k.sup_dA = k.cstarstar = 0;
  std::vector<T> grid(samples);
  for (int i = 0; i < samples; ++i)
    grid[i] = -B + T(2) * B * T(i) / T(samples - 1);
  for (T u : grid) {
    const T a2 = law.ddA(u), h2 = e.ddeta(u);
    if (!(a2 > 0))
      throw std::invalid_argument("flux is not strictly convex on the band");
    if (!(h2 > 0))
      throw std::invalid_argument("entropy is not strictly convex on the band");
    k.amin = std::min(k.amin, a2);
    k.amax = std::max(k.amax, a2);
    k.hmin = std::min(k.hmin, h2);
    k.hmax = std::max(k.hmax, h2);
    k.sup_dA = std::max(k.sup_dA, std::abs(law.dA(u)));
  }
  // eta(a|b)/(a-b)^2 lies between inf and sup of eta''/2; sampling refines it.
  T ratio_q = 0;
  const int m = std::min(samples, 201);
  for (int i = 0; i < m; ++i) {
    const T a = -B + T(2) * B * T(i) / T(m - 1);
    for (int j = 0; j < m; ++j) {
      const T b = -B + T(2) * B * T(j) / T(m - 1);
      if (i == j)
        continue;
      const T eta_ab = relative_entropy(e, a, b);
      const T d2 = (a - b) * (a - b);
      k.cstar = std::min(k.cstar, eta_ab / d2);
      k.cstarstar = std::max(k.cstarstar, eta_ab / d2);
      ratio_q =
          std::max(ratio_q, std::abs(relative_entropy_flux(law, e, a, b)) / eta_ab);
    }
  }
  k.cstar = std::min(k.cstar, T(0.5) * k.hmin);
  k.cstarstar = std::max(k.cstarstar, T(0.5) * k.hmax);
  k.info_speed = T(1.05) * ratio_q;
  k.diss_c = k.amin * k.hmin / (T(24) * k.amax);
  return k;
}

/// Builds "burgers" (A = u^2/2, eta = u^2/2) on band [-B, B].
Model<double> burgers_model(double band);

/// Builds a model from polynomial coefficients (lowest degree first).
Model<double> polynomial_model(const std::vector<double> &flux,
                               const std::vector<double> &entropy, double band);

/// Name lookup; only "burgers" is predefined.
Model<double> model_by_name(const std::string &name, double band);

/// Gronwall-type constant C of the L2 stability estimate.
/// neg_slope is ||[d/dx eta'(psi)]_-||_inf.
double gronwall_constant(const ModelConstants<double> &k, double neg_slope);

} // namespace shiftest
