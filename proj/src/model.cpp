#include "shiftest/model.hpp"

namespace shiftest {

Model<double> burgers_model(double band) {
  Model<double> m;
  m.name = "burgers";
  m.law = make_law(Polynomial<double>{0.0, 0.0, 0.5}, band, true);
  m.entropy = make_entropy(Polynomial<double>{0.0, 0.0, 0.5}, m.law);
  m.k = model_constants(m.law, m.entropy);
  return m;
}

Model<double> polynomial_model(const std::vector<double> &flux,
                               const std::vector<double> &entropy, double band) {
  if (flux.size() < 3 || entropy.size() < 3)
    throw std::invalid_argument("flux and entropy need degree >= 2");
  VecX<double> a = Eigen::Map<const VecX<double>>(flux.data(), flux.size());
  VecX<double> e = Eigen::Map<const VecX<double>>(entropy.data(), entropy.size());
  Model<double> m;
  m.name = "polynomial";
  const bool burgers = flux.size() == 3 && flux[0] == 0 && flux[1] == 0 &&
                       flux[2] == 0.5;
  m.law = make_law(Polynomial<double>(a), band, burgers);
  m.entropy = make_entropy(Polynomial<double>(e), m.law);
  m.k = model_constants(m.law, m.entropy);
  return m;
}

Model<double> model_by_name(const std::string &name, double band) {
  if (name == "burgers")
    return burgers_model(band);
  throw std::invalid_argument("unknown model: " + name);
}

double gronwall_constant(const ModelConstants<double> &k, double neg_slope) {
  // Relative entropy is sandwiched by c*, c**; R eta''(u - psi) is split by
  // Young, and the A(u|psi) term is weighted by the negative slope part.
  return std::max(1.0, k.cstarstar) / k.cstar *
         (1.0 + 0.5 * k.hmax * k.hmax + 0.5 * k.amax * neg_slope);
}

} // namespace shiftest
