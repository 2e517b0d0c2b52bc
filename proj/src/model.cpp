#include "bcl/model.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

namespace bcl {

void validate(const ModelParams& p) {
  if (!(p.beta > 0.0)) throw DomainError("beta: must be > 0");
  if (!(p.lambda > -1.0)) throw DomainError("lambda: must be > -1");
  if (!(p.gamma >= 0.0)) throw DomainError("gamma: must be >= 0");
  if (!(p.kappa >= 0.5)) throw DomainError("kappa: must be >= 1/2");
  if (p.n < 1) throw DomainError("n: must be >= 1");
  if (!std::isfinite(p.alpha) || !std::isfinite(p.delta))
    throw DomainError("alpha, delta: must be finite");
}

DerivedParams derive_params(const ModelParams& p) {
  validate(p);
  DerivedParams d;
  d.rho = (p.lambda + 1.0) / p.beta;
  d.sigma2 = (p.lambda + 1.0) / (p.beta * p.beta);
  d.c_n = 2.0 * p.alpha * d.rho * std::pow(static_cast<double>(p.n), 2.0 - p.kappa);
  return d;
}

double npow(const ModelParams& p, double exponent) {
  return std::pow(static_cast<double>(p.n), exponent);
}

Window make_window(const ModelParams& p, double t_macro_max, int buffer) {
  const DerivedParams d = derive_params(p);
  const double travel = d.c_n * t_macro_max;  // frame origin ends at -travel
  const auto pad = static_cast<std::int64_t>(buffer) * p.n;
  const auto left = static_cast<std::int64_t>(std::ceil(std::max(0.0, travel)));
  const auto right = static_cast<std::int64_t>(std::ceil(std::max(0.0, -travel)));
  Window w;
  w.x_lo = -left - pad;
  w.size = left + right + 2 * pad + 1;
  if (w.size < 3) w.size = 3;
  return w;
}

ChainState sample_gibbs(const ModelParams& p, const Window& w, Rng& rng) {
  validate(p);
  if (w.size < 1) throw DomainError("window: must be nonempty");
  ChainState s;
  s.x_lo = w.x_lo;
  s.sites.resize(static_cast<std::size_t>(w.size));
  for (auto& v : s.sites) v = gamma_variate(rng, p.lambda + 1.0, p.beta);
  return s;
}

ChainState constant_state(const Window& w, double value) {
  ChainState s;
  s.x_lo = w.x_lo;
  s.sites.assign(static_cast<std::size_t>(w.size), value);
  return s;
}

double potential_grad(double u, const ModelParams& p) {
  if (!(u > 0.0)) throw DomainError("potential_grad: u must be > 0");
  return p.beta - p.lambda / u;
}

double gibbs_cdf(double x, const ModelParams& p) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(p.lambda + 1.0, p.beta * x);
}

}  // namespace bcl
