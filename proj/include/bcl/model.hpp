#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcl/rng.hpp"

namespace bcl {

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ModelParams {
  double beta = 1.0;
  double lambda = 0.0;
  double alpha = 1.0;
  double gamma = 1.0;
  double kappa = 0.5;
  double delta = 0.0;
  int n = 32;
};

struct DerivedParams {
  double rho = 0.0;     // site mean (lambda+1)/beta
  double sigma2 = 0.0;  // site variance (lambda+1)/beta^2
  double c_n = 0.0;     // frame velocity 2 alpha rho n^{2-kappa}
};

void validate(const ModelParams& p);
DerivedParams derive_params(const ModelParams& p);

// n^{-kappa} etc. are used all over the place
double npow(const ModelParams& p, double exponent);

// Lattice window [x_lo, x_lo + size - 1], periodic.
struct Window {
  std::int64_t x_lo = 0;
  std::int64_t size = 0;
  std::int64_t x_hi() const { return x_lo + size - 1; }
};

// Covers the frame displacement c_n T plus a buffer of `buffer` n sites on
// both sides of the frame origin.
Window make_window(const ModelParams& p, double t_macro_max, int buffer = 10);

struct ChainState {
  std::int64_t x_lo = 0;
  std::vector<double> sites;
  double tau = 0.0;
  bool periodic = true;

  std::int64_t size() const { return static_cast<std::int64_t>(sites.size()); }
  std::int64_t x_hi() const { return x_lo + size() - 1; }
  std::size_t index(std::int64_t x) const {
    std::int64_t i = (x - x_lo) % size();
    if (i < 0) i += size();
    return static_cast<std::size_t>(i);
  }
  double& at(std::int64_t x) { return sites[index(x)]; }
  double at(std::int64_t x) const { return sites[index(x)]; }
};

ChainState sample_gibbs(const ModelParams& p, const Window& w, Rng& rng);
ChainState constant_state(const Window& w, double value);

// W'(u) for W(u) = beta u - lambda log u.
double potential_grad(double u, const ModelParams& p);

// CDF of Gamma(lambda+1, beta), the one-site marginal.
double gibbs_cdf(double x, const ModelParams& p);

}  // namespace bcl
