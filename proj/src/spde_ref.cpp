#include "bcl/spde_ref.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>
#include <fftw3.h>

#include "bcl/quadrature.hpp"

namespace bcl {

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

double integrate_split(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(hi > lo)) return 0.0;
  if (lo < 0.0 && hi > 0.0) return integrate(f, lo, -0.0, tol) + integrate(f, 0.0, hi, tol);
  return integrate(f, lo, hi, tol);
}

}  // namespace

const char* to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::dirichlet ? "dirichlet" : "full_line";
}

double heat_kernel_full(double t, double u, double v, double a) {
  const double s = 4.0 * a * t;
  return std::exp(-(u - v) * (u - v) / s) / std::sqrt(std::numbers::pi * s);
}

double heat_kernel_dirichlet(double t, double u, double v, double a) {
  const bool su = std::signbit(u), sv = std::signbit(v);
  if (su != sv || u == 0.0 || v == 0.0) return 0.0;
  return heat_kernel_full(t, u, v, a) - heat_kernel_full(t, u, -v, a);
}

double dirichlet_series_kernel(double t, double u, double v, double a, double L, int modes) {
  double s = 0.0;
  for (int k = modes; k >= 1; --k) {
    const double q = k * std::numbers::pi / L;
    s += std::exp(-a * q * q * t) * std::sin(q * u) * std::sin(q * v);
  }
  return 2.0 / L * s;
}

double image_kernel_discrepancy() {
  const double ts[] = {0.01, 0.03, 0.1, 0.3, 1.0};
  const double us[] = {0.02, 0.1, 0.3, 0.7, 1.0, 1.6, 2.5};
  double worst = 0.0;
  for (double t : ts)
    for (double u : us)
      for (double v : us) {
        const double img = heat_kernel_dirichlet(t, u, v, 1.0);
        const double ser = dirichlet_series_kernel(t, u, v, 1.0, 40.0, 2500);
        worst = std::max(worst, std::abs(img - ser));
      }
  return worst;
}

void validate_image_kernel() {
  static std::once_flag once;
  std::call_once(once, [] {
    const double d = image_kernel_discrepancy();
    if (!(d <= 1e-6))
      throw std::logic_error("Dirichlet image kernel disagrees with the sine series by " +
                             std::to_string(d));
  });
}

double HeatKernel::operator()(double t, double u, double v) const {
  return bc == BoundaryCondition::dirichlet ? heat_kernel_dirichlet(t, u, v, a)
                                            : heat_kernel_full(t, u, v, a);
}

Profile profile(const TestFunction& h) {
  return Profile{[h](double u) { return h(u); }, h.support_radius()};
}

Profile heat_apply(const Profile& h, double t, const HeatKernel& k, double tol) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_apply: t must be positive");
  if (k.bc == BoundaryCondition::dirichlet) validate_image_kernel();
  const double w = 8.0 * std::sqrt(k.a * t);
  auto f = [h, t, k, w, tol](double u) {
    double lo = std::max(-h.radius, u - w), hi = std::min(h.radius, u + w);
    if (k.bc == BoundaryCondition::dirichlet) {
      if (u == 0.0) return 0.0;
      if (std::signbit(u))
        hi = std::min(hi, -0.0);
      else
        lo = std::max(lo, 0.0);
    }
    auto g = [&](double v) { return k(t, u, v) * h(v); };
    return integrate_split(g, lo, hi, tol);
  };
  return Profile{f, h.radius + w};
}

Profile heat_apply(const TestFunction& h, double t, const HeatKernel& k, double tol) {
  return heat_apply(profile(h), t, k, tol);
}

double l2_inner(const Profile& h, const Profile& g, double tol) {
  const double r = std::min(h.radius, g.radius);
  return integrate_split([&](double u) { return h(u) * g(u); }, -r, r, tol);
}

double ou_covariance(const TestFunction& h, const TestFunction& g, double t, double a, double c,
                     BoundaryCondition bc) {
  if (t < 0.0) throw std::invalid_argument("ou_covariance: t must be nonnegative");
  if (t == 0.0) return c / a * l2_inner(profile(h), profile(g));
  const Profile ph = heat_apply(h, t, HeatKernel{a, bc}, 1e-9);
  return c / a * l2_inner(ph, profile(g), 1e-9);
}

double WhiteNoiseSample::pair(const std::function<double(double)>& h) const {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s += h(grid.u(i)) * grid.v[i];
  return s * grid.du;
}

double WhiteNoiseSample::pair(const TestFunction& h) const {
  return pair([&](double u) { return h(u); });
}

WhiteNoiseSample sample_white_noise(double L, double du, double variance, Rng& rng) {
  if (!(du > 0.0)) throw std::invalid_argument("sample_white_noise: du must be positive");
  WhiteNoiseSample w;
  w.grid.du = du;
  w.grid.half = static_cast<std::size_t>(std::ceil(L / du - 1e-9));
  w.grid.v.resize(2 * w.grid.half);
  const double sd = std::sqrt(variance / du);
  for (double& x : w.grid.v) x = sd * std_normal(rng);
  return w;
}

std::size_t spectral_half_cells(double L, double du, BoundaryCondition bc) {
  std::size_t n = static_cast<std::size_t>(std::ceil(L / du - 1e-9));
  for (;; ++n) {
    std::size_t m = (bc == BoundaryCondition::dirichlet ? n : 2 * n) + 1;
    for (std::size_t q : {2, 3, 5, 7})
      while (m % q == 0) m /= q;
    if (m == 1) return n;
  }
}

SpectralOU::SpectralOU(double L, double du, double a, double c, BoundaryCondition bc, Rng& rng)
    : a_(a), c_(c) {
  cells_.du = du;
  cells_.half = spectral_half_cells(L, du, bc);
  cells_.v.assign(2 * cells_.half, 0.0);
  const std::size_t N = cells_.half;
  if (bc == BoundaryCondition::dirichlet) {
    seg_.resize(2);
    seg_[0].offset = 0;
    seg_[1].offset = N;
    seg_[0].len = seg_[1].len = N;
  } else {
    seg_.resize(1);
    seg_[0].len = 2 * N;
  }
  const double sd = std::sqrt(c / a);
  for (Segment& s : seg_) {
    s.modes.resize(s.len);
    s.mu.resize(s.len);
    s.in.resize(s.len);
    s.out.resize(s.len);
    for (std::size_t k = 0; k < s.len; ++k) {
      const double q = std::sin(std::numbers::pi * (k + 1) / (2.0 * (s.len + 1)));
      s.mu[k] = 4.0 / (du * du) * q * q;
      s.modes[k] = sd * std_normal(rng);
    }
    std::lock_guard lock(fftw_mutex());
    s.plan = fftw_plan_r2r_1d(static_cast<int>(s.len), s.in.data(), s.out.data(), FFTW_RODFT00,
                              FFTW_ESTIMATE);
  }
  synthesize();
}

SpectralOU::~SpectralOU() {
  std::lock_guard lock(fftw_mutex());
  for (Segment& s : seg_) fftw_destroy_plan(static_cast<fftw_plan>(s.plan));
}

void SpectralOU::advance(double h, Rng& rng) {
  const double var = c_ / a_;
  for (Segment& s : seg_) {
    if (s.h != h) {
      s.h = h;
      s.decay.resize(s.len);
      s.amp.resize(s.len);
      for (std::size_t k = 0; k < s.len; ++k) {
        const double e = std::exp(-a_ * s.mu[k] * h);
        s.decay[k] = e;
        s.amp[k] = std::sqrt(var * (1.0 - e * e));
      }
    }
    // ziggurat: keeps no cached variate, so the engine state alone is the stream
    boost::random::normal_distribution<double> normal;
    for (std::size_t k = 0; k < s.len; ++k)
      s.modes[k] = s.decay[k] * s.modes[k] + s.amp[k] * normal(rng);
  }
  t_ += h;
  synthesize();
}

void SpectralOU::synthesize() {
  for (Segment& s : seg_) {
    std::copy(s.modes.begin(), s.modes.end(), s.in.begin());
    fftw_execute(static_cast<fftw_plan>(s.plan));
    const double scale = 0.5 * std::sqrt(2.0 / (s.len + 1)) / std::sqrt(cells_.du);
    for (std::size_t j = 0; j < s.len; ++j) cells_.v[s.offset + j] = scale * s.out[j];
  }
}

double SpectralOU::pair(const std::function<double(double)>& h) const {
  double s = 0.0;
  for (std::size_t i = 0; i < cells_.size(); ++i) s += h(cells_.u(i)) * cells_.v[i];
  return s * cells_.du;
}

}  // namespace bcl
