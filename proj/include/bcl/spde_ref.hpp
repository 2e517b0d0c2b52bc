#pragma once

#include <functional>
#include <vector>

#include "bcl/rng.hpp"
#include "bcl/testfn.hpp"

namespace bcl {

enum class BoundaryCondition { full_line, dirichlet };

const char* to_string(BoundaryCondition bc);

// (4 pi a t)^{-1/2} exp(-(u - v)^2 / (4 a t))
double heat_kernel_full(double t, double u, double v, double a);
// Method of images on each half line; 0 when u and v lie on opposite sides.
double heat_kernel_dirichlet(double t, double u, double v, double a);
// Sine-series kernel of the Dirichlet heat equation on (0, L), used to
// cross-check the image kernel.
double dirichlet_series_kernel(double t, double u, double v, double a, double L, int modes);

// Largest |image - series| over a fixed grid of (t, u, v), t in [0.01, 1].
double image_kernel_discrepancy();
// Throws std::logic_error if the discrepancy exceeds 1e-6.  Runs once per
// process; ou_covariance calls it before the first Dirichlet evaluation.
void validate_image_kernel();

struct HeatKernel {
  double a = 1.0;
  BoundaryCondition bc = BoundaryCondition::full_line;
  double operator()(double t, double u, double v) const;
};

// A function together with a radius outside which it is negligible.
struct Profile {
  std::function<double(double)> f;
  double radius = 0.0;
  double operator()(double u) const { return f(u); }
};

Profile profile(const TestFunction& h);

// P_t H by adaptive quadrature over supp(H) +- 8 sqrt(a t).
Profile heat_apply(const Profile& h, double t, const HeatKernel& k, double tol = 1e-10);
Profile heat_apply(const TestFunction& h, double t, const HeatKernel& k, double tol = 1e-10);

double l2_inner(const Profile& h, const Profile& g, double tol = 1e-10);

// Stationary OU covariance (c/a) <P_t H, G>.
double ou_covariance(const TestFunction& h, const TestFunction& g, double t, double a, double c,
                     BoundaryCondition bc);

// Cell values with variance `variance / du` on [-L, L]; Y(H) = sum H(u_i) g_i du.
struct WhiteNoiseSample {
  LineGrid grid;
  double pair(const std::function<double(double)>& h) const;
  double pair(const TestFunction& h) const;
};

WhiteNoiseSample sample_white_noise(double L, double du, double variance, Rng& rng);

// Smallest N >= L / du such that every sine transform (length N for
// dirichlet, 2N for full_line) has length + 1 free of primes above 7.
std::size_t spectral_half_cells(double L, double du, BoundaryCondition bc);

// Discretized OU dY = a Delta Y dt + sqrt(2c) grad dW on the cells of
// [-N du, N du], N = spectral_half_cells(L, du, bc), with Dirichlet conditions at +-L and, for bc = dirichlet, at 0.
// Each sine mode is advanced exactly, so the white noise of covariance c/a is
// invariant and the path is stationary from the start.
class SpectralOU {
 public:
  SpectralOU(double L, double du, double a, double c, BoundaryCondition bc, Rng& rng);
  ~SpectralOU();
  SpectralOU(const SpectralOU&) = delete;
  SpectralOU& operator=(const SpectralOU&) = delete;

  void advance(double h, Rng& rng);
  double time() const { return t_; }
  const LineGrid& cells() const { return cells_; }
  double pair(const std::function<double(double)>& h) const;

 private:
  struct Segment {
    std::size_t offset = 0;
    std::size_t len = 0;
    std::vector<double> modes;
    std::vector<double> mu;
    double h = -1.0;  // step the factors below were computed for
    std::vector<double> decay, amp;
    void* plan = nullptr;
    std::vector<double> in, out;
  };
  void synthesize();

  double a_, c_, t_ = 0.0;
  LineGrid cells_;
  std::vector<Segment> seg_;
};

}  // namespace bcl
