#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bcl {

// S: smooth and rapidly decaying on R.  S_Dir: smooth on each half line
// with H and all even derivatives vanishing at 0+ and 0-.  S_0: every
// derivative vanishes at 0.  S_Neu: odd derivatives vanish at 0+ and 0-,
// used for the weights of the nonlinearity approximation.
enum class SpaceTag { S, S_Dir, S_0, S_Neu };

std::string to_string(SpaceTag t);
SpaceTag space_tag_from_string(const std::string& s);

// Space a test function must lie in for the bath exponent delta.
SpaceTag required_space(double delta);

class TestFunction {
 public:
  // f(u, k) = k-th derivative, k <= 4.  Evaluators distinguish the two
  // sides of 0 through the sign bit, so f(-0.0, k) is the left limit.
  using Eval = std::function<double(double, int)>;

  TestFunction(std::string id, SpaceTag tag, Eval f, bool smooth_at_zero);

  const std::string& id() const { return id_; }
  SpaceTag tag() const { return tag_; }
  bool smooth_at_zero() const { return smooth_; }

  double operator()(double u) const { return f_(u, 0); }
  double d(double u, int k) const { return f_(u, k); }

  // |H^(j)(u)|, j <= 2, is below 1e-16 sup|H| for |u| > support_radius().
  double support_radius() const { return radius_; }
  // K = sup (1 + u^2) H(u)^2
  double decay_constant() const { return decay_; }

  TestFunction scaled(double c) const;
  TestFunction shifted(double s) const;  // u -> H(u + s)
  TestFunction dilated(double w) const;  // u -> H(u / w), w > 0

  // Whether this function is admissible for bath exponent delta.
  bool in_theory(double delta) const;

 private:
  std::string id_;
  SpaceTag tag_;
  Eval f_;
  bool smooth_;
  double radius_ = 0.0;
  double decay_ = 0.0;
};

// Representatives: Hermite functions (S); odd u^m e^{-u^2}, one-sided and
// two-halves variants (S_Dir); e^{-1/u^2 - u^2} (S_0); e^{-k u^2} (S_Neu).
TestFunction builtin_family(SpaceTag tag, int index);

// Registry ids look like "sdir:odd-gauss:1"; see registry_ids().
TestFunction make_testfn(const std::string& id);
std::vector<std::string> registry_ids();

// Violations of the space-tag boundary conditions (empty if none).
std::vector<std::string> check_space(const TestFunction& h);

double norm_inf_k(const TestFunction& h, int k);

double discrete_grad(const TestFunction& h, int n, std::int64_t x, double shift = 0.0);
double discrete_laplacian(const TestFunction& h, int n, std::int64_t x, double shift = 0.0);

// Samples on the lattice points x/n, x = x0 .. x0 + size - 1.
struct GridFunction {
  int n = 1;
  std::int64_t x0 = 0;
  std::vector<double> v;
  double at(std::int64_t x) const;
};

GridFunction sample_lattice(const TestFunction& h, int n, std::int64_t x0, std::int64_t x1);
double discrete_grad(const GridFunction& g, std::int64_t x);
double discrete_laplacian(const GridFunction& g, std::int64_t x);

struct Norm2n {
  double value = 0.0;       // ||H||_{2,n}^2 over the support window
  double tail_bound = 0.0;  // certified bound on the omitted sites, from K
};

// ||T H||_{2,n}^2 = n^{-1} sum_x H((x + shift)/n)^2.
Norm2n norm_2n(const TestFunction& h, int n, double shift = 0.0);

double kernel_iota(double u, double eps, double v);  // eps^{-1} 1_{(u, u+eps]}(v)
double kernel_chi(double u, double eps);             // min(1, |u|/eps)
double kernel_rho(double u, double eps, double v);   // chi_eps(u) iota_eps^u(v)

// Cell-centred samples on [-L, L] with 0 a cell edge: cell i covers
// [(i - half) du, (i - half + 1) du], i = 0 .. 2 half - 1.
struct LineGrid {
  double du = 0.0;
  std::size_t half = 0;
  std::vector<double> v;

  std::size_t size() const { return v.size(); }
  double u(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(half) + 0.5) * du;
  }
};

LineGrid sample_line(const TestFunction& h, double L, double du);
LineGrid sample_line(const std::function<double(double)>& f, double L, double du);

// check-rho_eps(G)(u) = chi_eps(u) eps^{-1} int_u^{u+eps} G; eps must be a
// multiple of du.
LineGrid mollify_check_rho(const LineGrid& g, double eps);

double l2_norm(const LineGrid& g);
// Gagliardo seminorm of order a in (0,1), summed over the two half lines.
double sobolev_frac_seminorm(const LineGrid& g, double a);
// ||G'||, ||G''|| on each half line (weak derivatives on R \ {0}).
double sobolev_deriv_seminorm(const LineGrid& g, int k);
// (||G||^2 + [G]_s^2)^{1/2} for s in [0, 2]; s = 0 is the L2 norm.
double sobolev_norm(const LineGrid& g, double s);
double sobolev_frac_norm(const LineGrid& g, double a);
double sobolev_int_norm(const LineGrid& g, int k);

// Smooth bump c e^{-1/(u(1-u))} on (0,1) with unit mass, its derivatives
// (k <= 2 exact) and its primitive from 0.
double bump_a(double u, int k = 0);
double bump_a_integral(double s);

// psi = 0 on (-inf, 0], u on [0, beta], smooth and supported in (0, beta + 1/alpha].
TestFunction psi_glue(double alpha, double beta);

std::function<double(double)> tanaka(double eps);
std::function<double(double)> cutoff_Phi(int n);

}  // namespace bcl
