#include "bcl/testfn.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace bcl {

std::string to_string(SpaceTag t) {
  switch (t) {
    case SpaceTag::S: return "S";
    case SpaceTag::S_Dir: return "S_Dir";
    case SpaceTag::S_0: return "S_0";
    case SpaceTag::S_Neu: return "S_Neu";
  }
  return "?";
}

SpaceTag space_tag_from_string(const std::string& s) {
  if (s == "s" || s == "S") return SpaceTag::S;
  if (s == "sdir" || s == "S_Dir") return SpaceTag::S_Dir;
  if (s == "s0" || s == "S_0") return SpaceTag::S_0;
  if (s == "sneu" || s == "S_Neu") return SpaceTag::S_Neu;
  throw std::invalid_argument("unknown space tag '" + s + "'");
}

SpaceTag required_space(double delta) {
  if (delta > 1.0) return SpaceTag::S;
  if (delta > -1.0) return SpaceTag::S_Dir;
  return SpaceTag::S_0;
}

namespace {

double max_abs_derivs(const TestFunction::Eval& f, double u, int kmax) {
  double m = 0.0;
  for (int k = 0; k <= kmax; ++k) m = std::max(m, std::abs(f(u, k)));
  return m;
}

}  // namespace

TestFunction::TestFunction(std::string id, SpaceTag tag, Eval f, bool smooth_at_zero)
    : id_(std::move(id)), tag_(tag), f_(std::move(f)), smooth_(smooth_at_zero) {
  double scale = 0.0;
  for (int i = -3000; i <= 3000; ++i) scale = std::max(scale, std::abs(f_(0.01 * i, 0)));
  scale = std::max(scale, std::abs(f_(-0.0, 0)));
  double last = 0.0;
  for (int i = 1; i <= 6000; ++i) {
    const double u = 0.01 * i;
    if (max_abs_derivs(f_, u, 2) > 1e-16 * scale || max_abs_derivs(f_, -u, 2) > 1e-16 * scale)
      last = u;
  }
  radius_ = scale > 0.0 ? last + 0.25 : 0.0;
  const double step = 1e-3;
  const auto m = static_cast<int>(std::ceil(radius_ / step));
  for (int i = -m; i <= m; ++i) {
    const double u = i * step;
    const double h = f_(u, 0);
    decay_ = std::max(decay_, (1.0 + u * u) * h * h);
  }
  const double hl = f_(-0.0, 0);
  decay_ = std::max(decay_, hl * hl);
}

TestFunction TestFunction::scaled(double c) const {
  auto f = f_;
  return TestFunction(id_ + "*" + std::to_string(c), tag_,
                      [f, c](double u, int k) { return c * f(u, k); }, smooth_);
}

TestFunction TestFunction::shifted(double s) const {
  auto f = f_;
  return TestFunction(id_ + "+" + std::to_string(s), tag_,
                      [f, s](double u, int k) { return f(u + s, k); }, smooth_);
}

TestFunction TestFunction::dilated(double w) const {
  if (!(w > 0.0)) throw std::invalid_argument("dilated: width must be > 0");
  auto f = f_;
  return TestFunction(id_ + "/" + std::to_string(w), tag_,
                      [f, w](double u, int k) { return std::pow(w, -k) * f(u / w, k); }, smooth_);
}

bool TestFunction::in_theory(double delta) const {
  switch (required_space(delta)) {
    case SpaceTag::S: return smooth_;
    case SpaceTag::S_Dir: return tag_ == SpaceTag::S_Dir || tag_ == SpaceTag::S_0;
    default: return tag_ == SpaceTag::S_0;
  }
}

namespace {

using Poly = std::vector<double>;  // coefficients, lowest order first

Poly poly_deriv(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(static_cast<double>(i) * p[i]);
  return d;
}

double poly_eval(const Poly& p, double u) {
  double r = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * u + p[i];
  return r;
}

// P e^{-a u^2} and its first four derivatives, as polynomial prefactors.
std::array<Poly, 5> gauss_derivs(const Poly& p, double a) {
  std::array<Poly, 5> out;
  out[0] = p;
  for (int k = 1; k <= 4; ++k) {
    Poly d = poly_deriv(out[k - 1]);
    Poly& prev = out[k - 1];
    d.resize(std::max(d.size(), prev.size() + 1), 0.0);
    for (std::size_t i = 0; i < prev.size(); ++i) d[i + 1] -= 2.0 * a * prev[i];
    out[k] = d;
  }
  return out;
}

// Piecewise P_right e^{-a u^2} for u >= +0, P_left e^{-a u^2} for u <= -0.
TestFunction::Eval poly_gauss(const Poly& right, const Poly& left, double a) {
  auto r = std::make_shared<std::array<Poly, 5>>(gauss_derivs(right, a));
  auto l = std::make_shared<std::array<Poly, 5>>(gauss_derivs(left, a));
  return [r, l, a](double u, int k) {
    if (k < 0 || k > 4) throw std::out_of_range("derivative order must be <= 4");
    const auto& ps = std::signbit(u) ? *l : *r;
    const double e = std::exp(-a * u * u);
    return e == 0.0 ? 0.0 : poly_eval(ps[k], u) * e;
  };
}

Poly monomial(int m, double c = 1.0) {
  Poly p(static_cast<std::size_t>(m) + 1, 0.0);
  p[static_cast<std::size_t>(m)] = c;
  return p;
}

Poly hermite_function_poly(int k) {
  // physicists' Hermite polynomial, normalized so that H_k e^{-u^2/2} has unit L2 norm
  Poly h0{1.0}, h1{0.0, 2.0};
  if (k == 0) return {std::pow(std::numbers::pi, -0.25)};
  Poly prev = h0, cur = h1;
  for (int j = 1; j < k; ++j) {
    Poly next(cur.size() + 1, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2.0 * cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= 2.0 * j * prev[i];
    prev = cur;
    cur = next;
  }
  double norm = std::pow(2.0, k) * std::sqrt(std::numbers::pi);
  for (int j = 2; j <= k; ++j) norm *= j;
  const double c = 1.0 / std::sqrt(norm);
  for (auto& x : cur) x *= c;
  return cur;
}

// e^{-1/u^2 - u^2} and derivatives via g = -u^{-2} - u^2.
double flat_gauss(double u, int k) {
  if (std::abs(u) < 0.02) return 0.0;  // e^{-2500} underflows anyway
  const double h = std::exp(-1.0 / (u * u) - u * u);
  const double u2 = u * u;
  const double g1 = 2.0 / (u2 * u) - 2.0 * u;
  const double g2 = -6.0 / (u2 * u2) - 2.0;
  const double g3 = 24.0 / (u2 * u2 * u);
  const double g4 = -120.0 / (u2 * u2 * u2);
  switch (k) {
    case 0: return h;
    case 1: return g1 * h;
    case 2: return (g2 + g1 * g1) * h;
    case 3: return (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * h;
    case 4:
      return (g4 + 4.0 * g1 * g3 + 3.0 * g2 * g2 + 6.0 * g1 * g1 * g2 + g1 * g1 * g1 * g1) * h;
  }
  throw std::out_of_range("derivative order must be <= 4");
}

int parse_index(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

}  // namespace

TestFunction make_testfn(const std::string& id) {
  const auto c1 = id.find(':');
  const auto c2 = id.rfind(':');
  if (c1 == std::string::npos || c1 == c2)
    throw std::invalid_argument("test function id must be tag:family:index, got '" + id + "'");
  const std::string tag_s = id.substr(0, c1);
  const std::string fam = id.substr(c1 + 1, c2 - c1 - 1);
  int idx = 0;
  try {
    idx = parse_index(id.substr(c2 + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad index in test function id '" + id + "'");
  }
  const SpaceTag tag = space_tag_from_string(tag_s);
  auto bad = [&]() { return std::invalid_argument("unknown test function '" + id + "'"); };

  if (tag == SpaceTag::S && fam == "hermite") {
    if (idx < 0 || idx > 8) throw bad();
    const Poly p = hermite_function_poly(idx);
    return TestFunction(id, tag, poly_gauss(p, p, 0.5), true);
  }
  if ((tag == SpaceTag::S || tag == SpaceTag::S_Neu) && fam == "gauss") {
    if (idx < 1 || idx > 16) throw bad();
    return TestFunction(id, tag, poly_gauss({1.0}, {1.0}, idx), true);
  }
  if (tag == SpaceTag::S_Dir && fam == "odd-gauss") {
    if (idx < 1 || idx > 7 || idx % 2 == 0) throw bad();
    return TestFunction(id, tag, poly_gauss(monomial(idx), monomial(idx), 1.0), true);
  }
  if (tag == SpaceTag::S_Dir && fam == "right-odd-gauss") {
    if (idx < 1 || idx > 7 || idx % 2 == 0) throw bad();
    return TestFunction(id, tag, poly_gauss(monomial(idx), {0.0}, 1.0), false);
  }
  if (tag == SpaceTag::S_Dir && fam == "halves") {
    // independent halves: u e^{-u^2} on the right, idx u^3 e^{-u^2} on the left
    if (idx < 1 || idx > 4) throw bad();
    return TestFunction(id, tag, poly_gauss(monomial(1), monomial(3, idx), 1.0), false);
  }
  if (tag == SpaceTag::S_0 && fam == "flat-gauss") {
    if (idx != 0) throw bad();
    return TestFunction(id, tag, flat_gauss, true);
  }
  if (tag == SpaceTag::S_0 && fam == "flat-gauss-right") {
    if (idx != 0) throw bad();
    return TestFunction(
        id, tag, [](double u, int k) { return std::signbit(u) ? 0.0 : flat_gauss(u, k); }, false);
  }
  throw bad();
}

std::vector<std::string> registry_ids() {
  std::vector<std::string> ids;
  for (int k = 0; k <= 8; ++k) ids.push_back("s:hermite:" + std::to_string(k));
  for (int k : {1, 2, 4, 16}) ids.push_back("s:gauss:" + std::to_string(k));
  for (int k : {1, 2, 4, 16}) ids.push_back("sneu:gauss:" + std::to_string(k));
  for (int m : {1, 3, 5, 7}) {
    ids.push_back("sdir:odd-gauss:" + std::to_string(m));
    ids.push_back("sdir:right-odd-gauss:" + std::to_string(m));
  }
  for (int k = 1; k <= 4; ++k) ids.push_back("sdir:halves:" + std::to_string(k));
  ids.push_back("s0:flat-gauss:0");
  ids.push_back("s0:flat-gauss-right:0");
  return ids;
}

TestFunction builtin_family(SpaceTag tag, int index) {
  static const std::vector<std::string> s_dir{"sdir:odd-gauss:1", "sdir:odd-gauss:3",
                                              "sdir:halves:1", "sdir:right-odd-gauss:1"};
  static const std::vector<std::string> s_0{"s0:flat-gauss:0", "s0:flat-gauss-right:0"};
  switch (tag) {
    case SpaceTag::S: return make_testfn("s:hermite:" + std::to_string(index));
    case SpaceTag::S_Neu: return make_testfn("sneu:gauss:" + std::to_string(index + 1));
    case SpaceTag::S_Dir:
      if (index < 0 || index >= static_cast<int>(s_dir.size()))
        throw std::invalid_argument("S_Dir family index out of range");
      return make_testfn(s_dir[static_cast<std::size_t>(index)]);
    case SpaceTag::S_0:
      if (index < 0 || index >= static_cast<int>(s_0.size()))
        throw std::invalid_argument("S_0 family index out of range");
      return make_testfn(s_0[static_cast<std::size_t>(index)]);
  }
  throw std::invalid_argument("unknown tag");
}

std::vector<std::string> check_space(const TestFunction& h) {
  std::vector<std::string> out;
  auto require_zero = [&](int k, double tol) {
    for (double z : {0.0, -0.0}) {
      const double v = h.d(z, k);
      if (!(std::abs(v) <= tol))
        out.push_back(h.id() + ": derivative " + std::to_string(k) + " at 0" +
                      (std::signbit(z) ? "-" : "+") + " is " + std::to_string(v));
    }
  };
  switch (h.tag()) {
    case SpaceTag::S:
      if (!h.smooth_at_zero()) out.push_back(h.id() + ": S member must be smooth at 0");
      break;
    case SpaceTag::S_Dir:
      require_zero(0, 1e-10);
      require_zero(2, 1e-10);
      require_zero(4, 1e-8);
      break;
    case SpaceTag::S_0:
      for (int k = 0; k <= 4; ++k) require_zero(k, k < 4 ? 1e-10 : 1e-8);
      break;
    case SpaceTag::S_Neu:
      require_zero(1, 1e-10);
      require_zero(3, 1e-8);
      break;
  }
  if (!std::isfinite(h.decay_constant())) out.push_back(h.id() + ": decay constant not finite");
  return out;
}

double norm_inf_k(const TestFunction& h, int k) {
  if (k < 0 || k > 4) throw std::out_of_range("norm_inf_k: k must be in 0..4");
  auto g = [&](double u) {
    double m = 0.0;
    for (int j = 0; j <= k; ++j) m = std::max(m, std::abs(h.d(u, j)));
    return std::pow(1.0 + std::abs(u), k) * m;
  };
  const double step = 1e-3;
  const double r = std::max(h.support_radius(), 1.0);
  const auto m = static_cast<int>(std::ceil(r / step));
  double best = std::max(g(0.0), g(-0.0));
  double best_u = 0.0;
  for (int i = -m; i <= m; ++i) {
    const double v = g(i * step);
    if (v > best) {
      best = v;
      best_u = i * step;
    }
  }
  // golden-section refinement around the best grid point
  double a = best_u - step, b = best_u + step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    if (g(c) > g(d)) b = d; else a = c;
  }
  return std::max(best, g(0.5 * (a + b)));
}

double discrete_grad(const TestFunction& h, int n, std::int64_t x, double shift) {
  const double nd = n;
  return nd * (h((static_cast<double>(x + 1) + shift) / nd) - h((static_cast<double>(x) + shift) / nd));
}

double discrete_laplacian(const TestFunction& h, int n, std::int64_t x, double shift) {
  const double nd = n;
  const double xm = static_cast<double>(x) + shift;
  return nd * nd * (h((xm + 1.0) / nd) + h((xm - 1.0) / nd) - 2.0 * h(xm / nd));
}

double GridFunction::at(std::int64_t x) const {
  if (x < x0 || x >= x0 + static_cast<std::int64_t>(v.size()))
    throw std::out_of_range("grid function index " + std::to_string(x) + " out of range");
  return v[static_cast<std::size_t>(x - x0)];
}

GridFunction sample_lattice(const TestFunction& h, int n, std::int64_t x0, std::int64_t x1) {
  GridFunction g;
  g.n = n;
  g.x0 = x0;
  for (std::int64_t x = x0; x <= x1; ++x) g.v.push_back(h(static_cast<double>(x) / n));
  return g;
}

double discrete_grad(const GridFunction& g, std::int64_t x) {
  return g.n * (g.at(x + 1) - g.at(x));
}

double discrete_laplacian(const GridFunction& g, std::int64_t x) {
  const double nd = g.n;
  return nd * nd * (g.at(x + 1) + g.at(x - 1) - 2.0 * g.at(x));
}

Norm2n norm_2n(const TestFunction& h, int n, double shift) {
  Norm2n out;
  const double nd = n;
  const double r = h.support_radius();
  const auto lo = static_cast<std::int64_t>(std::floor(-r * nd - shift)) - 1;
  const auto hi = static_cast<std::int64_t>(std::ceil(r * nd - shift)) + 1;
  for (std::int64_t x = lo; x <= hi; ++x) {
    const double v = h((static_cast<double>(x) + shift) / nd);
    out.value += v * v;
  }
  out.value /= nd;
  // omitted sites have |u| > r - 1/n and H^2 <= K / (1 + u^2)
  const double rr = std::max(0.0, r - 1.0 / nd);
  out.tail_bound = h.decay_constant() * (2.0 * (std::numbers::pi / 2.0 - std::atan(rr)) +
                                         2.0 / (nd * (1.0 + rr * rr)));
  return out;
}

double kernel_iota(double u, double eps, double v) {
  return (v > u && v <= u + eps) ? 1.0 / eps : 0.0;
}

double kernel_chi(double u, double eps) { return std::min(1.0, std::abs(u) / eps); }

double kernel_rho(double u, double eps, double v) {
  return kernel_chi(u, eps) * kernel_iota(u, eps, v);
}

LineGrid sample_line(const std::function<double(double)>& f, double L, double du) {
  LineGrid g;
  g.du = du;
  g.half = static_cast<std::size_t>(std::llround(L / du));
  g.v.resize(2 * g.half);
  for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] = f(g.u(i));
  return g;
}

LineGrid sample_line(const TestFunction& h, double L, double du) {
  return sample_line([&h](double u) { return h(u); }, L, du);
}

LineGrid mollify_check_rho(const LineGrid& g, double eps) {
  const double ratio = eps / g.du;
  const auto m = static_cast<std::size_t>(std::llround(ratio));
  if (m == 0 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio)
    throw std::invalid_argument("mollify_check_rho: eps must be a positive multiple of du");
  const std::size_t N = g.size();
  // prefix sums of the cell values
  std::vector<double> cum(N + 1, 0.0);
  for (std::size_t i = 0; i < N; ++i) cum[i + 1] = cum[i] + g.v[i];
  auto cell = [&](std::size_t i) { return i < N ? g.v[i] : 0.0; };
  auto cum_at = [&](std::size_t i) { return cum[std::min(i, N)]; };
  LineGrid out = g;
  for (std::size_t i = 0; i < N; ++i) {
    // from the centre of cell i to the centre of cell i + m
    const double inner = cum_at(i + m) - cum_at(i + 1);
    const double integral = g.du * (0.5 * cell(i) + inner + 0.5 * cell(i + m));
    out.v[i] = kernel_chi(g.u(i), eps) * integral / eps;
  }
  return out;
}

double l2_norm(const LineGrid& g) {
  double s = 0.0;
  for (double x : g.v) s += x * x;
  return std::sqrt(s * g.du);
}

double sobolev_frac_seminorm(const LineGrid& g, double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("fractional order must be in (0,1)");
  const std::size_t H = g.half;
  const double du = g.du;
  std::vector<double> w(H + 1, 0.0);
  for (std::size_t k = 1; k <= H; ++k) w[k] = std::pow(static_cast<double>(k) * du, -(1.0 + a));
  double total = 0.0;
  for (int side = 0; side < 2; ++side) {
    // cells ordered outward from 0 on this half line
    std::vector<double> h(H);
    for (std::size_t j = 0; j < H; ++j) h[j] = side == 0 ? g.v[H + j] : g.v[H - 1 - j];
    double off = 0.0;
    for (std::size_t k = 1; k < H; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j + k < H; ++j) {
        const double d = h[j] - h[j + k];
        s += d * d;
      }
      off += 2.0 * s * w[k];
    }
    off *= du * du;
    // same-cell blocks, integrated exactly for a locally linear interpolant
    double diag = 0.0;
    for (std::size_t j = 0; j < H; ++j) {
      const double lo = j > 0 ? h[j - 1] : h[j];
      const double hi = j + 1 < H ? h[j + 1] : h[j];
      const double span = (j > 0 && j + 1 < H) ? 2.0 : 1.0;
      const double slope = (hi - lo) / (span * du);
      diag += slope * slope;
    }
    diag *= 2.0 * std::pow(du, 3.0 - a) / ((2.0 - a) * (3.0 - a));
    // pairs with v beyond the grid, where G = 0
    double tail = 0.0;
    for (std::size_t j = 0; j < H; ++j) {
      const double dist = (static_cast<double>(H - j) - 0.5) * du;
      tail += h[j] * h[j] * std::pow(dist, -a) / a;
    }
    tail *= 2.0 * du;
    total += off + diag + tail;
  }
  return std::sqrt(total);
}

double sobolev_deriv_seminorm(const LineGrid& g, int k) {
  if (k != 1 && k != 2) throw std::invalid_argument("integer order must be 1 or 2");
  const std::size_t H = g.half;
  const double du = g.du;
  double s = 0.0;
  for (int side = 0; side < 2; ++side) {
    std::vector<double> h(H + 1, 0.0);  // trailing zero beyond the grid
    for (std::size_t j = 0; j < H; ++j) h[j] = side == 0 ? g.v[H + j] : g.v[H - 1 - j];
    if (k == 1) {
      for (std::size_t j = 0; j < H; ++j) {
        const double d = (h[j + 1] - h[j]) / du;
        s += d * d * du;
      }
    } else {
      for (std::size_t j = 1; j < H; ++j) {
        const double d = (h[j + 1] + h[j - 1] - 2.0 * h[j]) / (du * du);
        s += d * d * du;
      }
    }
  }
  return std::sqrt(s);
}

double sobolev_norm(const LineGrid& g, double s) {
  const double l2 = l2_norm(g);
  if (s == 0.0) return l2;
  double semi = 0.0;
  if (s > 0.0 && s < 1.0) {
    semi = sobolev_frac_seminorm(g, s);
  } else if (s == 1.0) {
    semi = sobolev_deriv_seminorm(g, 1);
  } else if (s == 2.0) {
    const double d1 = sobolev_deriv_seminorm(g, 1);
    const double d2 = sobolev_deriv_seminorm(g, 2);
    semi = std::sqrt(d1 * d1 + d2 * d2);
  } else {
    throw std::invalid_argument("sobolev_norm: order must be in [0,1] or 2");
  }
  return std::sqrt(l2 * l2 + semi * semi);
}

double sobolev_frac_norm(const LineGrid& g, double a) { return sobolev_norm(g, a); }
double sobolev_int_norm(const LineGrid& g, int k) { return sobolev_norm(g, k); }

namespace {

double bump_raw(double u) {
  if (!(u > 0.0 && u < 1.0)) return 0.0;
  const double q = 1.0 / (u * (1.0 - u));
  return q > 700.0 ? 0.0 : std::exp(-q);
}

double bump_norm() {
  static const double c = [] {
    boost::math::quadrature::gauss_kronrod<double, 61> gk;
    return 1.0 / gk.integrate(bump_raw, 0.0, 1.0, 15, 1e-15);
  }();
  return c;
}

}  // namespace

double bump_a(double u, int k) {
  if (!(u > 0.0 && u < 1.0)) return 0.0;
  const double q = 1.0 / (u * (1.0 - u));
  if (q > 700.0) return 0.0;
  const double a = bump_norm() * std::exp(-q);
  const double w = 1.0 - 2.0 * u;
  switch (k) {
    case 0: return a;
    case 1: return w * q * q * a;
    case 2: return (-2.0 * q * q - 2.0 * w * w * q * q * q + w * w * q * q * q * q) * a;
    case 3: {
      const double h = 1e-5;
      return (bump_a(u + h, 2) - bump_a(u - h, 2)) / (2.0 * h);
    }
  }
  throw std::out_of_range("bump_a: derivative order must be <= 3");
}

double bump_a_integral(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  boost::math::quadrature::gauss_kronrod<double, 61> gk;
  return gk.integrate([](double u) { return bump_a(u); }, 0.0, s, 15, 1e-14);
}

TestFunction psi_glue(double alpha, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("psi_glue: beta must be in (0,1)");
  if (!(alpha > 1.0 / (1.0 - beta)))
    throw std::invalid_argument("psi_glue: alpha must exceed 1/(1-beta)");
  // phi = 1 - int a_{alpha,beta}, a_{alpha,beta}(u) = alpha a(alpha (u - beta))
  auto phi = [alpha, beta](double u, int k) {
    const double s = alpha * (u - beta);
    if (k == 0) return 1.0 - bump_a_integral(s);
    return -std::pow(alpha, k) * bump_a(s, k - 1);
  };
  auto f = [phi](double u, int k) {
    if (!(u > 0.0)) return 0.0;
    double v = u * phi(u, k);
    if (k > 0) v += k * phi(u, k - 1);
    return v;
  };
  return TestFunction("psi:" + std::to_string(alpha) + ":" + std::to_string(beta), SpaceTag::S_Dir,
                      f, false);
}

std::function<double(double)> tanaka(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("tanaka: eps must be > 0");
  return [eps](double u) {
    if (u <= 0.0) return 0.0;
    if (u <= eps) return u * u / (2.0 * eps);
    return u - eps / 2.0;
  };
}

std::function<double(double)> cutoff_Phi(int n) {
  if (n < 1) throw std::invalid_argument("cutoff_Phi: n must be >= 1");
  return [n](double u) {
    const double s = n * std::abs(u);
    return s >= 1.0 ? 1.0 : bump_a_integral(s);
  };
}

}  // namespace bcl
