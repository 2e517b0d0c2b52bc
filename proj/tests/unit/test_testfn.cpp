#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bcl/quadrature.hpp"
#include "bcl/testfn.hpp"

using namespace bcl;

namespace {

TestFunction poly2() {
  return TestFunction(
      "u^2", SpaceTag::S,
      [](double u, int k) { return k == 0 ? u * u : k == 1 ? 2 * u : k == 2 ? 2.0 : 0.0; }, true);
}

}  // namespace

TEST_CASE("registry functions satisfy their space conditions") {
  for (const auto& id : registry_ids()) {
    const TestFunction h = make_testfn(id);
    INFO(id);
    CHECK(check_space(h).empty());
  }
  CHECK_THROWS(make_testfn("s:nonsense:1"));
  CHECK_THROWS(make_testfn("sdir:odd-gauss:2"));
}

TEST_CASE("S_Dir and S_0 members vanish at the origin") {
  const TestFunction h = make_testfn("sdir:odd-gauss:1");  // u e^{-u^2}
  CHECK(h(0.0) == 0.0);
  CHECK(h.d(0.0, 2) == doctest::Approx(0.0));
  CHECK(h(0.5) == doctest::Approx(0.5 * std::exp(-0.25)));
  const TestFunction f = make_testfn("s0:flat-gauss:0");
  for (int j = 0; j <= 4; ++j) CHECK(std::abs(f.d(0.05, j)) < 1e-150);
  for (int j = 0; j <= 4; ++j) CHECK(std::abs(f.d(-0.05, j)) < 1e-150);
}

TEST_CASE("dilation rescales derivatives and keeps the space") {
  const TestFunction h = make_testfn("sdir:odd-gauss:1");
  const TestFunction g = h.dilated(0.25);
  CHECK(g(0.125) == doctest::Approx(h(0.5)));
  CHECK(g.d(0.125, 1) == doctest::Approx(4.0 * h.d(0.5, 1)));
  CHECK(g.d(0.125, 2) == doctest::Approx(16.0 * h.d(0.5, 2)));
  CHECK(g.support_radius() < 0.5 * h.support_radius());
  CHECK(check_space(g).empty());
  CHECK_THROWS(h.dilated(0.0));
}

TEST_CASE("required space by bath exponent") {
  CHECK(required_space(2.0) == SpaceTag::S);
  CHECK(required_space(0.0) == SpaceTag::S_Dir);
  CHECK(required_space(1.0) == SpaceTag::S_Dir);
  CHECK(required_space(-2.0) == SpaceTag::S_0);
  CHECK(make_testfn("sdir:odd-gauss:1").in_theory(0.0));
  CHECK_FALSE(make_testfn("s:hermite:0").in_theory(0.0));
}

TEST_CASE("weighted sup norms") {
  const TestFunction g = make_testfn("s:gauss:1");
  CHECK(norm_inf_k(g, 0) == doctest::Approx(1.0));
  // dense-grid oracle for sup (1 + |u|) max(|H|, |H'|)
  double best = 0;
  for (int i = -400000; i <= 400000; ++i) {
    const double u = i * 1e-5;
    best = std::max(best, (1 + std::abs(u)) * std::max(std::exp(-u * u),
                                                       std::abs(2 * u * std::exp(-u * u))));
  }
  CHECK(norm_inf_k(g, 1) == doctest::Approx(best).epsilon(1e-6));
  CHECK(norm_inf_k(g.scaled(-3.0), 1) == doctest::Approx(3 * norm_inf_k(g, 1)));
}

TEST_CASE("discrete derivatives") {
  const TestFunction q = poly2();
  for (int n : {2, 7, 64})
    for (std::int64_t x : {-3, 0, 5}) CHECK(discrete_laplacian(q, n, x) == doctest::Approx(2.0));
  CHECK(discrete_grad(q, 2, 0, 0.0) == doctest::Approx(0.5));  // 2 (0.25 - 0)
  CHECK(discrete_grad(q, 2, 1, 0.0) == doctest::Approx(1.5));  // 2 (1 - 0.25)
  const TestFunction lin(
      "lin", SpaceTag::S, [](double u, int k) { return k == 0 ? 3 * u : k == 1 ? 3.0 : 0.0; }, true);
  CHECK(discrete_grad(lin, 16, 4) == doctest::Approx(3.0));
  CHECK(discrete_laplacian(lin, 16, 4) == doctest::Approx(0.0).epsilon(1e-9));
  const GridFunction gf = sample_lattice(q, 2, -2, 4);
  CHECK(discrete_grad(gf, 1) == doctest::Approx(1.5));
  CHECK_THROWS(gf.at(10));
}

TEST_CASE("lattice L2 norm") {
  const TestFunction g = make_testfn("s:gauss:1");
  CHECK(norm_2n(g, 256).value == doctest::Approx(std::sqrt(std::numbers::pi / 2)).epsilon(1e-8));
  const double K = g.decay_constant();
  for (int n : {1, 4, 32})
    for (double t : {0.0, 0.37, 5.1})
      CHECK(norm_2n(g, n, t * n).value <= (1 + std::numbers::pi * std::numbers::pi / 3) * K);
  CHECK(norm_2n(g.scaled(0.0), 8).value == 0.0);
}

TEST_CASE("box kernels") {
  CHECK(kernel_iota(0.0, 0.5, 0.25) == 2.0);
  CHECK(kernel_iota(0.0, 0.5, 0.0) == 0.0);
  CHECK(kernel_iota(0.0, 0.5, 0.5) == 2.0);
  CHECK(kernel_iota(0.0, 0.5, 0.6) == 0.0);
  CHECK(kernel_chi(0.25, 0.5) == 0.5);
  CHECK(kernel_chi(1.0, 0.5) == 1.0);
  CHECK(kernel_rho(0.25, 0.5, 0.5) == 1.0);
}

TEST_CASE("mollifier of a constant is chi") {
  const LineGrid one = sample_line([](double) { return 1.0; }, 2.0, 1.0 / 256);
  const double eps = 0.125;
  const LineGrid m = mollify_check_rho(one, eps);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double u = m.u(i);
    if (u + eps > 2.0) continue;  // box leaves the grid
    CHECK(m.v[i] == doctest::Approx(kernel_chi(u, eps)).epsilon(1e-12));
  }
  const LineGrid zero = sample_line([](double) { return 0.0; }, 2.0, 1.0 / 256);
  CHECK(sobolev_norm(mollify_check_rho(zero, eps), 1.0) == 0.0);
}

TEST_CASE("Sobolev norms of a Gaussian") {
  const LineGrid g = sample_line(make_testfn("s:gauss:1"), 6.0, 1.0 / 512);
  const double l2 = std::sqrt(std::sqrt(std::numbers::pi / 2));
  CHECK(l2_norm(g) == doctest::Approx(l2).epsilon(1e-6));
  // ||G'||^2 = sqrt(pi/2)
  CHECK(sobolev_deriv_seminorm(g, 1) == doctest::Approx(l2).epsilon(1e-4));
  CHECK(sobolev_norm(g, 1.0) == doctest::Approx(std::sqrt(2) * l2).epsilon(1e-4));
  CHECK(sobolev_norm(g, 0.5) > l2);
}

TEST_CASE("glue and Tanaka functions") {
  const TestFunction psi = psi_glue(4.0, 0.5);
  for (double u : {-3.0, -0.5, -0.0, 0.0}) CHECK(psi(u) == 0.0);
  CHECK(psi(0.25) == doctest::Approx(0.25));
  CHECK(psi(1.1) == 0.0);
  for (double eps : {0.1, 0.5}) {
    const auto h = tanaka(eps);
    CHECK(h(eps) == doctest::Approx(eps / 2));
    CHECK(h(eps / 2) == doctest::Approx(eps / 8));
    CHECK(h(-1.0) == 0.0);
  }
  CHECK(integrate([](double u) { return bump_a(u); }, 0.0, 1.0) == doctest::Approx(1.0));
  CHECK(bump_a_integral(1.0) == doctest::Approx(1.0));
}
