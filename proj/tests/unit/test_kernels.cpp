#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "bcl/kernels.hpp"
#include "bcl/rng.hpp"

using namespace bcl;

namespace {

std::vector<double> gamma_sites(std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(m);
  for (double& v : x) v = gamma_variate(rng, 1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("drift kernels: OpenMP matches serial bit-exactly") {
  const auto in = gamma_sites(10007, 1);
  std::vector<double> a(in.size()), b(in.size());
  CHECK(drift_kernel(in.data(), a.data(), in.size(), 3e-3, Backend::serial) == in.size());
  CHECK(drift_kernel(in.data(), b.data(), in.size(), 3e-3, Backend::openmp) == in.size());
  CHECK(a == b);
}

TEST_CASE("drift conserves the total energy") {
  const auto in = gamma_sites(4096, 2);
  std::vector<double> out(in.size());
  drift_kernel(in.data(), out.data(), in.size(), 1e-2, Backend::serial);
  const double s0 = std::accumulate(in.begin(), in.end(), 0.0);
  const double s1 = std::accumulate(out.begin(), out.end(), 0.0);
  CHECK(std::abs(s1 - s0) <= 1e-12 * s0);
}

TEST_CASE("constant profile is a fixed point; c = 0 is the identity") {
  std::vector<double> in(64, 1.3), out(64);
  drift_kernel(in.data(), out.data(), in.size(), 0.05, Backend::serial);
  CHECK(out == in);
  const auto x = gamma_sites(64, 3);
  drift_kernel(x.data(), out.data(), x.size(), 0.0, Backend::serial);
  CHECK(out == x);
}

TEST_CASE("drift reports a nonfinite site") {
  std::vector<double> in(16, 1.0), out(16);
  in[5] = 1e308;
  in[4] = 1e308;
  CHECK(drift_kernel(in.data(), out.data(), in.size(), 1.0, Backend::serial) < in.size());
}

TEST_CASE("field kernel: backends agree and sums match a direct loop") {
  const std::size_t m = 5000;
  const auto xi = gamma_sites(m + 2, 4);
  std::vector<double> h(m + 2), hp(m + 2);
  const double n = 64.0;
  for (std::size_t i = 0; i < m + 2; ++i) {
    const double u = (static_cast<double>(i) - 2500.0) / n;
    h[i] = std::exp(-u * u);
    hp[i] = -2 * u * h[i];
  }
  const FieldSums a = field_kernel(xi.data(), h.data(), hp.data(), m, 1.0, n, Backend::serial);
  const FieldSums b = field_kernel(xi.data(), h.data(), hp.data(), m, 1.0, n, Backend::openmp);
  CHECK(b.y == doctest::Approx(a.y).epsilon(1e-12));
  CHECK(b.nonlin == doctest::Approx(a.nonlin).epsilon(1e-12));
  CHECK(b.qv == doctest::Approx(a.qv).epsilon(1e-12));
  double y = 0;
  for (std::size_t j = 1; j <= m; ++j) y += h[j] * (xi[j] - 1.0);
  CHECK(a.y == doctest::Approx(y).epsilon(1e-12));
}
