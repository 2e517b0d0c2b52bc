// Serial reference against OpenMP kernels.  Usage: bench_kernels [sites] [reps]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <omp.h>

#include "bcl/kernels.hpp"
#include "bcl/rng.hpp"

namespace {

template <class F>
double time_ms(int reps, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t m = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1 << 20;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 50;

  bcl::Rng rng(7);
  std::vector<double> xi(m + 2), h(m + 2), hp(m + 2), out(m);
  for (std::size_t i = 0; i < m + 2; ++i) {
    xi[i] = bcl::gamma_variate(rng, 1.0, 1.0);
    const double u = (static_cast<double>(i) - 0.5 * m) / (0.1 * m);
    h[i] = std::exp(-u * u);
    hp[i] = -2.0 * u * h[i];
  }

  std::printf("threads %d, sites %zu, reps %d\n", omp_get_max_threads(), m, reps);
  std::printf("%-8s %12s %12s %9s %s\n", "kernel", "serial_ms", "openmp_ms", "speedup", "check");

  std::vector<double> ref(m);
  const double ds = time_ms(reps, [&] {
    bcl::drift_kernel(xi.data(), ref.data(), m, 1e-3, bcl::Backend::serial);
  });
  const double dp = time_ms(reps, [&] {
    bcl::drift_kernel(xi.data(), out.data(), m, 1e-3, bcl::Backend::openmp);
  });
  std::printf("%-8s %12.3f %12.3f %9.2f %s\n", "drift", ds, dp, ds / dp,
              ref == out ? "bit-exact" : "MISMATCH");

  bcl::FieldSums a, b;
  const double fs = time_ms(reps, [&] {
    a = bcl::field_kernel(xi.data(), h.data(), hp.data(), m, 1.0, 64.0, bcl::Backend::serial);
  });
  const double fp = time_ms(reps, [&] {
    b = bcl::field_kernel(xi.data(), h.data(), hp.data(), m, 1.0, 64.0, bcl::Backend::openmp);
  });
  const double rel = std::abs(a.nonlin - b.nonlin) / (std::abs(a.nonlin) + 1e-300);
  std::printf("%-8s %12.3f %12.3f %9.2f rel diff %.2e\n", "field", fs, fp, fs / fp, rel);
  return 0;
}
