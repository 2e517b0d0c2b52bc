#include "bcl/kernels.hpp"

#include <cmath>
#include <algorithm>
#include <vector>

namespace bcl {

namespace {

// f_i = x_i (x_{i+1} - x_{i-1}) on the ring
inline double flux(const double* x, std::size_t i, std::size_t m) {
  const double right = x[i + 1 < m ? i + 1 : 0];
  const double left = x[i > 0 ? i - 1 : m - 1];
  return x[i] * (right - left);
}

struct Rk4Scratch {
  std::vector<double> k, stage, acc;
  void resize(std::size_t m) {
    k.resize(m);
    stage.resize(m);
    acc.resize(m);
  }
};

// Classical RK4.  Every stage is a linear combination, so sum_i x_i is
// conserved up to rounding; the serial and OpenMP loops do identical
// arithmetic per site.
template <bool Parallel>
std::size_t drift_rk4(const double* in, double* out, std::size_t m, double c) {
  thread_local Rk4Scratch s;
  s.resize(m);
  double* k = s.k.data();
  double* st = s.stage.data();
  double* acc = s.acc.data();
  const auto mm = static_cast<long>(m);
  const double w[4] = {0.5, 0.5, 1.0, 0.0};
  const double b[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
  const double* x = in;
  for (int r = 0; r < 4; ++r) {
#pragma omp parallel for schedule(static) if (Parallel)
    for (long i = 0; i < mm; ++i) k[i] = c * flux(x, static_cast<std::size_t>(i), m);
#pragma omp parallel for schedule(static) if (Parallel)
    for (long i = 0; i < mm; ++i) {
      acc[i] = (r == 0 ? in[i] : acc[i]) + b[r] * k[i];
      if (r < 3) st[i] = in[i] + w[r] * k[i];
    }
    x = st;
  }
  long bad = mm;
#pragma omp parallel for reduction(min : bad) schedule(static) if (Parallel)
  for (long i = 0; i < mm; ++i) {
    out[i] = acc[i];
    if (!std::isfinite(acc[i]) || !(acc[i] > 0.0)) bad = std::min(bad, i);
  }
  return static_cast<std::size_t>(bad);
}

// one site of the field sums; j indexes the inner range 1..m
inline void field_site(const double* xi, const double* h, const double* hp, std::size_t j,
                       double rho, double n, FieldSums& s) {
  const double xb = xi[j] - rho;
  const double grad = n * (h[j + 1] - h[j]);
  const double lap = n * n * (h[j + 1] + h[j - 1] - 2.0 * h[j]);
  const double dxi = xi[j + 1] - xi[j];
  s.y += h[j] * xb;
  s.lap += lap * xb;
  s.nonlin += grad * xb * (xi[j + 1] - rho);
  s.mismatch += (hp[j] - grad) * xb;
  s.qv += grad * grad * dxi * dxi;
}

}  // namespace

std::size_t drift_kernel(const double* in, double* out, std::size_t m, double c, Backend b) {
  if (m < 3) return m;
  return b == Backend::openmp ? drift_rk4<true>(in, out, m, c) : drift_rk4<false>(in, out, m, c);
}

FieldSums field_kernel(const double* xi, const double* h, const double* hp, std::size_t m,
                       double rho, double n, Backend b) {
  FieldSums s;
  // the left guard site contributes to the gradient terms of x_0 - 1
  {
    const double grad = n * (h[1] - h[0]);
    const double dxi = xi[1] - xi[0];
    const double xb = xi[0] - rho;
    s.nonlin += grad * xb * (xi[1] - rho);
    s.qv += grad * grad * dxi * dxi;
  }
  if (b == Backend::serial) {
    for (std::size_t j = 1; j <= m; ++j) field_site(xi, h, hp, j, rho, n, s);
    return s;
  }
  double y = 0, lap = 0, nonlin = 0, mism = 0, qv = 0;
  const auto mm = static_cast<long>(m);
#pragma omp parallel for reduction(+ : y, lap, nonlin, mism, qv) schedule(static)
  for (long j = 1; j <= mm; ++j) {
    FieldSums t;
    field_site(xi, h, hp, static_cast<std::size_t>(j), rho, n, t);
    y += t.y;
    lap += t.lap;
    nonlin += t.nonlin;
    mism += t.mismatch;
    qv += t.qv;
  }
  s.y += y;
  s.lap += lap;
  s.nonlin += nonlin;
  s.mismatch += mism;
  s.qv += qv;
  return s;
}

}  // namespace bcl
