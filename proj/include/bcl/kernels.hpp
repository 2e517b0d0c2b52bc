#pragma once

#include <cstddef>

namespace bcl {

// The serial kernels are the reference; the OpenMP ones must agree with them
// (bit-exactly for elementwise kernels, to rounding for reductions).
enum class Backend { serial, openmp };

// RK4 step of d xi_i = c xi_i (xi_{i+1} - xi_{i-1}) on a ring of length m.
// Returns the index of the first nonfinite or nonpositive output, or m if all are finite.
std::size_t drift_kernel(const double* in, double* out, std::size_t m, double c, Backend b);

// Sums entering the field, its generator and the QV integrand.  Inputs are
// aligned arrays over sites x_0 - 1, ..., x_0 + m: `xi` are raw energies,
// `h` the test function at (x + shift)/n and `hp` its derivative there.
struct FieldSums {
  double y = 0.0;          // sum h_x xibar_x
  double lap = 0.0;        // sum Delta_n h_x xibar_x
  double nonlin = 0.0;     // sum grad_n h_x xibar_x xibar_{x+1}
  double mismatch = 0.0;   // sum (hp_x - grad_n h_x) xibar_x
  double qv = 0.0;         // sum (grad_n h_x)^2 (xi_{x+1} - xi_x)^2
};

FieldSums field_kernel(const double* xi, const double* h, const double* hp, std::size_t m,
                       double rho, double n, Backend b);

}  // namespace bcl
