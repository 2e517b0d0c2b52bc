#pragma once

#include <functional>

namespace bcl {

// Adaptive Gauss-Kronrod on [a, b], split into `panels` equal pieces first
// so that narrow peaks are not missed.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                 int panels = 8);

}  // namespace bcl
