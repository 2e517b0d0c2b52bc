#include "bcl/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bcl {

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int panels) {
  if (!(b > a)) return 0.0;
  const double w = (b - a) / panels;
  double s = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * w;
    const double hi = i + 1 == panels ? b : lo + w;
    s += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 12, tol);
  }
  return s;
}

}  // namespace bcl
