#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>

namespace roughldp::quad {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 21-point Gauss-Kronrod on [a, b] for integrands that are smooth
/// on a neighbourhood of the interval. The rule's error floor is absolute,
/// so bisection depth is kept shallow.
template <class F>
Estimate smooth(F&& f, double a, double b, double rel_tol, unsigned max_depth = 8) {
  Estimate out;
  out.value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      f, a, b, max_depth, rel_tol, &out.error);
  return out;
}

/// Integral over [lo, lo + width] of an integrand with integrable algebraic
/// singularities at either end, by double-exponential (tanh-sinh) quadrature.
/// The integrand is called as f(x, x - lo, lo + width - x) with both distances
/// taken from the rule's own abscissae, so they stay exact even where x
/// rounds onto an endpoint or width is far below the spacing of doubles at lo.
template <class F>
Estimate weakly_singular(F&& f, double lo, double width, double rel_tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  auto g = [&](double z, double zc) {
    // Abscissae are drawn on [0, 1]; a distance that underflows to zero sits
    // in a weight of the same order and contributes nothing.
    const double near = std::abs(zc) * width;
    if (near == 0.0) return 0.0;
    if (zc < 0.0) return f(lo + near, near, width - near);
    return f(lo + z * width, z * width, near);
  };
  Estimate out;
  double l1 = 0.0;
  out.value = width * rule.integrate(g, 0.0, 1.0, rel_tol, &out.error, &l1);
  out.error *= width;
  return out;
}

}  // namespace roughldp::quad
