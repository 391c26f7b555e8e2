#include "shelab/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "shelab/errors.hpp"

namespace shelab {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
}

double heat_kernel(const KernelPoint& p) {
  const double r = p.t - p.s;
  if (!(r > 0.0)) return 0.0;
  const double d = p.x - p.y;
  return std::exp(-d * d / (4.0 * r)) / std::sqrt(kFourPi * r);
}

double heat_kernel_dx(const KernelPoint& p) {
  const double r = p.t - p.s;
  if (!(r > 0.0)) return 0.0;
  return -((p.x - p.y) / (2.0 * r)) * heat_kernel(p);
}

double laplace_g(double dist, double nu) {
  if (!(nu > 0.0)) throw DomainError("laplace_g: nu must be positive");
  if (dist < 0.0) throw DomainError("laplace_g: dist must be nonnegative");
  const double rn = std::sqrt(nu);
  return std::exp(-rn * dist) / (2.0 * rn);
}

double l_nu(const LnuSpec& spec, double t) {
  if (!(spec.nu > 0.0)) throw DomainError("l_nu: nu must be positive");
  if (t < 0.0) throw DomainError("l_nu: t must be nonnegative");
  if (t == 0.0) return 0.0;
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double a = spec.nu * t;

  // r in [0,1]: r = 1 - u^2, the integrand |1-r|^{-1/2} dr becomes 2 du.
  auto lower = [a](double u) {
    const double q = u * u;
    return (2.0 - 2.0 * u / std::sqrt(2.0 - q)) * std::exp(-a * (1.0 - q));
  };
  // r in [1,2]: r = 1 + u^2.
  auto middle = [a](double u) {
    const double q = u * u;
    return (2.0 - 2.0 * u / std::sqrt(2.0 + q)) * std::exp(-a * (1.0 + q));
  };
  // r in [2,inf): r = 1/v^2; the difference of inverse roots is rewritten
  // without cancellation.
  auto upper = [a](double v) {
    if (v == 0.0) return 0.0;
    const double q = v * v;
    const double sp = std::sqrt(1.0 + q), sm = std::sqrt(1.0 - q);
    return 4.0 / ((sp + sm) * std::sqrt(1.0 - q * q)) * std::exp(-a / q);
  };

  double err1 = 0, err2 = 0, err3 = 0;
  const double i1 = Quad::integrate(lower, 0.0, 1.0, spec.max_depth, 1e-13, &err1);
  const double i2 = Quad::integrate(middle, 0.0, 1.0, spec.max_depth, 1e-13, &err2);
  const double i3 = Quad::integrate(upper, 0.0, std::sqrt(0.5), spec.max_depth, 1e-13, &err3);
  const double pref = std::sqrt(t / kFourPi);
  const double residual = pref * (err1 + err2 + err3);
  if (!(residual <= spec.abs_tol)) throw NumericalError("l_nu: quadrature did not converge", residual);
  return pref * (i1 + i2 + i3);
}

double image_green(const KernelPoint& p, double x0) {
  KernelPoint mirrored = p;
  mirrored.y = 2.0 * x0 - p.y;
  return heat_kernel(p) - heat_kernel(mirrored);
}

double boundary_kernel(double s, double x, double t, double x0) {
  if (!(x > x0)) throw DomainError("boundary_kernel: requires x > x0");
  const double r = t - s;
  if (!(r > 0.0)) return 0.0;
  return ((x - x0) / r) * heat_kernel({x0, s, x, t});
}

}  // namespace shelab
