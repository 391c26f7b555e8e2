#pragma once

// Heat-kernel family on the space-time half plane and the l_nu test function.

namespace shelab {

struct KernelPoint {
  double y;  // source position
  double s;  // source time
  double x;  // field position
  double t;  // field time
};

/// g(y,s;x,t) = (4 pi (t-s))^{-1/2} exp(-(x-y)^2 / (4 (t-s))) for t > s, else 0.
double heat_kernel(const KernelPoint& p);

/// Spatial derivative of the heat kernel in the field position x.
double heat_kernel_dx(const KernelPoint& p);

/// Laplace transform in time of g_y^{x0}: exp(-sqrt(nu) dist) / (2 sqrt(nu)).
double laplace_g(double dist, double nu);

struct LnuSpec {
  double nu = 1.0;
  double abs_tol = 1e-9;
  unsigned max_depth = 20;
};

/// l_nu(t) = (4 pi |.|)^{-1/2} * (e^{-nu .})^a evaluated at t >= 0.
/// The r-integral is split at r = 1 and r = 2 with square-root substitutions
/// that remove the |1-r|^{-1/2} singularity and map [2, inf) to a finite range.
double l_nu(const LnuSpec& spec, double t);

/// Dirichlet kernel for the half plane {x > x0}: g(y,s;x,t) - g(2 x0 - y,s;x,t).
double image_green(const KernelPoint& p, double x0);

/// 2 d/dy g(y,s;x,t) at y = x0, i.e. ((x - x0)/(t - s)) g(x0,s;x,t). Requires x > x0.
double boundary_kernel(double s, double x, double t, double x0);

}  // namespace shelab
