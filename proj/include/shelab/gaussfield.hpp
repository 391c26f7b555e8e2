#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "shelab/grid.hpp"
#include "shelab/report.hpp"
#include "shelab/sheet.hpp"

namespace shelab {

/// Covariance kernel of U(x, .): (sqrt(t + t2) - sqrt|t - t2|) / sqrt(4 pi).
double cov_u(double t, double t2);
/// Covariance kernel of dU/dx(x, .): (|t - t2|^{-1/2} - (t + t2)^{-1/2}) / (2 sqrt(4 pi)), t != t2.
double cov_v(double t, double t2);
/// Cov(U(x, t), U(x + dx, t2)) = (1/(2 sqrt(4 pi))) int_{|t-t2|}^{t+t2} r^{-1/2} exp(-dx^2/(4r)) dr.
double cov_u_cross(double dx, double t, double t2);

/// Covariances of cell averages on the grid, exact through closed-form
/// double antiderivatives of both kernels.
Eigen::MatrixXd cell_cov_u(const TimeGrid& grid);
Eigen::MatrixXd cell_cov_v(const TimeGrid& grid);

/// <a_i ; C b_j> with piecewise-constant test functions and exact per-cell
/// kernel integrals (the |t - t'|^{-1/2} diagonal of C2 included).
Eigen::MatrixXd gram_u(const std::vector<TestFunction>& a, const std::vector<TestFunction>& b);
Eigen::MatrixXd gram_v(const std::vector<TestFunction>& a, const std::vector<TestFunction>& b);
/// Symmetric Gram of C1 / C2 over one list; throws NumericalError if the
/// jittered matrix (jitter 1e-12 trace / n) is not positive definite.
Eigen::MatrixXd cov_u_gram(const std::vector<TestFunction>& hs);
Eigen::MatrixXd cov_v_gram(const std::vector<TestFunction>& hs);

inline constexpr double kDefaultTailTol = 1e-8;

/// Half-width sqrt(4 t ln(1/tol)) beyond which the heat kernel at time lag t is below tol.
double gaussian_reach(double t, double tail_tol = kDefaultTailTol);

/// Exponential test function e^{-nu t}, integrated on [0, t_max] with the
/// tail beyond t_max added in closed form.
struct ExpProfile {
  double nu;
  double t_max;
};

/// Cell weights g(y_j, s_k; x, t) of the Green's-function representation.
CellWeights greenrep_weights(const SheetGeometry& geom, double x, double t, double tail_tol = kDefaultTailTol);
double greenrep_eval(const SheetSample& sheet, double x, double t, double tail_tol = kDefaultTailTol);

/// Weights of U(x, h) and dU/dx(x, h): the inner t-integral of g (resp. d_x g)
/// against h, per cell centre, by adaptive Gauss-Kronrod after t = s + w^2.
CellWeights pair_u_weights(const SheetGeometry& geom, double x, const TestFunction& h,
                           double tail_tol = kDefaultTailTol);
CellWeights pair_v_weights(const SheetGeometry& geom, double x, const TestFunction& h,
                           double tail_tol = kDefaultTailTol);
CellWeights pair_u_weights(const SheetGeometry& geom, double x, const ExpProfile& h,
                           double tail_tol = kDefaultTailTol);
CellWeights pair_v_weights(const SheetGeometry& geom, double x, const ExpProfile& h,
                           double tail_tol = kDefaultTailTol);
double pair_u(const SheetSample& sheet, double x, const TestFunction& h);
double pair_v(const SheetSample& sheet, double x, const TestFunction& h);

/// Closed-form inner integrals for the exponential profile over all t > s
/// (used as oracle and for the tail beyond t_max).
double exp_inner_u(double d, double s, double nu, double from_lag = 0.0);
double exp_inner_v(double d, double s, double nu, double from_lag = 0.0);

/// U(y, sqrt(nu) e^{-nu .}) + dU/dx(y, e^{-nu .}), midpoint cell weights.
CellWeights drift_field_weights(const SheetGeometry& geom, double y, double nu, double tail_tol = kDefaultTailTol);
/// Cell averages of 1{y' > y} e^{-nu s'} e^{-sqrt(nu)(y' - y)}.
CellWeights drift_integral_weights(const SheetGeometry& geom, double y, double nu,
                                   double tail_tol = kDefaultTailTol);
double drift_field_form(const SheetSample& sheet, double y, double nu);
double drift_integral_form(const SheetSample& sheet, double y, double nu);
/// Variance of the drift integral: (1/(2 nu)) (1/(2 sqrt(nu))).
double drift_variance(double nu);

/// Laplace transform at nu2 of C_y e^{-nu .}, built by nested composite
/// Gauss-Legendre quadrature of the kernel with `panels` panels per axis.
double cameron_martin_laplace(double nu, double nu2, double y_gap, int panels);
/// laplace_g(gap, nu2) laplace_g(gap, nu) / ((sqrt nu2 + sqrt nu)(nu2 + nu)).
double cameron_martin_target(double nu, double nu2, double y_gap);
VerificationReport verify_cameron_martin_laplace(double nu, double nu2, double y_gap, int panels = 32);

}  // namespace shelab
