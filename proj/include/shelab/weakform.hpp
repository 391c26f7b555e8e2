#pragma once

#include <vector>

#include "shelab/grid.hpp"
#include "shelab/sheet.hpp"

namespace shelab {

/// coef * phi(x) psi(t) with phi, psi smooth bumps.
struct TensorBump {
  double coef = 1.0;
  double x_center = 0.0, x_radius = 1.0;
  double t_center = 2.0, t_radius = 1.0;
};

/// A 2-D test function f(x, t) = sum of tensor bumps.
struct SpaceTimeTest {
  std::vector<TensorBump> terms;
  double x_lo() const;
  double x_hi() const;
};

struct WeakFormSetup {
  double t_max = 8.0;
  std::size_t n = 256;       // t nodes of the U table
  double dx = 0.025;         // x spacing of the U table
  double dy = 0.05;          // sheet cell width
  double tail_tol = 1e-8;
  std::size_t padding = 4;
};

/// Sheet for a family of test functions: cells of dy x dt/2 so that every
/// t node lies on a cell edge; y range padded by the heat-kernel reach.
SheetGeometry weakform_geometry(const std::vector<SpaceTimeTest>& fs, const WeakFormSetup& setup);

/// The bracket d_x^2 f + (-d_t^2)^{1/2} f^a - sqrt(2) d_x (-d_t^2)^{1/4} f^a on
/// the (x, t) table; row-major in x. Throws DomainError on support violations.
struct Bracket {
  std::vector<double> x;
  TimeGrid grid;
  std::vector<double> values;
};
Bracket weakform_bracket(const SpaceTimeTest& f, const WeakFormSetup& setup);

/// eta(f) = sum_{x,t} U(x, t) bracket(x, t) dx dt with U from greenrep_eval.
double weakform_residual(const SheetSample& sheet, const SpaceTimeTest& f, const WeakFormSetup& setup);

/// The same functional as cell weights: w_jk = sum_{x,t} g(y_j, s_k; x, t) bracket(x, t) dx dt.
CellWeights weakform_weights(const SheetGeometry& geom, const SpaceTimeTest& f, const WeakFormSetup& setup);

/// ||f||^2 over the half plane, by quadrature of the factors.
double weakform_norm2(const SpaceTimeTest& f);

}  // namespace shelab
