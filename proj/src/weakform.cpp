#include "shelab/weakform.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "shelab/errors.hpp"
#include "shelab/fracops.hpp"
#include "shelab/gaussfield.hpp"

namespace shelab {

namespace {

constexpr double kSqrtFourPi = 3.5449077018110320546;

void check_setup(const WeakFormSetup& s) {
  if (!is_power_of_two(s.n)) throw DomainError("weak form: n must be a power of two");
  if (!(s.dx > 0.0) || !(s.dy > 0.0) || !(s.t_max > 0.0)) throw DomainError("weak form: grid sizes must be positive");
}

// One separable piece a(x) b(t) of the bracket.
struct Piece {
  std::vector<double> a;
  std::vector<double> b;
};

std::vector<double> x_nodes(const SpaceTimeTest& f, double dx) {
  const double lo = f.x_lo(), hi = f.x_hi();
  const auto nx = static_cast<std::size_t>(std::ceil((hi - lo) / dx - 1e-9));
  std::vector<double> x(nx);
  for (std::size_t l = 0; l < nx; ++l) x[l] = lo + (static_cast<double>(l) + 0.5) * dx;
  return x;
}

std::vector<Piece> bracket_pieces(const SpaceTimeTest& f, const WeakFormSetup& setup, const std::vector<double>& x) {
  check_setup(setup);
  if (f.terms.empty()) throw DomainError("weak form: empty test function");
  const TimeGrid grid(setup.t_max, setup.n);
  const SpectralPlan plan(grid, setup.padding);
  std::vector<Piece> pieces;
  for (const auto& term : f.terms) {
    if (!(term.x_radius > 0.0)) throw DomainError("weak form: x radius must be positive");
    // TestFunction enforces the time support inside (0, t_max).
    const TestFunction psi(term.t_center, term.t_radius, 1.0, grid);
    const auto psa = antisym_extend(psi.samples());
    const auto half = restrict_positive(frac_laplacian(psa, 1.0, plan));
    const auto quarter = restrict_positive(frac_laplacian(psa, 0.5, plan));
    Piece p2{{}, psi.samples()}, p0{{}, half}, p1{{}, quarter};
    for (double xv : x) {
      p2.a.push_back(term.coef * bump_second_derivative(xv, term.x_center, term.x_radius));
      p0.a.push_back(term.coef * bump_value(xv, term.x_center, term.x_radius));
      p1.a.push_back(-std::sqrt(2.0) * term.coef * bump_derivative(xv, term.x_center, term.x_radius));
    }
    pieces.push_back(std::move(p2));
    pieces.push_back(std::move(p0));
    pieces.push_back(std::move(p1));
  }
  return pieces;
}

void check_sheet(const SheetGeometry& geom, const SpaceTimeTest& f, const WeakFormSetup& setup) {
  const double reach = gaussian_reach(setup.t_max, setup.tail_tol);
  if (geom.y_min > f.x_lo() - reach || geom.y_max() < f.x_hi() + reach)
    throw DomainError("weak form: support violation, the sheet does not cover the x support plus the kernel reach");
  const double dt = setup.t_max / static_cast<double>(setup.n);
  if (std::abs(geom.ds - 0.5 * dt) > 1e-12 * dt || geom.s_max() < setup.t_max * (1.0 - 1e-12))
    throw DomainError("weak form: sheet time cells must be dt/2 and cover [0, t_max]");
}

}  // namespace

double SpaceTimeTest::x_lo() const {
  double v = terms.empty() ? 0.0 : terms.front().x_center - terms.front().x_radius;
  for (const auto& t : terms) v = std::min(v, t.x_center - t.x_radius);
  return v;
}

double SpaceTimeTest::x_hi() const {
  double v = terms.empty() ? 0.0 : terms.front().x_center + terms.front().x_radius;
  for (const auto& t : terms) v = std::max(v, t.x_center + t.x_radius);
  return v;
}

SheetGeometry weakform_geometry(const std::vector<SpaceTimeTest>& fs, const WeakFormSetup& setup) {
  check_setup(setup);
  if (fs.empty()) throw DomainError("weak form: no test functions");
  double lo = fs.front().x_lo(), hi = fs.front().x_hi();
  for (const auto& f : fs) {
    lo = std::min(lo, f.x_lo());
    hi = std::max(hi, f.x_hi());
  }
  const double reach = gaussian_reach(setup.t_max, setup.tail_tol);
  const double y_min = setup.dy * std::floor((lo - reach) / setup.dy);
  const double y_max = y_min + setup.dy * std::ceil((hi + reach - y_min) / setup.dy);
  const double dt = setup.t_max / static_cast<double>(setup.n);
  return SheetGeometry::make({y_min, y_max, setup.t_max}, setup.dy, 0.5 * dt);
}

Bracket weakform_bracket(const SpaceTimeTest& f, const WeakFormSetup& setup) {
  const auto x = x_nodes(f, setup.dx);
  const auto pieces = bracket_pieces(f, setup, x);
  const TimeGrid grid(setup.t_max, setup.n);
  Bracket br{x, grid, std::vector<double>(x.size() * setup.n, 0.0)};
  for (const auto& p : pieces)
    for (std::size_t l = 0; l < x.size(); ++l)
      for (std::size_t i = 0; i < setup.n; ++i) br.values[l * setup.n + i] += p.a[l] * p.b[i];
  return br;
}

double weakform_residual(const SheetSample& sheet, const SpaceTimeTest& f, const WeakFormSetup& setup) {
  check_sheet(sheet.geom, f, setup);
  const Bracket br = weakform_bracket(f, setup);
  const std::size_t n = setup.n;
  double acc = 0.0;
  for (std::size_t l = 0; l < br.x.size(); ++l)
    for (std::size_t i = 0; i < n; ++i) {
      const double b = br.values[l * n + i];
      if (b == 0.0) continue;
      acc += greenrep_eval(sheet, br.x[l], br.grid.node(i), setup.tail_tol) * b;
    }
  return acc * setup.dx * br.grid.dt();
}

CellWeights weakform_weights(const SheetGeometry& geom, const SpaceTimeTest& f, const WeakFormSetup& setup) {
  check_sheet(geom, f, setup);
  const auto x = x_nodes(f, setup.dx);
  const auto pieces = bracket_pieces(f, setup, x);
  const std::size_t n = setup.n, ns = geom.ns, nx = x.size(), np = pieces.size();
  const double dt = setup.t_max / static_cast<double>(n);
  const double ds = geom.ds;
  CellWeights w(geom);
  // t_i = (2i + 1) ds and s_k = (k + 1/2) ds, so the lag t_i - s_k depends on
  // m = 2i - k >= 0 only: r_m = (m + 1/2) ds.
  const auto ny = static_cast<std::ptrdiff_t>(geom.ny);
#pragma omp parallel
  {
    std::vector<double> ga(np);
#pragma omp for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < ny; ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      const double y = geom.y_center(j);
      for (std::size_t m = 0; m < 2 * n; ++m) {
        const double r = (static_cast<double>(m) + 0.5) * ds;
        const double norm = 1.0 / (kSqrtFourPi * std::sqrt(r));
        std::fill(ga.begin(), ga.end(), 0.0);
        bool any = false;
        for (std::size_t l = 0; l < nx; ++l) {
          const double d = x[l] - y;
          const double e = d * d / (4.0 * r);
          if (e > 40.0) continue;
          const double g = std::exp(-e) * norm * setup.dx;
          for (std::size_t p = 0; p < np; ++p) ga[p] += g * pieces[p].a[l];
          any = true;
        }
        if (!any) continue;
        // pairs (i, k) with 2i - k = m, 0 <= k < ns, 0 <= i < n
        for (std::size_t k = m % 2; k < ns; k += 2) {
          const std::size_t i = (m + k) / 2;
          if (i >= n) break;
          double acc = 0.0;
          for (std::size_t p = 0; p < np; ++p) acc += ga[p] * pieces[p].b[i];
          w.at(j, k) += acc * dt;
        }
      }
    }
  }
  return w;
}

double weakform_norm2(const SpaceTimeTest& f) {
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  double total = 0.0;
  for (const auto& a : f.terms)
    for (const auto& b : f.terms) {
      auto fx = [&](double x) {
        return bump_value(x, a.x_center, a.x_radius) * bump_value(x, b.x_center, b.x_radius);
      };
      auto ft = [&](double t) {
        return bump_value(t, a.t_center, a.t_radius) * bump_value(t, b.t_center, b.t_radius);
      };
      const double xlo = std::max(a.x_center - a.x_radius, b.x_center - b.x_radius);
      const double xhi = std::min(a.x_center + a.x_radius, b.x_center + b.x_radius);
      const double tlo = std::max(a.t_center - a.t_radius, b.t_center - b.t_radius);
      const double thi = std::min(a.t_center + a.t_radius, b.t_center + b.t_radius);
      if (xhi <= xlo || thi <= tlo) continue;
      double e = 0.0;
      total += a.coef * b.coef * Quad::integrate(fx, xlo, xhi, 15, 1e-13, &e) * Quad::integrate(ft, tlo, thi, 15, 1e-13, &e);
    }
  return total;
}

}  // namespace shelab
