#include "shelab/gaussfield.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "shelab/errors.hpp"
#include "shelab/kernels.hpp"

namespace shelab {

namespace {

constexpr double kSqrtFourPi = 3.5449077018110320546;
constexpr double kNegligibleExponent = 40.0;

template <class F>
double gk(F f, double a, double b) {
  if (!(b > a)) return 0.0;
  using Quad = boost::math::quadrature::gauss_kronrod<double, 21>;
  double err = 0.0;
  return Quad::integrate(f, a, b, 12, 1e-11, &err);
}

// Gauss-Kronrod with an extra breakpoint where the integrand peaks.
template <class F>
double gk_split(F f, double a, double b, double mid) {
  if (mid > a && mid < b) return gk(f, a, mid) + gk(f, mid, b);
  return gk(f, a, b);
}

double phi_u(double x) { return (4.0 / 15.0) * std::pow(std::abs(x), 2.5); }
double phi_v(double x) { return (4.0 / 3.0) * std::pow(std::abs(x), 1.5); }

// int_a^b int_c^d phi''(t + t') and phi''(t - t') through second antiderivatives.
template <class Phi>
double cell_sum(Phi phi, double a, double b, double c, double d) {
  return phi(b + d) - phi(a + d) - phi(b + c) + phi(a + c);
}
template <class Phi>
double cell_diff(Phi phi, double a, double b, double c, double d) {
  return phi(b - c) - phi(a - c) - phi(b - d) + phi(a - d);
}

double cell_kernel_u(double a, double b, double c, double d) {
  return (cell_sum(phi_u, a, b, c, d) - cell_diff(phi_u, a, b, c, d)) / kSqrtFourPi;
}
double cell_kernel_v(double a, double b, double c, double d) {
  return (cell_diff(phi_v, a, b, c, d) - cell_sum(phi_v, a, b, c, d)) / (2.0 * kSqrtFourPi);
}

template <class K>
Eigen::MatrixXd cell_cov(const TimeGrid& g, K kernel) {
  const std::size_t n = g.size();
  const double dt = g.dt();
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) * dt;
    for (std::size_t j = 0; j <= i; ++j) {
      const double c = static_cast<double>(j) * dt;
      const double v = kernel(a, a + dt, c, c + dt) / (dt * dt);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

std::pair<std::size_t, std::size_t> support_range(const TestFunction& h) {
  const TimeGrid& g = h.grid();
  const auto& v = h.samples();
  std::size_t lo = g.size(), hi = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (v[k] != 0.0) {
      lo = std::min(lo, k);
      hi = k + 1;
    }
  }
  if (lo >= hi) return {0, 0};
  return {lo, hi};
}

template <class K>
Eigen::MatrixXd gram(const std::vector<TestFunction>& a, const std::vector<TestFunction>& b, K kernel) {
  Eigen::MatrixXd m(a.size(), b.size());
  for (std::size_t p = 0; p < a.size(); ++p) {
    for (std::size_t q = 0; q < b.size(); ++q) {
      if (!(a[p].grid() == b[q].grid())) throw DomainError("gram: test functions on different grids");
      const TimeGrid& g = a[p].grid();
      const double dt = g.dt();
      const auto [alo, ahi] = support_range(a[p]);
      const auto [blo, bhi] = support_range(b[q]);
      const auto& av = a[p].samples();
      const auto& bv = b[q].samples();
      double acc = 0.0;
      for (std::size_t i = alo; i < ahi; ++i) {
        const double ti = static_cast<double>(i) * dt;
        double row = 0.0;
        for (std::size_t j = blo; j < bhi; ++j) {
          const double tj = static_cast<double>(j) * dt;
          row += kernel(ti, ti + dt, tj, tj + dt) * bv[j];
        }
        acc += av[i] * row;
      }
      m(p, q) = acc;
    }
  }
  return m;
}

void check_psd(const Eigen::MatrixXd& g, const char* what) {
  const double n = static_cast<double>(g.rows());
  const double jitter = 1e-12 * g.trace() / n;
  Eigen::MatrixXd j = g + jitter * Eigen::MatrixXd::Identity(g.rows(), g.cols());
  Eigen::LLT<Eigen::MatrixXd> llt(j);
  if (llt.info() != Eigen::Success) {
    const double mn = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff();
    throw NumericalError(std::string(what) + ": Gram matrix not positive definite after jitter", mn);
  }
}

// Sheet must extend `reach` beyond x on both sides and up to s_needed in time.
void check_coverage(const SheetGeometry& geom, double x, double reach, double s_needed, const char* what) {
  if (geom.y_min > x - reach)
    throw DomainError(std::string(what) + ": sheet does not cover the kernel support on the left side (needs y_min <= " +
                      std::to_string(x - reach) + ")");
  if (geom.y_max() < x + reach)
    throw DomainError(std::string(what) + ": sheet does not cover the kernel support on the right side (needs y_max >= " +
                      std::to_string(x + reach) + ")");
  if (geom.s_max() < s_needed * (1.0 - 1e-12))
    throw DomainError(std::string(what) + ": sheet does not cover the source times (needs s_max >= " +
                      std::to_string(s_needed) + ")");
}

// Integrands of the inner t-integrals after t = s + w^2, for profile values p(t).
//   u: (2 / sqrt(4 pi)) exp(-d^2 / (4 w^2)) p(s + w^2)
//   v: -(d / sqrt(4 pi)) exp(-d^2 / (4 w^2)) / w^2 p(s + w^2),   d = x - y'
template <class P>
double inner_u(double d, double s, double w_lo, double w_hi, P profile) {
  auto f = [&](double w) {
    if (w == 0.0) return 0.0;
    return 2.0 / kSqrtFourPi * std::exp(-d * d / (4.0 * w * w)) * profile(s + w * w);
  };
  return gk_split(f, w_lo, w_hi, 0.5 * std::abs(d));
}

template <class P>
double inner_v(double d, double s, double w_lo, double w_hi, P profile) {
  if (d == 0.0) return 0.0;
  auto f = [&](double w) {
    if (w == 0.0) return 0.0;
    return -d / kSqrtFourPi * std::exp(-d * d / (4.0 * w * w)) / (w * w) * profile(s + w * w);
  };
  return gk_split(f, w_lo, w_hi, 0.5 * std::abs(d));
}

template <class Fill>
CellWeights fill_weights(const SheetGeometry& geom, Fill fill) {
  CellWeights w(geom);
  const auto ny = static_cast<std::ptrdiff_t>(geom.ny);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    for (std::size_t k = 0; k < geom.ns; ++k) w.at(static_cast<std::size_t>(j), k) = fill(static_cast<std::size_t>(j), k);
  }
  return w;
}

}  // namespace

double cov_u(double t, double t2) {
  if (t < 0.0 || t2 < 0.0) throw DomainError("cov_u: times must be nonnegative");
  return (std::sqrt(t + t2) - std::sqrt(std::abs(t - t2))) / kSqrtFourPi;
}

double cov_v(double t, double t2) {
  if (t < 0.0 || t2 < 0.0) throw DomainError("cov_v: times must be nonnegative");
  if (t == t2) return std::numeric_limits<double>::infinity();
  return (1.0 / std::sqrt(std::abs(t - t2)) - 1.0 / std::sqrt(t + t2)) / (2.0 * kSqrtFourPi);
}

double cov_u_cross(double dx, double t, double t2) {
  if (t < 0.0 || t2 < 0.0) throw DomainError("cov_u_cross: times must be nonnegative");
  const double lo = std::sqrt(std::abs(t - t2)), hi = std::sqrt(t + t2);
  if (dx == 0.0) return (hi - lo) / kSqrtFourPi;
  auto f = [dx](double w) { return w == 0.0 ? 0.0 : std::exp(-dx * dx / (4.0 * w * w)); };
  return gk(f, lo, hi) / kSqrtFourPi;
}

Eigen::MatrixXd cell_cov_u(const TimeGrid& grid) { return cell_cov(grid, cell_kernel_u); }
Eigen::MatrixXd cell_cov_v(const TimeGrid& grid) { return cell_cov(grid, cell_kernel_v); }

Eigen::MatrixXd gram_u(const std::vector<TestFunction>& a, const std::vector<TestFunction>& b) {
  return gram(a, b, cell_kernel_u);
}
Eigen::MatrixXd gram_v(const std::vector<TestFunction>& a, const std::vector<TestFunction>& b) {
  return gram(a, b, cell_kernel_v);
}

Eigen::MatrixXd cov_u_gram(const std::vector<TestFunction>& hs) {
  if (hs.empty()) throw DomainError("cov_u_gram: empty list");
  Eigen::MatrixXd g = gram_u(hs, hs);
  g = 0.5 * (g + g.transpose()).eval();
  check_psd(g, "cov_u_gram");
  return g;
}

Eigen::MatrixXd cov_v_gram(const std::vector<TestFunction>& hs) {
  if (hs.empty()) throw DomainError("cov_v_gram: empty list");
  Eigen::MatrixXd g = gram_v(hs, hs);
  g = 0.5 * (g + g.transpose()).eval();
  check_psd(g, "cov_v_gram");
  return g;
}

double gaussian_reach(double t, double tail_tol) { return std::sqrt(4.0 * std::max(t, 0.0) * std::log(1.0 / tail_tol)); }

CellWeights greenrep_weights(const SheetGeometry& geom, double x, double t, double tail_tol) {
  check_coverage(geom, x, gaussian_reach(t, tail_tol), t, "greenrep_eval");
  CellWeights w(geom);
  for (std::size_t j = 0; j < geom.ny; ++j) {
    const double y = geom.y_center(j);
    for (std::size_t k = 0; k < geom.ns; ++k) w.at(j, k) = heat_kernel({y, geom.s_center(k), x, t});
  }
  return w;
}

double greenrep_eval(const SheetSample& sheet, double x, double t, double tail_tol) {
  const SheetGeometry& geom = sheet.geom;
  check_coverage(geom, x, gaussian_reach(t, tail_tol), t, "greenrep_eval");
  double acc = 0.0;
  for (std::size_t j = 0; j < geom.ny; ++j) {
    const double y = geom.y_center(j);
    for (std::size_t k = 0; k < geom.ns; ++k) {
      const double s = geom.s_center(k);
      if (s >= t) break;
      acc += heat_kernel({y, s, x, t}) * sheet.at(j, k);
    }
  }
  return acc;
}

namespace {

template <bool Derivative>
CellWeights bump_pair_weights(const SheetGeometry& geom, double x, const TestFunction& h, double tail_tol) {
  const double lo = h.support_lo(), hi = h.support_hi();
  check_coverage(geom, x, gaussian_reach(hi, tail_tol), hi, Derivative ? "pair_v" : "pair_u");
  auto profile = [&h](double t) { return h.value(t); };
  return fill_weights(geom, [&](std::size_t j, std::size_t k) {
    const double s = geom.s_center(k);
    if (s >= hi) return 0.0;
    const double d = x - geom.y_center(j);
    if (d * d / (4.0 * (hi - s)) > kNegligibleExponent) return 0.0;
    const double w_lo = std::sqrt(std::max(0.0, lo - s)), w_hi = std::sqrt(hi - s);
    return Derivative ? inner_v(d, s, w_lo, w_hi, profile) : inner_u(d, s, w_lo, w_hi, profile);
  });
}

double exp_reach(const ExpProfile& h, double tail_tol) {
  return std::max(gaussian_reach(h.t_max, tail_tol), std::log(1.0 / tail_tol) / std::sqrt(h.nu));
}

template <bool Derivative>
CellWeights exp_pair_weights(const SheetGeometry& geom, double x, const ExpProfile& h, double tail_tol) {
  if (!(h.nu > 0.0)) throw DomainError("exponential profile: nu must be positive");
  check_coverage(geom, x, exp_reach(h, tail_tol), h.t_max, Derivative ? "pair_v" : "pair_u");
  auto profile = [nu = h.nu](double t) { return std::exp(-nu * t); };
  return fill_weights(geom, [&](std::size_t j, std::size_t k) {
    const double s = geom.s_center(k);
    const double d = x - geom.y_center(j);
    const double lag = std::max(0.0, h.t_max - s);
    const double tail = Derivative ? exp_inner_v(d, s, h.nu, lag) : exp_inner_u(d, s, h.nu, lag);
    if (lag == 0.0) return tail;
    if (d * d / (4.0 * lag) > kNegligibleExponent) return tail;
    const double body =
        Derivative ? inner_v(d, s, 0.0, std::sqrt(lag), profile) : inner_u(d, s, 0.0, std::sqrt(lag), profile);
    return body + tail;
  });
}

}  // namespace

CellWeights pair_u_weights(const SheetGeometry& geom, double x, const TestFunction& h, double tail_tol) {
  return bump_pair_weights<false>(geom, x, h, tail_tol);
}
CellWeights pair_v_weights(const SheetGeometry& geom, double x, const TestFunction& h, double tail_tol) {
  return bump_pair_weights<true>(geom, x, h, tail_tol);
}
CellWeights pair_u_weights(const SheetGeometry& geom, double x, const ExpProfile& h, double tail_tol) {
  return exp_pair_weights<false>(geom, x, h, tail_tol);
}
CellWeights pair_v_weights(const SheetGeometry& geom, double x, const ExpProfile& h, double tail_tol) {
  return exp_pair_weights<true>(geom, x, h, tail_tol);
}

double pair_u(const SheetSample& sheet, double x, const TestFunction& h) {
  return apply(pair_u_weights(sheet.geom, x, h), sheet);
}
double pair_v(const SheetSample& sheet, double x, const TestFunction& h) {
  return apply(pair_v_weights(sheet.geom, x, h), sheet);
}

double exp_inner_u(double d, double s, double nu, double a) {
  const double rn = std::sqrt(nu), D = std::abs(d);
  const double scale = std::exp(-nu * s);
  if (a <= 0.0) return scale * std::exp(-rn * D) / (2.0 * rn);
  const double A = std::sqrt(nu * a), B = D / (2.0 * std::sqrt(a));
  return scale * (std::exp(-rn * D) * std::erfc(A - B) + std::exp(rn * D) * std::erfc(A + B)) / (4.0 * rn);
}

double exp_inner_v(double d, double s, double nu, double a) {
  if (d == 0.0) return 0.0;
  const double rn = std::sqrt(nu), D = std::abs(d);
  const double sign = d > 0.0 ? 1.0 : -1.0;
  const double scale = std::exp(-nu * s);
  if (a <= 0.0) return -sign * scale * 0.5 * std::exp(-rn * D);
  const double A = std::sqrt(nu * a), B = D / (2.0 * std::sqrt(a));
  // The Gaussian terms from differentiating the erfc arguments cancel.
  const double dF = 0.25 * (std::exp(rn * D) * std::erfc(A + B) - std::exp(-rn * D) * std::erfc(A - B));
  return sign * scale * dF;
}

CellWeights drift_field_weights(const SheetGeometry& geom, double y, double nu, double tail_tol) {
  if (!(nu > 0.0)) throw DomainError("drift_field_form: nu must be positive");
  const double t_max = geom.s_max();
  const ExpProfile h{nu, t_max};
  check_coverage(geom, y, exp_reach(h, tail_tol), t_max, "drift_field_form");
  const double rn = std::sqrt(nu);
  auto profile = [nu](double t) { return std::exp(-nu * t); };
  return fill_weights(geom, [&](std::size_t j, std::size_t k) {
    const double s = geom.s_center(k);
    const double d = y - geom.y_center(j);
    const double lag = std::max(0.0, t_max - s);
    const double tail = rn * exp_inner_u(d, s, nu, lag) + exp_inner_v(d, s, nu, lag);
    if (lag == 0.0 || d * d / (4.0 * lag) > kNegligibleExponent) return tail;
    auto f = [&](double w) {
      if (w == 0.0) return 0.0;
      const double e = std::exp(-d * d / (4.0 * w * w)) * profile(s + w * w) / kSqrtFourPi;
      return e * (2.0 * rn - d / (w * w));
    };
    return gk_split(f, 0.0, std::sqrt(lag), 0.5 * std::abs(d)) + tail;
  });
}

CellWeights drift_integral_weights(const SheetGeometry& geom, double y, double nu, double tail_tol) {
  if (!(nu > 0.0)) throw DomainError("drift_integral_form: nu must be positive");
  const double rn = std::sqrt(nu);
  if (geom.y_max() - y < std::log(1.0 / tail_tol) / rn)
    throw DomainError("drift_integral_form: sheet does not cover the right side (needs y_max >= " +
                      std::to_string(y + std::log(1.0 / tail_tol) / rn) + ")");
  if (geom.y_min > y) throw DomainError("drift_integral_form: sheet does not cover the left side");
  CellWeights w(geom);
  for (std::size_t j = 0; j < geom.ny; ++j) {
    const double ya = geom.y_min + static_cast<double>(j) * geom.dy, yb = ya + geom.dy;
    if (yb <= y) continue;
    const double lo = std::max(ya, y);
    const double wy = (std::exp(-rn * (lo - y)) - std::exp(-rn * (yb - y))) / rn / geom.dy;
    for (std::size_t k = 0; k < geom.ns; ++k) {
      const double sa = static_cast<double>(k) * geom.ds, sb = sa + geom.ds;
      const double ws = (std::exp(-nu * sa) - std::exp(-nu * sb)) / nu / geom.ds;
      w.at(j, k) = wy * ws;
    }
  }
  return w;
}

double drift_field_form(const SheetSample& sheet, double y, double nu) {
  return apply(drift_field_weights(sheet.geom, y, nu), sheet);
}

double drift_integral_form(const SheetSample& sheet, double y, double nu) {
  return apply(drift_integral_weights(sheet.geom, y, nu), sheet);
}

double drift_variance(double nu) { return (1.0 / (2.0 * nu)) * (1.0 / (2.0 * std::sqrt(nu))); }

namespace {

struct Nodes {
  std::vector<double> x, w;
};

// Composite 4-point Gauss-Legendre on [a, b] with m panels.
Nodes composite_gauss(double a, double b, int m) {
  using G = boost::math::quadrature::gauss<double, 4>;
  const auto& abs = G::abscissa();
  const auto& wts = G::weights();
  Nodes out;
  const double h = (b - a) / m;
  for (int p = 0; p < m; ++p) {
    const double c = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < abs.size(); ++i) {
      // Boost stores the nonnegative half of the symmetric rule.
      const double xi = abs[i], wi = wts[i];
      if (xi == 0.0) {
        out.x.push_back(c);
        out.w.push_back(0.5 * h * wi);
      } else {
        out.x.push_back(c - 0.5 * h * xi);
        out.w.push_back(0.5 * h * wi);
        out.x.push_back(c + 0.5 * h * xi);
        out.w.push_back(0.5 * h * wi);
      }
    }
  }
  return out;
}

// int_{s'}^inf g(y', s'; x0, t) e^{-nu t} dt with y' - x0 = d, by the
// log substitution t = s' + e^{2 sigma} which resolves small d.
double laplace_inner(double nu, double d, double s, const Nodes& sigma) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sigma.x.size(); ++i) {
    const double w = std::exp(sigma.x[i]);
    acc += sigma.w[i] * w * std::exp(-d * d / (4.0 * w * w) - nu * w * w);
  }
  return 2.0 / kSqrtFourPi * std::exp(-nu * s) * acc;
}

}  // namespace

double cameron_martin_laplace(double nu, double nu2, double y_gap, int panels) {
  if (!(nu > 0.0) || !(nu2 > 0.0)) throw DomainError("cameron_martin: nu and nu2 must be positive");
  if (y_gap < 0.0) throw DomainError("cameron_martin: y_gap must be nonnegative");
  if (panels < 1) throw DomainError("cameron_martin: panels must be positive");
  const double sig_hi = 0.5 * std::log(kNegligibleExponent / std::min(nu, nu2)) + 0.5;
  const Nodes sigma = composite_gauss(-30.0, sig_hi, panels);
  const Nodes yd = composite_gauss(y_gap, y_gap + kNegligibleExponent / (std::sqrt(nu) + std::sqrt(nu2)), panels);
  const Nodes sd = composite_gauss(0.0, kNegligibleExponent / (nu + nu2), panels);
  double acc = 0.0;
  for (std::size_t i = 0; i < yd.x.size(); ++i) {
    double row = 0.0;
    for (std::size_t k = 0; k < sd.x.size(); ++k)
      row += sd.w[k] * laplace_inner(nu2, yd.x[i], sd.x[k], sigma) * laplace_inner(nu, yd.x[i], sd.x[k], sigma);
    acc += yd.w[i] * row;
  }
  return acc;
}

double cameron_martin_target(double nu, double nu2, double y_gap) {
  return laplace_g(y_gap, nu2) * laplace_g(y_gap, nu) / ((std::sqrt(nu2) + std::sqrt(nu)) * (nu2 + nu));
}

VerificationReport verify_cameron_martin_laplace(double nu, double nu2, double y_gap, int panels) {
  const double est = cameron_martin_laplace(nu, nu2, y_gap, panels);
  const double tgt = cameron_martin_target(nu, nu2, y_gap);
  auto r = bound_report("cameron_martin_laplace", "relative error of the Laplace transform of C_y e^{-nu .}",
                        std::abs(est / tgt - 1.0), 0.0, 1e-4);
  r.grid = {{"panels", panels}, {"rule", "composite 4-point Gauss-Legendre"}};
  r.detail = {{"nu", nu}, {"nu2", nu2}, {"y_gap", y_gap}, {"quadrature", est}, {"closed_form", tgt}};
  return r;
}

}  // namespace shelab
