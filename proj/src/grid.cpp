#include "shelab/grid.hpp"

#include <cmath>
#include <string>

#include "shelab/errors.hpp"

namespace shelab {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

TimeGrid::TimeGrid(double t_max, std::size_t n) : t_max_(t_max), n_(n), dt_(0.0) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("TimeGrid: t_max must be positive");
  if (!is_power_of_two(n)) throw DomainError("n must be a power of two (got " + std::to_string(n) + ")");
  dt_ = t_max_ / static_cast<double>(n_);
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> t(n_);
  for (std::size_t k = 0; k < n_; ++k) t[k] = node(k);
  return t;
}

std::vector<double> antisym_extend(std::span<const double> f) {
  const std::size_t n = f.size();
  std::vector<double> out(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    out[n + k] = f[k];
    out[n - 1 - k] = -f[k];
  }
  return out;
}

std::vector<double> even_extend(std::span<const double> f) {
  const std::size_t n = f.size();
  std::vector<double> out(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    out[n + k] = f[k];
    out[n - 1 - k] = f[k];
  }
  return out;
}

std::vector<double> restrict_positive(std::span<const double> fs) {
  const std::size_t n = fs.size() / 2;
  return std::vector<double>(fs.begin() + static_cast<std::ptrdiff_t>(n), fs.end());
}

double pair(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid == g.grid) || f.values.size() != g.values.size() || f.values.size() != f.grid.size())
    throw DomainError("pair: grid mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) acc += f.values[k] * g.values[k];
  return acc * f.grid.dt();
}

double bump_value(double u, double c, double r, double a) {
  const double x = (u - c) / r;
  const double q = 1.0 - x * x;
  if (!(q > 0.0)) return 0.0;
  return a * std::exp(-1.0 / q);
}

double bump_derivative(double u, double c, double r, double a) {
  const double x = (u - c) / r;
  const double q = 1.0 - x * x;
  if (!(q > 0.0)) return 0.0;
  return a * std::exp(-1.0 / q) * (-2.0 * x / (q * q)) / r;
}

double bump_second_derivative(double u, double c, double r, double a) {
  const double x = (u - c) / r;
  const double q = 1.0 - x * x;
  if (!(q > 0.0)) return 0.0;
  const double q2 = q * q;
  const double bracket = 4.0 * x * x / (q2 * q2) - 2.0 / q2 - 8.0 * x * x / (q2 * q);
  return a * std::exp(-1.0 / q) * bracket / (r * r);
}

TestFunction::TestFunction(double center, double radius, double amplitude, const TimeGrid& grid)
    : center_(center), radius_(radius), amplitude_(amplitude), grid_(grid) {
  if (!(radius > 0.0)) throw DomainError("bump: radius must be positive");
  if (!(center - radius > 0.0) || !(center + radius < grid.t_max()))
    throw DomainError("bump: support must lie inside (0, t_max)");
  samples_.resize(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) samples_[k] = value(grid_.node(k));
}

double TestFunction::value(double t) const { return bump_value(t, center_, radius_, amplitude_); }
double TestFunction::derivative(double t) const { return bump_derivative(t, center_, radius_, amplitude_); }
double TestFunction::second_derivative(double t) const {
  return bump_second_derivative(t, center_, radius_, amplitude_);
}

std::vector<double> TestFunction::derivative_samples() const {
  std::vector<double> d(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) d[k] = derivative(grid_.node(k));
  return d;
}

TestFunction bump(double center, double radius, double t_max, std::size_t n, double amplitude) {
  return TestFunction(center, radius, amplitude, TimeGrid(t_max, n));
}

TestFunction bump(double center, double radius, const TimeGrid& grid, double amplitude) {
  return TestFunction(center, radius, amplitude, grid);
}

}  // namespace shelab
