#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace shelab {

/// Cell-centred grid on [0, t_max]: t_k = (k + 1/2) dt, n a power of two.
class TimeGrid {
 public:
  TimeGrid(double t_max, std::size_t n);

  double t_max() const { return t_max_; }
  std::size_t size() const { return n_; }
  double dt() const { return dt_; }
  double node(std::size_t k) const { return (static_cast<double>(k) + 0.5) * dt_; }
  std::vector<double> nodes() const;

  bool operator==(const TimeGrid& o) const { return t_max_ == o.t_max_ && n_ == o.n_; }

 private:
  double t_max_;
  std::size_t n_;
  double dt_;
};

/// Mirror of a TimeGrid over [-t_max, t_max]; node i sits at (i - n + 1/2) dt.
class SymGrid {
 public:
  explicit SymGrid(const TimeGrid& base) : base_(base) {}
  const TimeGrid& base() const { return base_; }
  std::size_t size() const { return 2 * base_.size(); }
  double node(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(base_.size()) + 0.5) * base_.dt();
  }

 private:
  TimeGrid base_;
};

bool is_power_of_two(std::size_t n);

/// f^a on the SymGrid: [-f(t_{n-1}), ..., -f(t_0), f(t_0), ..., f(t_{n-1})].
std::vector<double> antisym_extend(std::span<const double> f);
/// Even reflection, used for derivatives of antisymmetric extensions.
std::vector<double> even_extend(std::span<const double> f);
/// Upper half of a SymGrid vector.
std::vector<double> restrict_positive(std::span<const double> fs);

/// Values tied to the grid they were sampled on.
struct GridFunction {
  TimeGrid grid;
  std::vector<double> values;
};

/// Discrete L^2 pairing sum f(t_k) g(t_k) dt.
double pair(const GridFunction& f, const GridFunction& g);

/// Smooth bump a exp(-1 / (1 - ((t - c)/r)^2)) on (c - r, c + r), with its
/// first two derivatives in closed form and cached samples on a grid.
class TestFunction {
 public:
  TestFunction(double center, double radius, double amplitude, const TimeGrid& grid);

  double center() const { return center_; }
  double radius() const { return radius_; }
  double amplitude() const { return amplitude_; }
  double support_lo() const { return center_ - radius_; }
  double support_hi() const { return center_ + radius_; }
  const TimeGrid& grid() const { return grid_; }

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;

  const std::vector<double>& samples() const { return samples_; }
  std::vector<double> derivative_samples() const;
  GridFunction sampled() const { return {grid_, samples_}; }

 private:
  double center_, radius_, amplitude_;
  TimeGrid grid_;
  std::vector<double> samples_;
};

/// Checks 0 < center - radius and center + radius < t_max.
TestFunction bump(double center, double radius, double t_max, std::size_t n, double amplitude = 1.0);
TestFunction bump(double center, double radius, const TimeGrid& grid, double amplitude = 1.0);

/// Closed-form bump profile on the real line, usable for spatial factors.
double bump_value(double u, double center, double radius, double amplitude = 1.0);
double bump_derivative(double u, double center, double radius, double amplitude = 1.0);
double bump_second_derivative(double u, double center, double radius, double amplitude = 1.0);

}  // namespace shelab
