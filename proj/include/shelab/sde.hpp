#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "shelab/fracops.hpp"
#include "shelab/grid.hpp"

namespace shelab {

/// (U(z, .), dU/dx(z, .)) on a TimeGrid at spatial coordinate z.
struct FieldState {
  std::vector<double> u;
  std::vector<double> v;
  double z = 0.0;
};

/// du/dz = v, dv/dz = -[(-d^2)^{1/2} u^a + sqrt(2) (-d^2)^{1/4} v^a] on [0, t_max].
std::pair<std::vector<double>, std::vector<double>> drift(const FieldState& state, const SpectralPlan& plan);

/// u += v dz; v += dv/dz dz - noise; z += dz. Throws InstabilityError on non-finite values.
FieldState euler_step(const FieldState& state, double dz, std::span<const double> noise, const SpectralPlan& plan);

/// Largest admissible step: 0.1 sqrt(dt).
double max_stable_dz(const TimeGrid& grid);
/// dz sqrt(|tau|_max) with |tau|_max = pi / dt.
double spectral_radius_estimate(const TimeGrid& grid, double dz);

/// Exact Gaussian sampler of the stationary law of (u, v) as cell averages:
/// independent u ~ N(0, cell_cov_u), v ~ N(0, cell_cov_v), factored once.
class StationarySampler {
 public:
  explicit StationarySampler(const TimeGrid& grid);
  FieldState sample(std::uint64_t seed, std::uint64_t stream) const;
  const TimeGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& cov_u() const { return cu_; }
  const Eigen::MatrixXd& cov_v() const { return cv_; }

 private:
  TimeGrid grid_;
  Eigen::MatrixXd cu_, cv_, lu_, lv_;
};

/// Draws the stationary state; the h_basis Gram of the reconstruction equals
/// the piecewise-constant Gram (see stationary_reconstruction_bias).
FieldState stationary_init(const std::vector<TestFunction>& h_basis, const TimeGrid& grid, std::uint64_t seed,
                           std::uint64_t stream = 0);

/// Relative gap between the Gram of the cell-average reconstruction and the
/// fine-grid Gram of each h (u and v), one pair per basis element.
std::vector<std::pair<double, double>> stationary_reconstruction_bias(const std::vector<TestFunction>& h_basis,
                                                                      std::size_t fine_n);

struct EvolveConfig {
  double dz = 0.0;
  double Z = 1.0;
  std::vector<TestFunction> observables;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool noise = true;
};

struct Trajectory {
  std::vector<double> z;
  std::vector<std::vector<double>> u_obs;  // [step][observable]
  std::vector<std::vector<double>> v_obs;
  FieldState final_state;
  std::size_t steps = 0;
  double dz = 0.0;
};

/// Runs ceil(Z / dz) equal steps ending exactly at Z. The noise of each step is
/// i.i.d. N(0, dz_eff / dt) per cell. Throws ConfigError if dz breaks the stability rule.
Trajectory evolve(const FieldState& init, const EvolveConfig& cfg, const SpectralPlan& plan);

/// <v; v> + <u; (-d^2)^{1/2} u^a>.
double energy(const FieldState& state, const SpectralPlan& plan);

}  // namespace shelab
