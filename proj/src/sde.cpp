#include "shelab/sde.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "shelab/errors.hpp"
#include "shelab/gaussfield.hpp"
#include "shelab/rng.hpp"

namespace shelab {

std::pair<std::vector<double>, std::vector<double>> drift(const FieldState& state, const SpectralPlan& plan) {
  const std::size_t n = plan.grid().size();
  if (state.u.size() != n || state.v.size() != n) throw DomainError("drift: state not on the plan's grid");
  const auto ua = antisym_extend(state.u);
  const auto va = antisym_extend(state.v);
  const SpectralPlan::Term terms[] = {{ua, 1.0, 1.0}, {va, 0.5, std::sqrt(2.0)}};
  auto sum = restrict_positive(plan.apply_sum(terms));
  for (auto& x : sum) x = -x;
  return {state.v, std::move(sum)};
}

double max_stable_dz(const TimeGrid& grid) { return 0.1 * std::sqrt(grid.dt()); }

double spectral_radius_estimate(const TimeGrid& grid, double dz) {
  return dz * std::sqrt(std::numbers::pi / grid.dt());
}

FieldState euler_step(const FieldState& state, double dz, std::span<const double> noise, const SpectralPlan& plan) {
  const std::size_t n = plan.grid().size();
  if (noise.size() != n) throw DomainError("euler_step: noise not on the plan's grid");
  const auto [du, dv] = drift(state, plan);
  FieldState next{std::vector<double>(n), std::vector<double>(n), state.z + dz};
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    next.u[i] = state.u[i] + du[i] * dz;
    next.v[i] = state.v[i] + dv[i] * dz - noise[i];
    finite = finite && std::isfinite(next.u[i]) && std::isfinite(next.v[i]);
  }
  if (!finite) {
    const double rho = spectral_radius_estimate(plan.grid(), dz);
    throw InstabilityError("euler_step: non-finite state at z = " + std::to_string(next.z) +
                               " (dz sqrt(|tau|max) = " + std::to_string(rho) + ")",
                           next.z, rho);
  }
  return next;
}

namespace {
Eigen::MatrixXd factor(const Eigen::MatrixXd& c, const char* what) {
  const double jitter = 1e-12 * c.trace() / static_cast<double>(c.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(c + jitter * Eigen::MatrixXd::Identity(c.rows(), c.cols()));
  if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + ": Cholesky factorisation failed", jitter);
  return llt.matrixL();
}
}  // namespace

StationarySampler::StationarySampler(const TimeGrid& grid)
    : grid_(grid), cu_(cell_cov_u(grid)), cv_(cell_cov_v(grid)) {
  lu_ = factor(cu_, "stationary_init (u)");
  lv_ = factor(cv_, "stationary_init (v)");
}

FieldState StationarySampler::sample(std::uint64_t seed, std::uint64_t stream) const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  Engine eng = make_engine(seed, stream);
  Normal normal(0.0, 1.0);
  Eigen::VectorXd zu(n), zv(n);
  for (Eigen::Index i = 0; i < n; ++i) zu(i) = normal(eng);
  for (Eigen::Index i = 0; i < n; ++i) zv(i) = normal(eng);
  const Eigen::VectorXd u = lu_.triangularView<Eigen::Lower>() * zu;
  const Eigen::VectorXd v = lv_.triangularView<Eigen::Lower>() * zv;
  return {std::vector<double>(u.data(), u.data() + n), std::vector<double>(v.data(), v.data() + n), 0.0};
}

FieldState stationary_init(const std::vector<TestFunction>& h_basis, const TimeGrid& grid, std::uint64_t seed,
                           std::uint64_t stream) {
  for (const auto& h : h_basis)
    if (!(h.grid() == grid)) throw DomainError("stationary_init: basis not on the grid");
  return StationarySampler(grid).sample(seed, stream);
}

std::vector<std::pair<double, double>> stationary_reconstruction_bias(const std::vector<TestFunction>& h_basis,
                                                                      std::size_t fine_n) {
  std::vector<std::pair<double, double>> out;
  for (const auto& h : h_basis) {
    const std::vector<TestFunction> coarse{h};
    const std::vector<TestFunction> fine{TestFunction(h.center(), h.radius(), h.amplitude(),
                                                      TimeGrid(h.grid().t_max(), fine_n))};
    const double gu = gram_u(coarse, coarse)(0, 0), fu = gram_u(fine, fine)(0, 0);
    const double gv = gram_v(coarse, coarse)(0, 0), fv = gram_v(fine, fine)(0, 0);
    out.emplace_back(gu / fu - 1.0, gv / fv - 1.0);
  }
  return out;
}

Trajectory evolve(const FieldState& init, const EvolveConfig& cfg, const SpectralPlan& plan) {
  const TimeGrid& grid = plan.grid();
  const double dz_max = max_stable_dz(grid);
  if (!(cfg.dz > 0.0) || cfg.dz > dz_max * (1.0 + 1e-12))
    throw ConfigError("dz = " + std::to_string(cfg.dz) + " violates the stability rule dz <= 0.1 sqrt(dt) = " +
                      std::to_string(dz_max));
  if (!(cfg.Z > 0.0)) throw ConfigError("Z must be positive");
  for (const auto& h : cfg.observables)
    if (!(h.grid() == grid)) throw DomainError("evolve: observable not on the plan's grid");
  const auto steps = static_cast<std::size_t>(std::ceil(cfg.Z / cfg.dz - 1e-9));
  const double dz = cfg.Z / static_cast<double>(steps);
  const std::size_t n = grid.size();

  Trajectory tr;
  tr.steps = steps;
  tr.dz = dz;
  auto record = [&](const FieldState& s) {
    std::vector<double> uo, vo;
    for (const auto& h : cfg.observables) {
      uo.push_back(pair({grid, s.u}, h.sampled()));
      vo.push_back(pair({grid, s.v}, h.sampled()));
    }
    tr.z.push_back(s.z);
    tr.u_obs.push_back(std::move(uo));
    tr.v_obs.push_back(std::move(vo));
  };

  Engine eng = make_engine(cfg.seed, cfg.stream);
  Normal normal(0.0, std::sqrt(dz / grid.dt()));
  std::vector<double> noise(n, 0.0);
  FieldState state = init;
  record(state);
  for (std::size_t step = 0; step < steps; ++step) {
    if (cfg.noise)
      for (auto& w : noise) w = normal(eng);
    state = euler_step(state, dz, noise, plan);
    if (step + 1 == steps) state.z = init.z + cfg.Z;
    record(state);
  }
  tr.final_state = std::move(state);
  return tr;
}

double energy(const FieldState& state, const SpectralPlan& plan) {
  const TimeGrid& g = plan.grid();
  const auto half = restrict_positive(frac_laplacian(antisym_extend(state.u), 1.0, plan));
  return pair({g, state.v}, {g, state.v}) + pair({g, state.u}, {g, half});
}

}  // namespace shelab
