#include "shelab/suites.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "shelab/errors.hpp"
#include "shelab/fracops.hpp"
#include "shelab/gaussfield.hpp"
#include "shelab/kernels.hpp"
#include "shelab/rng.hpp"
#include "shelab/sde.hpp"
#include "shelab/sheet.hpp"
#include "shelab/stats.hpp"
#include "shelab/weakform.hpp"

namespace shelab {

using nlohmann::ordered_json;

namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid value for " + key + ": '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const auto u = std::stoull(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    throw ConfigError("invalid value for " + key + ": '" + v + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

ordered_json config_json(const RunConfig& cfg, const std::string& suite) {
  return {{"t_max", cfg.t_max},
          {"n", cfg.n ? cfg.n : default_n(suite)},
          {"dz", cfg.dz},
          {"Z", cfg.Z},
          {"nu", cfg.nu},
          {"replicas", effective_replicas(cfg, suite)},
          {"seed", cfg.seed},
          {"tail_tol", cfg.tail_tol}};
}

std::uint64_t suite_seed(const RunConfig& cfg, std::uint64_t tag) { return cfg.seed ^ tag; }

VerificationReport named(VerificationReport r, std::string name, std::string statistic, std::size_t replicas,
                         std::uint64_t seed) {
  r.name = std::move(name);
  r.statistic = std::move(statistic);
  r.replicas = replicas;
  r.seed = seed;
  return r;
}

VerificationReport mean_report(const std::string& name, std::span<const double> xs, std::uint64_t seed) {
  const auto m = mean_se(xs);
  return named(z_test(m.mean, m.se, 0.0), name, "sample mean vs 0", xs.size(), seed);
}

VerificationReport variance_report(const std::string& name, std::span<const double> xs, double target,
                                   std::uint64_t seed) {
  const auto v = variance_se(xs);
  return named(z_test(v.mean, v.se, target), name, "sample variance vs analytic target", xs.size(), seed);
}

VerificationReport ks_report(const std::string& name, std::span<const double> a, std::span<const double> b,
                             std::uint64_t seed) {
  const auto ks = ks_two_sample(a, b);
  auto r = at_least_report(name, "two-sample KS p-value", ks.p, 0.01);
  r.replicas = a.size();
  r.seed = seed;
  r.detail = {{"ks_statistic", ks.statistic}, {"n_a", a.size()}, {"n_b", b.size()}};
  return r;
}

// Geometry with cell edges on multiples of dy covering [x_lo - reach, x_hi + reach] x [0, s_max].
SheetGeometry covering_geometry(double x_lo, double x_hi, double reach, double dy, double s_max, double ds) {
  const double lo = std::floor((x_lo - reach) / dy) * dy;
  const double hi = std::ceil((x_hi + reach) / dy) * dy;
  return SheetGeometry::make({lo, hi, s_max}, dy, ds);
}

ordered_json geom_json(const SheetGeometry& g) {
  return {{"y_min", g.y_min}, {"y_max", g.y_max()}, {"dy", g.dy}, {"s_max", g.s_max()}, {"ds", g.ds},
          {"cells", g.cells()}};
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows, std::size_t r0, std::size_t count,
                          std::size_t c0, Eigen::MatrixXd* se) {
  Eigen::MatrixXd m(count, count);
  se->resize(count, count);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < count; ++j) {
      const auto c = covariance_se(rows[r0 + i], rows[c0 + j]);
      m(i, j) = c.mean;
      (*se)(i, j) = c.se;
    }
  return m;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------- ops

double a2_identity_error(const TestFunction& h, const SpectralPlan& plan) {
  const auto a2 = op_A2(h);
  const auto ref = restrict_positive(frac_laplacian(antisym_extend(h.samples()), 0.5, plan));
  double err = 0.0;
  for (std::size_t i = 0; i < a2.size(); ++i) err = std::max(err, std::abs(a2[i] - std::sqrt(2.0) * ref[i]));
  return err;
}

double inversion_error(const TestFunction& h) {
  const auto a2 = op_A2(h);
  const auto back = halfroot_conv({h.grid(), a2}, TailModel::power_law(kA2TailExponent));
  double err = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) err = std::max(err, std::abs(back[i] - h.samples()[i]));
  return err;
}

std::vector<VerificationReport> ops_operator_reports(const RunConfig& cfg, std::size_t n) {
  std::vector<VerificationReport> out;
  const TimeGrid g(cfg.t_max, n), g2(cfg.t_max, 2 * n);
  const SpectralPlan plan(g), plan2(g2);
  const TestFunction h = bump(2.0, 1.0, g), h2 = bump(2.0, 1.0, g2);
  const double hsup = max_abs(h.samples());
  const ordered_json grid = {{"t_max", cfg.t_max}, {"n", n}, {"dt", g.dt()}, {"padding", plan.padding()}};
  const ordered_json bump_json = {{"center", 2.0}, {"radius", 1.0}};

  const double e1 = a2_identity_error(h, plan), e2 = a2_identity_error(h2, plan2);
  auto r = bound_report("A2_quarter_laplacian", "max |A2 h - sqrt(2) (-d^2)^{1/4} h^a| on [0, t_max]", e1, 0.0,
                        1e-2 * hsup);
  r.grid = grid;
  r.detail = {{"h", bump_json}, {"h_sup", hsup}};
  out.push_back(r);
  r = at_least_report("A2_quarter_laplacian_refinement", "error ratio when dt is halved", e1 / e2, 1.8);
  r.grid = grid;
  r.detail = {{"error_n", e1}, {"error_2n", e2}};
  out.push_back(r);

  const double inv = inversion_error(h);
  r = bound_report("halfroot_inversion", "max |(4 pi |.|)^{-1/2} * (A2 h)^a - h|", inv, 0.0, 1e-2 * hsup);
  r.grid = grid;
  r.detail = {{"h", bump_json}, {"h_sup", hsup}, {"tail_exponent", kA2TailExponent}};
  out.push_back(r);

  const auto a12 = verify_A1A2_identity(h, plan);
  const auto a12f = verify_A1A2_identity(h2, plan2);
  out.push_back(a12);
  r = at_least_report("A1A2_identity_refinement", "residual ratio when dt is halved", a12.estimate / a12f.estimate,
                      1.8);
  r.grid = grid;
  r.detail = {{"residual_n", a12.estimate}, {"residual_2n", a12f.estimate}};
  out.push_back(r);

  // Tail law of A2 h beyond twice the support bound.
  const auto a2 = op_A2(h);
  const double c = h.support_hi();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.node(i);
    if (t < 2.0 * c) continue;
    worst = std::max(worst, std::abs(a2[i]) / (hsup * c * std::pow(t - c, -1.5)));
  }
  r = bound_report("A2_tail_law", "max |A2 h(t)| / (sup|h| c (t - c)^{-3/2}) for t >= 2c", worst, 0.0, 1.0);
  r.grid = grid;
  out.push_back(r);

  // Eigen-identity A1 e^{-nu .} = sqrt(nu) e^{-nu .} on [0, 4].
  for (double nu : cfg.nu) {
    std::vector<double> f(g.size()), fp(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      f[i] = std::exp(-nu * g.node(i));
      fp[i] = -nu * f[i];
    }
    const DecayedFunction fd{{g, f}, TailModel::exponential(nu), fp};
    std::vector<double> ts{0.0};
    for (std::size_t i = 0; i < g.size() && g.node(i) <= 4.0; ++i) ts.push_back(g.node(i));
    const auto a1 = op_A1_at(fd, plan, ts);
    double rel = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double exact = std::sqrt(nu) * std::exp(-nu * ts[i]);
      rel = std::max(rel, std::abs(a1[i] / exact - 1.0));
    }
    r = bound_report("A1_eigen_nu" + ordered_json(nu).dump(), "max relative error of A1 e^{-nu .} on [0, 4]", rel, 0.0,
                     1e-3);
    r.grid = grid;
    r.detail = {{"nu", nu}, {"A1_at_0", a1[0]}, {"points", ts.size()}};
    out.push_back(r);
  }
  return out;
}

std::vector<VerificationReport> ops_lnu_reports(const RunConfig& cfg, std::size_t n) {
  std::vector<VerificationReport> out;
  const LnuSpec spec1{1.0, 1e-11, 20};

  const double at0 = l_nu(spec1, 0.0);
  auto r = bound_report("l_nu_at_zero", "l_nu(0)", at0, 0.0, 0.0);
  r.detail = {{"nu", 1.0}};
  out.push_back(r);

  // t^{3/2} l_nu(t) on [10, 1000] against its limit 1 / (nu^2 sqrt(4 pi)).
  for (double nu : cfg.nu) {
    const LnuSpec spec{nu, 1e-12, 20};
    const double limit = 1.0 / (nu * nu * std::sqrt(4.0 * std::numbers::pi));
    double sup = 0.0;
    for (int i = 0; i <= 60; ++i) {
      const double t = 10.0 * std::pow(100.0, i / 60.0);
      sup = std::max(sup, std::pow(t, 1.5) * std::abs(l_nu(spec, t)));
    }
    r = bound_report("l_nu_decay_nu" + ordered_json(nu).dump(), "sup t^{3/2} |l_nu(t)| on [10, 1000]", sup, limit,
                     0.1 * limit);
    r.detail = {{"nu", nu}, {"limit", limit}, {"points", 61}};
    out.push_back(r);
  }

  // Laplace transform at nu2 = nu = 1; the antiderivative has value 1/4.
  {
    using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto f = [&](double t) { return std::exp(-t) * l_nu(spec1, t); };
    double err = 0.0;
    const double lap = Quad::integrate(f, 0.0, 1.0, 15, 1e-13, &err) +
                       Quad::integrate(f, 1.0, std::numeric_limits<double>::infinity(), 15, 1e-13, &err);
    r = bound_report("l_nu_laplace", "int_0^inf e^{-t} l_1(t) dt", lap, 0.25, 1e-4);
    r.detail = {{"nu", 1.0}, {"nu2", 1.0}};
    out.push_back(r);
  }

  // l_nu is by definition the half-root convolution of e^{-nu .}.
  {
    const TimeGrid g(cfg.t_max, n);
    for (double nu : cfg.nu) {
      std::vector<double> f(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(-nu * g.node(i));
      const auto conv = halfroot_conv({g, f}, TailModel::exponential(nu));
      const LnuSpec spec{nu, 1e-11, 20};
      double err = 0.0, sup = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double l = l_nu(spec, g.node(i));
        err = std::max(err, std::abs(conv[i] - l));
        sup = std::max(sup, std::abs(l));
      }
      r = bound_report("halfroot_conv_vs_l_nu_nu" + ordered_json(nu).dump(),
                       "max |(4 pi |.|)^{-1/2} * (e^{-nu .})^a - l_nu| / sup l_nu", err / sup, 0.0, 1e-3);
      r.grid = {{"t_max", cfg.t_max}, {"n", n}, {"dt", g.dt()}};
      r.detail = {{"nu", nu}, {"sup_l_nu", sup}};
      out.push_back(r);
    }
  }
  return out;
}

// ---------------------------------------------------------------- cov

std::vector<TestFunction> cov_basis(const TimeGrid& g) {
  std::vector<TestFunction> hs;
  for (int i = 0; i < 8; ++i) hs.push_back(bump(0.8 + 0.3 * i, 0.6, g));
  return hs;
}

// ---------------------------------------------------------------- drift

struct PathwiseResult {
  double rel_rms;
  SheetGeometry geom;
};

PathwiseResult drift_pathwise(double nu, double dy, double tail_tol, std::uint64_t seed, std::uint64_t stream) {
  constexpr double kSMax = 2.0;
  constexpr int kYs = 20;
  constexpr double kYStep = 0.2;
  const double reach = std::max(gaussian_reach(kSMax, tail_tol), std::log(1.0 / tail_tol) / std::sqrt(nu));
  const SheetGeometry geom = covering_geometry(0.0, kYStep * (kYs - 1), reach, dy, kSMax, dy / 2.0);
  const SheetSample sheet = sheet_sample(geom, seed, stream);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < kYs; ++i) {
    const double y = kYStep * i;
    const double a = apply(drift_field_weights(geom, y, nu, tail_tol), sheet);
    const double b = apply(drift_integral_weights(geom, y, nu, tail_tol), sheet);
    num += (a - b) * (a - b);
    den += b * b;
  }
  return {std::sqrt(num / den), geom};
}

}  // namespace

// ---------------------------------------------------------------- config

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "t_max" || key == "tmax") {
    cfg.t_max = parse_double(key, v);
  } else if (key == "n") {
    cfg.n = parse_u64(key, v);
  } else if (key == "dz") {
    cfg.dz = parse_double(key, v);
  } else if (key == "Z" || key == "z") {
    cfg.Z = parse_double(key, v);
  } else if (key == "nu") {
    cfg.nu.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.nu.push_back(parse_double(key, trim(item)));
    if (cfg.nu.empty()) throw ConfigError("nu list is empty");
  } else if (key == "replicas") {
    cfg.replicas = parse_u64(key, v);
  } else if (key.rfind("replicas.", 0) == 0) {
    const std::string suite = key.substr(9);
    if (suite != "cov" && suite != "drift" && suite != "spde" && suite != "evolve")
      throw ConfigError("unknown suite in " + key);
    cfg.suite_replicas[suite] = parse_u64(key, v);
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, v);
  } else if (key == "tail_tol") {
    cfg.tail_tol = parse_double(key, v);
  } else if (key == "out") {
    cfg.out = v;
  } else if (key == "workers") {
    cfg.workers = static_cast<int>(parse_u64(key, v));
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

std::size_t default_n(const std::string& suite) {
  if (suite == "spde") return 256;
  if (suite == "evolve") return 512;
  return 4096;
}

std::size_t default_replicas(const std::string& suite) {
  if (suite == "cov" || suite == "drift") return 20000;
  if (suite == "spde") return 10000;
  if (suite == "evolve") return 5000;
  return 0;
}

std::size_t effective_replicas(const RunConfig& cfg, const std::string& suite) {
  if (suite == "ops") return 0;
  if (cfg.replicas) return cfg.replicas;
  if (auto it = cfg.suite_replicas.find(suite); it != cfg.suite_replicas.end()) return it->second;
  return default_replicas(suite);
}

void validate(const RunConfig& cfg, const std::string& suite) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw ConfigError("unknown suite '" + suite + "'");
  if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) throw ConfigError("t_max must be positive");
  const std::size_t n = cfg.n ? cfg.n : default_n(suite);
  if (!is_power_of_two(n)) throw ConfigError("n must be a power of two (got " + std::to_string(n) + ")");
  for (double nu : cfg.nu)
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be positive (got " + std::to_string(nu) + ")");
  if (cfg.nu.empty()) throw ConfigError("nu list is empty");
  if (!(cfg.tail_tol > 0.0 && cfg.tail_tol < 1.0)) throw ConfigError("tail_tol must lie in (0, 1)");
  if (suite != "ops" && effective_replicas(cfg, suite) < 2) throw ConfigError("replicas must be at least 2");
  if (suite == "evolve") {
    if (!(cfg.Z > 0.0)) throw ConfigError("Z must be positive");
    const double dz_max = max_stable_dz(TimeGrid(cfg.t_max, n));
    if (cfg.dz < 0.0 || cfg.dz > dz_max * (1.0 + 1e-12))
      throw ConfigError("dz = " + std::to_string(cfg.dz) + " violates the stability rule dz <= 0.1 sqrt(dt) = " +
                        std::to_string(dz_max));
  }
}

// ---------------------------------------------------------------- suites

SuiteResult run_ops(const RunConfig& cfg) {
  validate(cfg, "ops");
  const std::size_t n = cfg.n ? cfg.n : default_n("ops");
  SuiteResult res{"ops", config_json(cfg, "ops"), {}, {}, std::nullopt};
  res.reports = ops_operator_reports(cfg, n);
  for (auto& r : ops_lnu_reports(cfg, n)) res.reports.push_back(std::move(r));
  return res;
}

SuiteResult run_cov(const RunConfig& cfg) {
  validate(cfg, "cov");
  const std::size_t n = cfg.n ? cfg.n : default_n("cov");
  const std::size_t R = effective_replicas(cfg, "cov");
  const std::uint64_t seed = suite_seed(cfg, suite_tag::kCov);
  SuiteResult res{"cov", config_json(cfg, "cov"), {}, {}, std::nullopt};

  // Point evaluation at (0, 1); t = 1 falls on a cell edge.
  {
    const double dy = 0.05, ds = 1.0 / 512.0;
    const SheetGeometry geom = covering_geometry(0.0, 0.0, gaussian_reach(1.0, cfg.tail_tol), dy, 1.0, ds);
    const CellWeights w = greenrep_weights(geom, 0.0, 1.0, cfg.tail_tol);
    const CellWeights* ws[] = {&w};
    const auto vals = replicate(ws, seed, R, 0);
    auto r = mean_report("greenrep_mean_x0_t1", vals[0], seed);
    r.grid = geom_json(geom);
    res.reports.push_back(r);
    r = variance_report("greenrep_variance_x0_t1", vals[0], cov_u(1.0, 1.0), seed);
    r.grid = geom_json(geom);
    r.detail = {{"x", 0.0}, {"t", 1.0}, {"isometry_variance", w.isometry_variance()}};
    res.reports.push_back(r);
  }

  // Gram matrices and U / dU independence on eight overlapping bumps.
  const TimeGrid g(cfg.t_max, n);
  const auto hs = cov_basis(g);
  double s_hi = 0.0;
  for (const auto& h : hs) s_hi = std::max(s_hi, h.support_hi());
  const double dy = 0.1, ds = 1.0 / 32.0;
  s_hi = std::ceil(s_hi / ds) * ds;
  const SheetGeometry geom = covering_geometry(0.0, 2.0, gaussian_reach(s_hi, cfg.tail_tol), dy, s_hi, ds);
  std::vector<CellWeights> ws;
  for (const auto& h : hs) ws.push_back(pair_u_weights(geom, 0.0, h, cfg.tail_tol));
  for (const auto& h : hs) ws.push_back(pair_v_weights(geom, 0.0, h, cfg.tail_tol));
  std::vector<const CellWeights*> ptrs;
  for (const auto& w : ws) ptrs.push_back(&w);
  const auto vals = replicate(ptrs, seed, R, R);
  const std::size_t m = hs.size();
  ordered_json basis = ordered_json::array();
  for (const auto& h : hs) basis.push_back({{"center", h.center()}, {"radius", h.radius()}});

  Eigen::MatrixXd se;
  const Eigen::MatrixXd cuu = to_matrix(vals, 0, m, 0, &se);
  auto r = matrix_compare(cuu, cov_u_gram(hs), se);
  r = named(r, "gram_u_8x8", "empirical Cov(U(0, h_i), U(0, h_j)) vs <h_i; C1 h_j>", R, seed);
  r.grid = geom_json(geom);
  r.grid["t_max"] = cfg.t_max;
  r.grid["n"] = n;
  r.detail["basis"] = basis;
  res.reports.push_back(r);

  const Eigen::MatrixXd cvv = to_matrix(vals, m, m, m, &se);
  r = named(matrix_compare(cvv, cov_v_gram(hs), se), "gram_v_8x8",
            "empirical Cov(dU(0, h_i), dU(0, h_j)) vs <h_i; C2 h_j>", R, seed);
  r.grid = geom_json(geom);
  r.detail["basis"] = basis;
  res.reports.push_back(r);

  const Eigen::MatrixXd cuv = to_matrix(vals, 0, m, m, &se);
  r = named(matrix_compare(cuv, Eigen::MatrixXd::Zero(m, m), se), "independence_u_v_8x8",
            "empirical Cov(U(0, h_i), dU(0, h_j)) vs 0", R, seed);
  r.grid = geom_json(geom);
  res.reports.push_back(r);

  // Stationarity in x: U(x, h_0) at x = 0, 1, 2 on independent sheets.
  const CellWeights w1 = pair_u_weights(geom, 1.0, hs[0], cfg.tail_tol);
  const CellWeights w2 = pair_u_weights(geom, 2.0, hs[0], cfg.tail_tol);
  const CellWeights* p1[] = {&w1};
  const CellWeights* p2[] = {&w2};
  const auto v1 = replicate(p1, seed, R, 2 * R);
  const auto v2 = replicate(p2, seed, R, 3 * R);
  res.reports.push_back(ks_report("stationarity_x0_x1", vals[0], v1[0], seed));
  res.reports.push_back(ks_report("stationarity_x0_x2", vals[0], v2[0], seed));
  res.reports.push_back(ks_report("stationarity_x1_x2", v1[0], v2[0], seed));
  return res;
}

SuiteResult run_drift(const RunConfig& cfg) {
  validate(cfg, "drift");
  const std::size_t R = effective_replicas(cfg, "drift");
  const std::uint64_t seed = suite_seed(cfg, suite_tag::kDrift);
  SuiteResult res{"drift", config_json(cfg, "drift"), {}, {}, std::nullopt};

  for (std::size_t idx = 0; idx < cfg.nu.size(); ++idx) {
    const double nu = cfg.nu[idx];
    const std::string tag = "_nu" + ordered_json(nu).dump();
    // One shared sheet per grid: the identity holds pathwise.
    const auto coarse = drift_pathwise(nu, 0.1, cfg.tail_tol, seed, 2 * idx);
    const auto fine = drift_pathwise(nu, 0.05, cfg.tail_tol, seed, 2 * idx + 1);
    auto r = bound_report("drift_pathwise" + tag, "relative RMS of field form - integral form over 20 y", coarse.rel_rms,
                          0.0, 5e-2);
    r.grid = geom_json(coarse.geom);
    r.seed = seed;
    r.detail = {{"nu", nu}, {"y_values", "0, 0.2, ..., 3.8"}};
    res.reports.push_back(r);
    r = at_least_report("drift_pathwise_refinement" + tag, "relative RMS ratio when dy and ds are halved",
                        coarse.rel_rms / fine.rel_rms, 2.0);
    r.grid = geom_json(fine.geom);
    r.seed = seed;
    r.detail = {{"rel_rms_coarse", coarse.rel_rms}, {"rel_rms_fine", fine.rel_rms}};
    res.reports.push_back(r);

    // Law of both forms at y = 0 on independent sheets covering s in [0, t_max].
    const double dy = 0.1, ds = 0.05;
    const double s_max = std::ceil(cfg.t_max / ds) * ds;
    const double reach = std::max(gaussian_reach(s_max, cfg.tail_tol), std::log(1.0 / cfg.tail_tol) / std::sqrt(nu));
    const SheetGeometry geom = covering_geometry(0.0, 0.0, reach, dy, s_max, ds);
    const CellWeights wf = drift_field_weights(geom, 0.0, nu, cfg.tail_tol);
    const CellWeights wi = drift_integral_weights(geom, 0.0, nu, cfg.tail_tol);
    const CellWeights* ptrs[] = {&wf, &wi};
    const std::uint64_t first = 1000 + 4 * R * idx;
    const auto vals = replicate(ptrs, seed, R, first);
    const double target = drift_variance(nu);
    for (int k = 0; k < 2; ++k) {
      const std::string form = k == 0 ? "field" : "integral";
      r = mean_report("drift_" + form + "_mean" + tag, vals[k], seed);
      r.grid = geom_json(geom);
      res.reports.push_back(r);
      r = variance_report("drift_" + form + "_variance" + tag, vals[k], target, seed);
      r.grid = geom_json(geom);
      r.detail = {{"nu", nu}, {"isometry_variance", (k == 0 ? wf : wi).isometry_variance()}};
      res.reports.push_back(r);
    }

    // Shift invariance of the integral form: y and the rectangle moved by 1.3.
    const double dys = 0.2, dss = 0.1, shift = 1.3;
    const double right = std::log(1.0 / cfg.tail_tol) / std::sqrt(nu);
    const SheetGeometry ga = SheetGeometry::make({0.0, std::ceil(right / dys) * dys, s_max}, dys, dss);
    SheetGeometry gb = ga;
    gb.y_min += shift;
    const CellWeights wa = drift_integral_weights(ga, 0.0, nu, cfg.tail_tol);
    const CellWeights wb = drift_integral_weights(gb, shift, nu, cfg.tail_tol);
    const CellWeights* pa[] = {&wa};
    const CellWeights* pb[] = {&wb};
    const auto va = replicate(pa, seed, R, first + 2 * R);
    const auto vb = replicate(pb, seed, R, first + 3 * R);
    r = ks_report("drift_shift_invariance" + tag, va[0], vb[0], seed);
    r.grid = geom_json(ga);
    r.detail["shift"] = shift;
    res.reports.push_back(r);
  }

  // Laplace-domain identity behind the drift, independent of the configured nu list.
  for (const auto& [nu, nu2] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {2.0, 1.0}, {2.0, 2.0}}) {
    auto r = verify_cameron_martin_laplace(nu, nu2, 0.0);
    r.name += "_nu" + ordered_json(nu).dump() + "_nu2" + ordered_json(nu2).dump();
    res.reports.push_back(std::move(r));
  }
  {
    const double a = cameron_martin_laplace(1.0, 2.0, 0.0, 32), b = cameron_martin_laplace(2.0, 1.0, 0.0, 32);
    auto r = bound_report("cameron_martin_symmetry", "|CM(1, 2) - CM(2, 1)|", std::abs(a - b), 0.0, 1e-10);
    res.reports.push_back(std::move(r));
    const double tgt = cameron_martin_target(1.0, 1.0, 0.0);
    const double e16 = std::abs(cameron_martin_laplace(1.0, 1.0, 0.0, 16) / tgt - 1.0);
    const double e32 = std::abs(cameron_martin_laplace(1.0, 1.0, 0.0, 32) / tgt - 1.0);
    r = at_least_report("cameron_martin_refinement", "error ratio 16 -> 32 panels", e16 / e32, 4.0);
    r.detail = {{"error_16", e16}, {"error_32", e32}};
    res.reports.push_back(std::move(r));
  }
  return res;
}

SuiteResult run_spde(const RunConfig& cfg) {
  validate(cfg, "spde");
  const std::size_t R = effective_replicas(cfg, "spde");
  const std::uint64_t seed = suite_seed(cfg, suite_tag::kSpde);
  SuiteResult res{"spde", config_json(cfg, "spde"), {}, {}, std::nullopt};

  WeakFormSetup setup;
  setup.t_max = cfg.t_max;
  setup.n = cfg.n ? cfg.n : default_n("spde");
  setup.tail_tol = cfg.tail_tol;
  const SpaceTimeTest f1{{{1.0, 0.0, 1.0, 2.0, 1.0}}};
  const SpaceTimeTest f2{{{1.0, 0.0, 1.0, 3.0, 1.5}, {-0.5, 0.5, 0.8, 2.0, 1.0}}};
  const std::vector<SpaceTimeTest> fs{f1, f2};
  const SheetGeometry geom = weakform_geometry(fs, setup);
  const CellWeights w1 = weakform_weights(geom, f1, setup);
  const CellWeights w2 = weakform_weights(geom, f2, setup);
  const CellWeights* ptrs[] = {&w1, &w2};
  const auto vals = replicate(ptrs, seed, R, 0);

  ordered_json grid = geom_json(geom);
  grid["t_max"] = setup.t_max;
  grid["n"] = setup.n;
  grid["dx"] = setup.dx;
  for (int k = 0; k < 2; ++k) {
    const std::string tag = k == 0 ? "_f1" : "_f2";
    ordered_json terms = ordered_json::array();
    for (const auto& t : fs[k].terms)
      terms.push_back({{"coef", t.coef}, {"x_center", t.x_center}, {"x_radius", t.x_radius}, {"t_center", t.t_center},
                       {"t_radius", t.t_radius}});
    auto r = mean_report("weakform_mean" + tag, vals[k], seed);
    r.grid = grid;
    r.detail = {{"f", terms}};
    res.reports.push_back(r);
    const double norm2 = weakform_norm2(fs[k]);
    r = variance_report("weakform_variance" + tag, vals[k], norm2, seed);
    r.grid = grid;
    r.detail = {{"f", terms}, {"isometry_variance", (k == 0 ? w1 : w2).isometry_variance()}};
    res.reports.push_back(r);
  }
  // Covariance against <f1, f2> by polarisation of the norm.
  SpaceTimeTest sum = f1, diff = f1;
  for (auto t : f2.terms) {
    sum.terms.push_back(t);
    t.coef = -t.coef;
    diff.terms.push_back(t);
  }
  const double inner = 0.25 * (weakform_norm2(sum) - weakform_norm2(diff));
  const auto c = covariance_se(vals[0], vals[1]);
  auto r = named(z_test(c.mean, c.se, inner), "weakform_covariance_f1_f2", "sample covariance vs <f1, f2>", R, seed);
  r.grid = grid;
  res.reports.push_back(r);
  return res;
}

SuiteResult run_evolve(const RunConfig& cfg) {
  validate(cfg, "evolve");
  const std::size_t n = cfg.n ? cfg.n : default_n("evolve");
  const std::size_t R = effective_replicas(cfg, "evolve");
  const std::uint64_t seed = suite_seed(cfg, suite_tag::kEvolve);
  SuiteResult res{"evolve", config_json(cfg, "evolve"), {}, {}, std::nullopt};

  const TimeGrid g(cfg.t_max, n);
  const SpectralPlan plan(g);
  const std::vector<TestFunction> obs{bump(2.0, 1.0, g), bump(0.25 * cfg.t_max + 2.0, 1.5, g)};
  EvolveConfig ec;
  ec.dz = cfg.dz > 0.0 ? cfg.dz : max_stable_dz(g);
  ec.Z = cfg.Z;
  ec.observables = obs;
  ec.seed = seed;
  const StationarySampler sampler(g);

  std::vector<Trajectory> trs(R);
  const auto count = static_cast<std::ptrdiff_t>(R);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    EvolveConfig c = ec;
    c.stream = 2 * static_cast<std::uint64_t>(r) + 1;
    Trajectory t = evolve(sampler.sample(seed, 2 * static_cast<std::uint64_t>(r)), c, plan);
    if (r != 0) t.final_state = {};
    trs[static_cast<std::size_t>(r)] = std::move(t);
  }

  const Trajectory& t0 = trs[0];
  const ordered_json grid = {{"t_max", cfg.t_max}, {"n", n}, {"dt", g.dt()}, {"dz", t0.dz}, {"Z", cfg.Z},
                             {"steps", t0.steps}, {"noise_band_limit", std::numbers::pi / g.dt()}};
  const auto gu = gram_u(obs, obs), gv = gram_v(obs, obs);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string tag = "_h" + std::to_string(i);
    std::vector<double> u(R), v(R);
    for (std::size_t r = 0; r < R; ++r) {
      u[r] = trs[r].u_obs.back()[i];
      v[r] = trs[r].v_obs.back()[i];
    }
    const ordered_json hj = {{"center", obs[i].center()}, {"radius", obs[i].radius()}};
    for (auto* rep : {&u, &v}) {
      const std::string which = rep == &u ? "u" : "v";
      auto r = mean_report("stationary_mean_" + which + tag, *rep, seed);
      r.grid = grid;
      r.detail = {{"h", hj}};
      res.reports.push_back(r);
      r = variance_report("stationary_variance_" + which + tag, *rep, rep == &u ? gu(i, i) : gv(i, i), seed);
      r.grid = grid;
      r.detail = {{"h", hj}};
      res.reports.push_back(r);
    }
  }

  // Bookkeeping: <u_Z; h> - <u_0; h> = sum <v_z; h> dz.
  double book = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < t0.steps; ++k) acc += t0.v_obs[k][i] * t0.dz;
    book = std::max(book, std::abs(t0.u_obs.back()[i] - t0.u_obs.front()[i] - acc));
  }
  auto r = bound_report("bookkeeping_identity", "max |<u_Z; h> - <u_0; h> - sum <v_z; h> dz|", book, 0.0, 1e-10);
  r.grid = grid;
  r.seed = seed;
  res.reports.push_back(r);

  // Noise-off energy along the replica-0 initial state.
  {
    FieldState s = sampler.sample(seed, 0);
    const std::vector<double> zero(n, 0.0);
    double e = energy(s, plan), worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < t0.steps; ++k) {
      s = euler_step(s, t0.dz, zero, plan);
      const double e2 = energy(s, plan);
      worst = std::max(worst, (e2 - e) / e);
      e = e2;
    }
    r = at_least_report("noise_off_energy_decay", "dz - max relative energy increase per step", t0.dz - worst, 0.0);
    r.grid = grid;
    r.seed = seed;
    r.detail = {{"max_relative_increase", worst}, {"final_energy", e}};
    res.reports.push_back(r);
  }

  std::ostringstream csv;
  csv.precision(17);
  csv << "z";
  for (std::size_t i = 0; i < obs.size(); ++i) csv << ",u_h" << i << ",v_h" << i;
  csv << '\n';
  for (std::size_t k = 0; k < t0.z.size(); ++k) {
    csv << t0.z[k];
    for (std::size_t i = 0; i < obs.size(); ++i) csv << ',' << t0.u_obs[k][i] << ',' << t0.v_obs[k][i];
    csv << '\n';
  }
  res.csv = csv.str();
  MatrixDump d{t0.dz, g.dt(), 0.0, cfg.Z, cfg.t_max, seed, 1, {}};
  d.values = t0.final_state.u;
  d.values.insert(d.values.end(), t0.final_state.v.begin(), t0.final_state.v.end());
  res.dump = std::move(d);
  return res;
}

SuiteResult run_suite(const std::string& suite, const RunConfig& cfg) {
  if (suite == "ops") return run_ops(cfg);
  if (suite == "cov") return run_cov(cfg);
  if (suite == "drift") return run_drift(cfg);
  if (suite == "spde") return run_spde(cfg);
  if (suite == "evolve") return run_evolve(cfg);
  throw ConfigError("unknown suite '" + suite + "'");
}

// ---------------------------------------------------------------- output

nlohmann::ordered_json suite_document(const SuiteResult& r, const std::string& timestamp) {
  ordered_json doc;
  doc["suite"] = r.suite;
  if (!timestamp.empty()) doc["timestamp"] = timestamp;
  doc["config"] = r.config;
  doc["pass"] = r.pass();
  ordered_json reps = ordered_json::array();
  for (const auto& rep : r.reports) reps.push_back(to_json(rep));
  doc["reports"] = std::move(reps);
  return doc;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> write_outputs(const SuiteResult& r, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> paths;
  const auto write = [&](const std::string& name, const std::string& text) {
    const std::string path = (std::filesystem::path(out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
    paths.push_back(path);
  };
  write(r.suite + "_report.json", suite_document(r, utc_timestamp()).dump(2) + "\n");
  if (!r.csv.empty()) write(r.suite + "_trajectory.csv", r.csv);
  if (r.dump) {
    const std::string path = (std::filesystem::path(out_dir) / (r.suite + "_final_state.bin")).string();
    const auto& d = *r.dump;
    write_matrix_dump(path, {d.dy, d.ds, d.y_min, d.y_max, d.s_max, d.seed, d.stream}, d.values);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace shelab
