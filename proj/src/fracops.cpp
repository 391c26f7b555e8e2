#include "shelab/fracops.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "shelab/errors.hpp"

namespace shelab {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrtFourPi = 2.0 * kSqrtPi;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct RealBuf {
  double* p;
  explicit RealBuf(std::size_t n) : p(fftw_alloc_real(n)) {}
  ~RealBuf() { fftw_free(p); }
  RealBuf(const RealBuf&) = delete;
  RealBuf& operator=(const RealBuf&) = delete;
};

struct ComplexBuf {
  fftw_complex* p;
  explicit ComplexBuf(std::size_t n) : p(fftw_alloc_complex(n)) {}
  ~ComplexBuf() { fftw_free(p); }
  ComplexBuf(const ComplexBuf&) = delete;
  ComplexBuf& operator=(const ComplexBuf&) = delete;
};

// Adaptive Gauss-Kronrod on [a, inf) with an absolute floor on the tolerance.
template <class F>
double integrate_to_inf(F f, double a) {
  using Quad = boost::math::quadrature::gauss_kronrod<double, 21>;
  double err = 0.0;
  return Quad::integrate(f, a, std::numeric_limits<double>::infinity(), 15, 1e-12, &err);
}

}  // namespace

double TailModel::value(double t, double t_anchor, double anchor_value) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::PowerLaw: return anchor_value * std::pow(t / t_anchor, -param);
    case Kind::Exponential: return anchor_value * std::exp(-param * (t - t_anchor));
    case Kind::Unknown: break;
  }
  throw ConfigError("tail model unknown: the decay of f beyond t_max must be specified");
}

double TailModel::derivative(double t, double t_anchor, double anchor_value) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::PowerLaw: return -param / t * value(t, t_anchor, anchor_value);
    case Kind::Exponential: return -param * value(t, t_anchor, anchor_value);
    case Kind::Unknown: break;
  }
  throw ConfigError("tail model unknown: the decay of f beyond t_max must be specified");
}

struct SpectralPlan::Fftw {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Fftw() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

SpectralPlan::SpectralPlan(const TimeGrid& grid, std::size_t padding)
    : grid_(grid), padding_(padding), m_(padding * 2 * grid.size()) {
  if (padding < 2 || !is_power_of_two(padding)) throw DomainError("SpectralPlan: padding must be a power of two >= 2");
  fftw_ = std::make_shared<Fftw>();
  RealBuf r(m_);
  ComplexBuf c(m_ / 2 + 1);
  std::lock_guard<std::mutex> lock(planner_mutex());
  const int m = static_cast<int>(m_);
  // FFTW_ESTIMATE keeps the algorithm choice, and hence the bits, reproducible.
  fftw_->forward = fftw_plan_dft_r2c_1d(m, r.p, c.p, FFTW_ESTIMATE);
  fftw_->backward = fftw_plan_dft_c2r_1d(m, c.p, r.p, FFTW_ESTIMATE);
}

double SpectralPlan::frequency(std::size_t k) const {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / (static_cast<double>(m_) * grid_.dt());
}

namespace {

// Writes a SymGrid vector and its antisymmetric tail continuation into a
// periodic buffer of length m. SymGrid node i sits at buffer position i.
void fill_buffer(double* buf, std::size_t m, std::span<const double> sym, const TimeGrid& g, const TailModel& tail) {
  const std::size_t N = sym.size();
  const std::size_t n = N / 2;
  std::copy(sym.begin(), sym.end(), buf);
  std::fill(buf + N, buf + m, 0.0);
  if (tail.kind == TailModel::Kind::Zero) return;
  const std::size_t ext = (m - N) / 2;
  const double t_anchor = g.node(n - 1);
  const double hi = sym[N - 1];
  const double lo = -sym[0];
  for (std::size_t e = 0; e < ext; ++e) {
    const double t = g.node(n + e);
    buf[N + e] = tail.value(t, t_anchor, hi);
    buf[m - 1 - e] = -tail.value(t, t_anchor, lo);
  }
}

}  // namespace

std::vector<double> SpectralPlan::apply(std::span<const double> sym,
                                        const std::function<std::complex<double>(double)>& mult,
                                        const TailModel& tail) const {
  const std::size_t N = 2 * grid_.size();
  if (sym.size() != N) throw DomainError("SpectralPlan::apply: input is not on the plan's SymGrid");
  RealBuf r(m_);
  ComplexBuf c(m_ / 2 + 1);
  fill_buffer(r.p, m_, sym, grid_, tail);
  fftw_execute_dft_r2c(fftw_->forward, r.p, c.p);
  const double scale = 1.0 / static_cast<double>(m_);
  for (std::size_t k = 0; k <= m_ / 2; ++k) {
    const std::complex<double> v(c.p[k][0], c.p[k][1]);
    const std::complex<double> w = v * mult(frequency(k)) * scale;
    c.p[k][0] = w.real();
    c.p[k][1] = w.imag();
  }
  fftw_execute_dft_c2r(fftw_->backward, c.p, r.p);
  return std::vector<double>(r.p, r.p + N);
}

std::vector<double> SpectralPlan::apply_sum(std::span<const Term> terms) const {
  const std::size_t N = 2 * grid_.size();
  const std::size_t nc = m_ / 2 + 1;
  RealBuf r(m_);
  ComplexBuf c(nc);
  std::vector<std::complex<double>> acc(nc, 0.0);
  const double scale = 1.0 / static_cast<double>(m_);
  for (const auto& term : terms) {
    if (term.sym.size() != N) throw DomainError("SpectralPlan::apply_sum: input is not on the plan's SymGrid");
    fill_buffer(r.p, m_, term.sym, grid_, TailModel::zero());
    fftw_execute_dft_r2c(fftw_->forward, r.p, c.p);
    for (std::size_t k = 0; k < nc; ++k) {
      const double tau = frequency(k);
      const double mult = term.beta == 0.0 ? 1.0 : std::pow(tau, term.beta);
      acc[k] += std::complex<double>(c.p[k][0], c.p[k][1]) * (term.weight * mult * scale);
    }
  }
  for (std::size_t k = 0; k < nc; ++k) {
    c.p[k][0] = acc[k].real();
    c.p[k][1] = acc[k].imag();
  }
  fftw_execute_dft_c2r(fftw_->backward, c.p, r.p);
  return std::vector<double>(r.p, r.p + N);
}

std::vector<double> frac_laplacian(std::span<const double> sym, double beta, const SpectralPlan& plan,
                                   const TailModel& tail) {
  if (beta < 0.0) {
    double sum = 0.0, l1 = 0.0;
    for (double v : sym) {
      sum += v;
      l1 += std::abs(v);
    }
    if (beta < -1.0 && std::abs(sum) > 1e-12 * l1)
      throw DomainError("frac_laplacian: beta < -1 requires a mean-free input (multiplier singular at tau = 0)");
  }
  auto mult = [beta](double tau) -> std::complex<double> {
    if (beta == 0.0) return 1.0;
    if (tau == 0.0) return 0.0;
    return std::pow(tau, beta);
  };
  return plan.apply(sym, mult, tail);
}

bool decays_at_ends(std::span<const double> sym, double rel) {
  double mx = 0.0;
  for (double v : sym) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) return true;
  return std::abs(sym.front()) < rel * mx && std::abs(sym.back()) < rel * mx;
}

std::vector<double> spectral_derivative(std::span<const double> sym, const SpectralPlan& plan,
                                        const TailModel& tail) {
  const double nyquist = plan.frequency(plan.padded_size() / 2);
  auto mult = [nyquist](double tau) -> std::complex<double> {
    if (tau == nyquist) return 0.0;
    return {0.0, tau};
  };
  return plan.apply(sym, mult, tail);
}

namespace {
double row_sum(std::span<const double> kernel, std::span<const double> src, std::size_t i) {
  const std::size_t N = src.size();
  double acc = 0.0;
  for (std::size_t m = 0; m < N; ++m) acc += kernel[i + N - 1 - m] * src[m];
  return acc;
}
}  // namespace

std::vector<double> toeplitz_apply(std::span<const double> kernel, std::span<const double> src, std::size_t row_begin,
                                   std::size_t row_end, Exec exec) {
  const std::size_t N = src.size();
  if (kernel.size() != 2 * N - 1) throw DomainError("toeplitz_apply: kernel must have length 2N - 1");
  if (row_end > N || row_begin > row_end) throw DomainError("toeplitz_apply: row range out of bounds");
  std::vector<double> out(row_end - row_begin);
  const auto rows = static_cast<std::ptrdiff_t>(out.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) out[r] = row_sum(kernel, src, row_begin + static_cast<std::size_t>(r));
  } else {
    for (std::ptrdiff_t r = 0; r < rows; ++r) out[r] = row_sum(kernel, src, row_begin + static_cast<std::size_t>(r));
  }
  return out;
}

namespace {

// Integral of 1/sqrt(|u|) over the cell of lag j (width dt, centred at j dt),
// without the leading constant.
double root_cell(long j, double dt) {
  const double a = static_cast<double>(std::labs(j));
  if (j == 0) return 2.0 * 2.0 * std::sqrt(0.5 * dt);
  return 2.0 * (std::sqrt((a + 0.5) * dt) - std::sqrt((a - 0.5) * dt));
}

}  // namespace

std::vector<double> op_A2_from_derivative(const TimeGrid& grid, std::span<const double> h_prime, Exec exec) {
  const std::size_t n = grid.size();
  if (h_prime.size() != n) throw DomainError("op_A2: derivative samples not on the grid");
  const std::size_t N = 2 * n;
  const double dt = grid.dt();
  std::vector<double> kernel(2 * N - 1);
  for (std::size_t idx = 0; idx < kernel.size(); ++idx) {
    const long j = static_cast<long>(idx) - static_cast<long>(N - 1);
    kernel[idx] = j == 0 ? 0.0 : (j > 0 ? 1.0 : -1.0) * root_cell(j, dt) / kSqrtPi;
  }
  const auto src = even_extend(h_prime);
  return toeplitz_apply(kernel, src, n, N, exec);
}

std::vector<double> op_A2(const TestFunction& h, Exec exec) {
  return op_A2_from_derivative(h.grid(), h.derivative_samples(), exec);
}

std::vector<double> a1_derivative(const DecayedFunction& fd, const SpectralPlan& plan) {
  if (fd.tail.kind == TailModel::Kind::Unknown)
    throw ConfigError("op_A1: tail decay of the input is unknown; supply a tail model");
  if (!(fd.f.grid == plan.grid())) throw DomainError("op_A1: input is not on the plan's grid");
  if (fd.derivative) {
    if (fd.derivative->size() != fd.f.grid.size()) throw DomainError("op_A1: derivative samples not on the grid");
    return *fd.derivative;
  }
  const auto sym = antisym_extend(fd.f.values);
  return restrict_positive(spectral_derivative(sym, plan, fd.tail));
}

namespace {

// Contribution of the tail beyond t_max to A1 f(t).
double a1_tail(const DecayedFunction& fd, double t) {
  if (fd.tail.kind == TailModel::Kind::Zero) return 0.0;
  const TimeGrid& g = fd.f.grid;
  const double t_anchor = g.node(g.size() - 1);
  const double anchor = fd.f.values.back();
  if (anchor == 0.0) return 0.0;
  const double T = g.t_max();
  auto integrand = [&](double w) { return -fd.tail.derivative(t + w * w, t_anchor, anchor) * 2.0 / kSqrtPi; };
  return integrate_to_inf(integrand, std::sqrt(T - t));
}

}  // namespace

std::vector<double> op_A1(const DecayedFunction& fd, const SpectralPlan& plan, Exec exec) {
  const auto fp = a1_derivative(fd, plan);
  const TimeGrid& g = fd.f.grid;
  const std::size_t n = g.size();
  const double dt = g.dt();
  // out_i = sum_{m >= i} c_{m-i} (-f'_m): kernel index (i - m) + n - 1.
  std::vector<double> kernel(2 * n - 1, 0.0);
  kernel[n - 1] = 2.0 * std::sqrt(0.5 * dt) / kSqrtPi;
  for (std::size_t l = 1; l < n; ++l) {
    const double a = static_cast<double>(l);
    kernel[n - 1 - l] = 2.0 * (std::sqrt((a + 0.5) * dt) - std::sqrt((a - 0.5) * dt)) / kSqrtPi;
  }
  std::vector<double> src(n);
  for (std::size_t m = 0; m < n; ++m) src[m] = -fp[m];
  auto out = toeplitz_apply(kernel, src, 0, n, exec);
  for (std::size_t i = 0; i < n; ++i) out[i] += a1_tail(fd, g.node(i));
  return out;
}

std::vector<double> op_A1_at(const DecayedFunction& fd, const SpectralPlan& plan, std::span<const double> ts) {
  const auto fp = a1_derivative(fd, plan);
  const TimeGrid& g = fd.f.grid;
  const double dt = g.dt();
  std::vector<double> out(ts.size());
  for (std::size_t q = 0; q < ts.size(); ++q) {
    const double t = ts[q];
    if (t < 0.0 || t > g.t_max()) throw DomainError("op_A1_at: evaluation point outside [0, t_max]");
    double acc = 0.0;
    for (std::size_t m = 0; m < g.size(); ++m) {
      const double a = static_cast<double>(m) * dt, b = a + dt;
      if (b <= t) continue;
      const double w = a >= t ? std::sqrt(b - t) - std::sqrt(a - t) : std::sqrt(b - t);
      acc += 2.0 * w / kSqrtPi * (-fp[m]);
    }
    out[q] = acc + a1_tail(fd, t);
  }
  return out;
}

std::vector<double> halfroot_conv(const GridFunction& f, const TailModel& tail, Exec exec) {
  const TimeGrid& g = f.grid;
  const std::size_t n = g.size();
  if (f.values.size() != n) throw DomainError("halfroot_conv: values not on the grid");
  const std::size_t N = 2 * n;
  const double dt = g.dt();
  std::vector<double> kernel(2 * N - 1);
  for (std::size_t idx = 0; idx < kernel.size(); ++idx) {
    const long j = static_cast<long>(idx) - static_cast<long>(N - 1);
    kernel[idx] = root_cell(j, dt) / kSqrtFourPi;
  }
  const auto src = antisym_extend(f.values);
  auto out = toeplitz_apply(kernel, src, n, N, exec);
  if (tail.kind == TailModel::Kind::Zero || f.values.back() == 0.0) return out;
  const double t_anchor = g.node(n - 1);
  const double anchor = f.values.back();
  const double T = g.t_max();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = g.node(i);
    auto integrand = [&](double w) {
      const double tp = t + w * w;
      return 2.0 / kSqrtFourPi * tail.value(tp, t_anchor, anchor) * (1.0 - w / std::sqrt(2.0 * t + w * w));
    };
    out[i] += integrate_to_inf(integrand, std::sqrt(T - t));
  }
  return out;
}

VerificationReport verify_A1A2_identity(const TestFunction& h, const SpectralPlan& plan) {
  const TimeGrid& g = h.grid();
  if (!(g == plan.grid())) throw DomainError("verify_A1A2_identity: test function not on the plan's grid");
  const auto a2 = op_A2(h);
  const DecayedFunction fd{{g, a2}, TailModel::power_law(kA2TailExponent), std::nullopt};
  const auto a1a2 = op_A1(fd, plan);
  const auto hs = antisym_extend(h.samples());
  const auto fl1 = restrict_positive(frac_laplacian(hs, 1.0, plan));
  const auto hp = h.derivative_samples();
  double resid = 0.0, hp_max = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    resid = std::max(resid, std::abs(a1a2[i] + hp[i] - fl1[i]));
    hp_max = std::max(hp_max, std::abs(hp[i]));
  }
  auto r = bound_report("A1A2_identity", "max |A1 A2 h + h' - (-d^2)^{1/2} h^a| on [0, t_max]", resid, 0.0,
                        2e-2 * hp_max);
  r.grid = {{"t_max", g.t_max()}, {"n", g.size()}, {"dt", g.dt()}, {"padding", plan.padding()}};
  r.detail = {{"h_prime_sup", hp_max}, {"tail_exponent", kA2TailExponent}, {"input_decays", decays_at_ends(hs)}};
  return r;
}

}  // namespace shelab
