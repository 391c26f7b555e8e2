#include <doctest.h>

#include <cmath>
#include <numbers>

#include "shelab/errors.hpp"
#include "shelab/fracops.hpp"
#include "shelab/kernels.hpp"

using namespace shelab;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Windowed sine on the SymGrid: antisymmetric, smooth, decaying at the ends.
std::vector<double> windowed_sine(const TimeGrid& g, double k, double lo, double hi) {
  const SymGrid s(g);
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s.node(i), a = std::abs(t);
    const double w = a > lo && a < hi ? bump_value(a, 0.5 * (lo + hi), 0.5 * (hi - lo)) / std::exp(-1.0) : 0.0;
    v[i] = w * std::sin(k * t);
  }
  return v;
}

}  // namespace

TEST_CASE("frac_laplacian with beta 0 is the identity") {
  const TimeGrid g(8.0, 512);
  const SpectralPlan plan(g);
  const auto f = antisym_extend(bump(2.0, 1.0, g).samples());
  CHECK(max_abs_diff(frac_laplacian(f, 0.0, plan), f) < 1e-12);
}

TEST_CASE("frac_laplacian on a windowed sine is multiplication by k^beta") {
  const TimeGrid g(32.0, 4096);
  const SpectralPlan plan(g);
  const double k = 2.0 * std::numbers::pi * 8.0 / 4.0;  // 8 periods over a window of width 4
  const auto f = windowed_sine(g, k, 10.0, 22.0);
  const auto out = frac_laplacian(f, 0.5, plan);
  const SymGrid s(g);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s.node(i);
    if (t < 14.0 || t > 18.0) continue;
    err = std::max(err, std::abs(out[i] - std::sqrt(k) * f[i]));
    ref = std::max(ref, std::abs(std::sqrt(k) * f[i]));
  }
  CHECK(err / ref < 1e-2);
}

TEST_CASE("quarter powers compose to the half power") {
  const TimeGrid g(8.0, 1024);
  const SpectralPlan plan(g);
  const auto f = antisym_extend(bump(3.0, 1.5, g).samples());
  const auto once = frac_laplacian(f, 0.25, plan);
  const auto twice = frac_laplacian(once, 0.25, plan, TailModel::zero());
  const auto half = frac_laplacian(f, 0.5, plan);
  // The first pass leaves a slowly decaying output that is truncated at the
  // SymGrid ends, so the comparison stays away from them.
  const SymGrid sg(g);
  double err = 0.0;
  for (std::size_t i = 0; i < half.size(); ++i)
    if (std::abs(sg.node(i)) <= 6.0) err = std::max(err, std::abs(twice[i] - half[i]));
  CHECK(err < 1e-3);
}

TEST_CASE("frac_laplacian rejects beta < -1 on inputs with nonzero mean") {
  const TimeGrid g(8.0, 64);
  const SpectralPlan plan(g);
  std::vector<double> even(128, 0.0);
  even[60] = even[67] = 1.0;
  CHECK_THROWS_AS(frac_laplacian(even, -1.5, plan), DomainError);
  CHECK_NOTHROW(frac_laplacian(antisym_extend(bump(2.0, 1.0, g).samples()), -1.5, plan));
}

TEST_CASE("SpectralPlan validates its padding") {
  const TimeGrid g(8.0, 64);
  CHECK_THROWS_AS(SpectralPlan(g, 1), DomainError);
  CHECK_THROWS_AS(SpectralPlan(g, 3), DomainError);
  CHECK(SpectralPlan(g, 2).padded_size() == 256);
}

TEST_CASE("decays_at_ends flags truncated inputs") {
  const TimeGrid g(8.0, 256);
  CHECK(decays_at_ends(antisym_extend(bump(2.0, 1.0, g).samples())));
  CHECK_FALSE(decays_at_ends(std::vector<double>(512, 1.0)));
}

TEST_CASE("toeplitz_apply matches a direct sum, serial and parallel bit-identical") {
  const std::size_t n = 37;
  std::vector<double> kernel(2 * n - 1), src(n);
  for (std::size_t i = 0; i < kernel.size(); ++i) kernel[i] = std::cos(0.3 * double(i)) / (1.0 + double(i));
  for (std::size_t i = 0; i < n; ++i) src[i] = std::sin(1.7 * double(i));
  const auto par = toeplitz_apply(kernel, src, 5, 30, Exec::Parallel);
  const auto ser = toeplitz_apply(kernel, src, 5, 30, Exec::Serial);
  REQUIRE(par.size() == 25);
  CHECK(par == ser);
  for (std::size_t i = 5; i < 30; ++i) {
    double direct = 0.0;
    for (std::size_t m = 0; m < n; ++m) direct += kernel[i - m + n - 1] * src[m];
    CHECK(par[i - 5] == doctest::Approx(direct).epsilon(1e-13));
  }
  CHECK_THROWS_AS(toeplitz_apply(std::span<const double>(kernel).first(10), src, 0, 1), DomainError);
}

TEST_CASE("op_A2 matches sqrt(2) times the quarter-order operator") {
  const TimeGrid g(8.0, 4096);
  const SpectralPlan plan(g);
  const TestFunction h = bump(2.0, 1.0, g);
  const auto a2 = op_A2(h);
  const auto ref = restrict_positive(frac_laplacian(antisym_extend(h.samples()), 0.5, plan));
  double err = 0.0, hs = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, std::abs(a2[i] - std::sqrt(2.0) * ref[i]));
    hs = std::max(hs, std::abs(h.samples()[i]));
  }
  CHECK(err <= 1e-2 * hs);
}

TEST_CASE("op_A2 tail bound beyond twice the support") {
  const TimeGrid g(16.0, 4096);
  const TestFunction h = bump(2.0, 1.0, g);
  const auto a2 = op_A2(h);
  const double c = h.support_hi(), sup = std::exp(-1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.node(i);
    if (t >= 2.0 * c) CHECK(std::abs(a2[i]) <= sup * c * std::pow(t - c, -1.5));
  }
}

TEST_CASE("op_A2 of the zero function is zero, serial equals parallel") {
  const TimeGrid g(8.0, 256);
  for (double v : op_A2(bump(2.0, 1.0, g, 0.0))) CHECK(v == 0.0);
  const TestFunction h = bump(3.0, 2.0, g);
  CHECK(op_A2(h, Exec::Serial) == op_A2(h, Exec::Parallel));
}

TEST_CASE("op_A1 eigen-identity at the origin") {
  for (double nu : {1.0, 4.0}) {
    const TimeGrid g(8.0, 4096);
    const SpectralPlan plan(g);
    std::vector<double> f(g.size()), fp(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      f[i] = std::exp(-nu * g.node(i));
      fp[i] = -nu * f[i];
    }
    const double ts[] = {0.0, 1.0, 3.0};
    const auto a1 = op_A1_at({{g, f}, TailModel::exponential(nu), fp}, plan, ts);
    CHECK(a1[0] == doctest::Approx(std::sqrt(nu)).epsilon(1e-3));
    CHECK(a1[1] == doctest::Approx(std::sqrt(nu) * std::exp(-nu)).epsilon(1e-3));
    CHECK(a1[2] == doctest::Approx(std::sqrt(nu) * std::exp(-3 * nu)).epsilon(1e-3));
  }
}

TEST_CASE("op_A1 of a function with zero derivative and zero tail is zero") {
  const TimeGrid g(8.0, 128);
  const SpectralPlan plan(g);
  const std::vector<double> f(128, 0.0), fp(128, 0.0);
  for (double v : op_A1({{g, f}, TailModel::zero(), fp}, plan)) CHECK(v == 0.0);
}

TEST_CASE("op_A1 refuses an unknown tail") {
  const TimeGrid g(8.0, 128);
  const SpectralPlan plan(g);
  const DecayedFunction fd{{g, std::vector<double>(128, 0.0)}, TailModel::unknown(), std::nullopt};
  CHECK_THROWS_AS(op_A1(fd, plan), ConfigError);
  CHECK_THROWS_AS(a1_derivative(fd, plan), ConfigError);
}

TEST_CASE("halfroot_conv inverts op_A2") {
  const TimeGrid g(8.0, 4096);
  const TestFunction h = bump(2.0, 1.0, g);
  const auto back = halfroot_conv({g, op_A2(h)}, TailModel::power_law(kA2TailExponent));
  CHECK(max_abs_diff(back, h.samples()) <= 1e-2 * std::exp(-1.0));
}

TEST_CASE("halfroot_conv of e^{-t} reproduces l_nu") {
  const TimeGrid g(8.0, 2048);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(-g.node(i));
  const auto conv = halfroot_conv({g, f}, TailModel::exponential(1.0));
  for (std::size_t i = 0; i < g.size(); i += 97) CHECK(conv[i] == doctest::Approx(l_nu({}, g.node(i))).epsilon(1e-3));
  for (double v : halfroot_conv({g, std::vector<double>(g.size(), 0.0)})) CHECK(v == 0.0);
}

TEST_CASE("A1 A2 identity: tolerance, zero input, refinement") {
  const auto run = [](std::size_t n) {
    const TimeGrid g(8.0, n);
    return verify_A1A2_identity(bump(2.0, 1.0, g), SpectralPlan(g));
  };
  const auto r1 = run(4096), r2 = run(8192);
  CHECK(r1.pass);
  CHECK(r1.estimate / r2.estimate >= 1.8);
  const TimeGrid g(8.0, 256);
  const auto zero = verify_A1A2_identity(bump(2.0, 1.0, g, 0.0), SpectralPlan(g));
  CHECK(zero.estimate == 0.0);
  CHECK(zero.pass);
}

TEST_CASE("tail models") {
  CHECK(TailModel::zero().value(10.0, 8.0, 3.0) == 0.0);
  CHECK(TailModel::power_law(2.5).value(16.0, 8.0, 1.0) == doctest::Approx(std::pow(2.0, -2.5)));
  CHECK(TailModel::exponential(2.0).value(9.0, 8.0, 1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(TailModel::power_law(2.5).derivative(8.0, 8.0, 1.0) == doctest::Approx(-2.5 / 8.0));
  CHECK_THROWS_AS(TailModel::unknown().value(9.0, 8.0, 1.0), ConfigError);
}
