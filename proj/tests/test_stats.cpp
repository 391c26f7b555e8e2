#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shelab/errors.hpp"
#include "shelab/rng.hpp"
#include "shelab/stats.hpp"

using namespace shelab;

namespace {
std::vector<double> normals(std::uint64_t seed, std::size_t n, double shift = 0.0) {
  Engine eng = make_engine(seed, 0);
  Normal normal;
  std::vector<double> v(n);
  for (auto& x : v) x = normal(eng) + shift;
  return v;
}
}  // namespace

TEST_CASE("mean_se examples") {
  const std::vector<double> c(50, 3.25);
  const auto mc = mean_se(c);
  CHECK(mc.mean == 3.25);
  CHECK(mc.se == 0.0);
  std::vector<double> alt(1000);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = static_cast<double>(i % 2);
  const auto ma = mean_se(alt);
  CHECK(ma.mean == doctest::Approx(0.5));
  CHECK(ma.se == doctest::Approx(0.5 / std::sqrt(1000.0) * std::sqrt(1000.0 / 999.0)).epsilon(1e-12));
  CHECK(ma.se == doctest::Approx(0.015823).epsilon(1e-4));
  CHECK_THROWS_AS(mean_se(std::vector<double>{1.0}), DomainError);
}

TEST_CASE("mean_se calibration over 100 seeds") {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto m = mean_se(normals(seed, 100000));
    ok += std::abs(m.mean) <= 4 * m.se;
  }
  CHECK(ok >= 100);
}

TEST_CASE("variance_se and covariance_se against known moments") {
  const auto x = normals(5, 200000);
  const auto v = variance_se(x);
  // Var of the sample variance of N(0,1) is 2 / (n - 1).
  CHECK(v.se == doctest::Approx(std::sqrt(2.0 / 199999.0)).epsilon(0.02));
  CHECK(std::abs(v.mean - 1.0) <= 4 * v.se);
  auto y = normals(6, 200000);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.6 * x[i] + 0.8 * y[i];
  const auto c = covariance_se(x, y);
  CHECK(std::abs(c.mean - 0.6) <= 4 * c.se);
  // Var(xy) = 1 + rho^2 for standard bivariate normals.
  CHECK(c.se == doctest::Approx(std::sqrt(1.36 / 200000.0)).epsilon(0.03));
  CHECK_THROWS_AS(covariance_se(x, std::vector<double>(3, 0.0)), DomainError);
}

TEST_CASE("z_test examples") {
  const auto a = z_test(1.0, 0.1, 1.0, 4.0);
  CHECK(a.pass);
  CHECK(a.z == 0.0);
  const auto b = z_test(1.5, 0.1, 1.0, 4.0);
  CHECK_FALSE(b.pass);
  CHECK(b.z == doctest::Approx(5.0));
  const auto c = z_test(1.39, 0.1, 1.0, 4.0);
  CHECK(c.pass);
  CHECK(c.z == doctest::Approx(3.9));
  const auto d = z_test(1.2, 0.0, 1.0);
  CHECK_FALSE(d.pass);
  CHECK(std::isinf(d.z));
  CHECK(z_test(1.0, 0.0, 1.0).pass);
  CHECK(z_test(1.0, 0.1, 1.0).tolerance == 4.0);
}

TEST_CASE("kolmogorov_q against scipy kstwobign.sf") {
  CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.049485876755377876).epsilon(1e-12));
  CHECK(kolmogorov_q(2.0) == doctest::Approx(0.0006709252557796953).epsilon(1e-10));
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(1e-3) == doctest::Approx(1.0));
}

TEST_CASE("ks_two_sample examples") {
  const auto a = normals(1, 500);
  const auto same = ks_two_sample(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p == doctest::Approx(1.0));
  const auto disjoint = ks_two_sample(normals(1, 300, -20.0), normals(2, 400, 20.0));
  CHECK(disjoint.statistic == 1.0);
  CHECK(disjoint.p < 1e-20);
  CHECK(ks_two_sample(std::vector<double>{1, 2, 3}, std::vector<double>{1.5, 2.5}).statistic ==
        doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(ks_two_sample(std::vector<double>{}, a), DomainError);
}

TEST_CASE("ks_two_sample calibration over 100 seeds") {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    ok += ks_two_sample(normals(2 * seed + 1000, 10000), normals(2 * seed + 1001, 10000)).p > 0.01;
  CHECK(ok >= 98);
  // A one-tenth SD shift is visible at this size.
  CHECK(ks_two_sample(normals(1, 10000), normals(2, 10000, 0.1)).p < 1e-4);
}

TEST_CASE("matrix_compare examples") {
  Eigen::MatrixXd a(3, 3), se = Eigen::MatrixXd::Constant(3, 3, 0.1);
  a << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  CHECK(matrix_compare(a, a, se).pass);
  Eigen::MatrixXd off = a;
  off(1, 2) += 3 * 4.0 * 0.1;
  const auto r = matrix_compare(off, a, se);
  CHECK_FALSE(r.pass);
  CHECK(r.z == doctest::Approx(12.0));
  // One of 400 entries at 5 se: inside the 95% allowance and under the 2k cap.
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(20, 20), bse = Eigen::MatrixXd::Ones(20, 20);
  Eigen::MatrixXd near = big;
  near(3, 3) = 5.0;
  CHECK(matrix_compare(near, big, bse).pass);
  CHECK_THROWS_AS(matrix_compare(a, Eigen::MatrixXd::Zero(2, 3), se), DomainError);
}

TEST_CASE("Moments matches the two-pass estimators and merges associatively") {
  const auto x = normals(9, 1001);
  Moments all;
  for (double v : x) all.add(v);
  const auto ms = mean_se(x);
  CHECK(all.mean == doctest::Approx(ms.mean).epsilon(1e-12));
  CHECK(std::sqrt(all.variance() / 1001.0) == doctest::Approx(ms.se).epsilon(1e-12));
  Moments a, b, c;
  for (std::size_t i = 0; i < x.size(); ++i) (i < 300 ? a : i < 700 ? b : c).add(x[i]);
  Moments left = a, right = b;
  left.merge(b).merge(c);
  right.merge(c);
  Moments r2 = a;
  r2.merge(right);
  CHECK(left.count == 1001);
  CHECK(left.mean == doctest::Approx(r2.mean).epsilon(1e-13));
  CHECK(left.m2 == doctest::Approx(r2.m2).epsilon(1e-13));
  CHECK(left.m2 == doctest::Approx(all.m2).epsilon(1e-12));
  Moments empty;
  Moments copy = a;
  CHECK(copy.merge(empty).m2 == a.m2);
}
