#include "shelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shelab/errors.hpp"

namespace shelab {

MeanSe mean_se(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw DomainError("mean_se: need at least two samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

MeanSe variance_se(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 4) throw DomainError("variance_se: need at least four samples");
  const double dn = static_cast<double>(n);
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= dn;
  double m2 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d2 = (x - mean) * (x - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double s2 = m2 / (dn - 1.0);
  m4 /= dn;
  const double var_of_s2 = std::max(0.0, (m4 - s2 * s2 * (dn - 3.0) / (dn - 1.0)) / dn);
  return {s2, std::sqrt(var_of_s2)};
}

MeanSe covariance_se(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n != b.size()) throw DomainError("covariance_se: length mismatch");
  if (n < 3) throw DomainError("covariance_se: need at least three samples");
  const double dn = static_cast<double>(n);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= dn;
  mb /= dn;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
  const double cov = s / (dn - 1.0);
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (a[i] - ma) * (b[i] - mb) - cov;
    q += d * d;
  }
  return {cov, std::sqrt(q / (dn - 1.0) / dn)};
}

VerificationReport z_test(double estimate, double se, double target, double k) {
  VerificationReport r;
  r.estimate = estimate;
  r.se = se;
  r.target = target;
  r.tolerance = k;
  r.rule = Rule::ZTest;
  if (se > 0.0) {
    r.z = (estimate - target) / se;
  } else {
    r.z = estimate == target ? 0.0 : std::numeric_limits<double>::infinity();
  }
  r.pass = recompute_pass(r);
  return r;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: both samples must be nonempty");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = nx * ny / (nx + ny);
  return {d, kolmogorov_q(std::sqrt(ne) * d)};
}

VerificationReport matrix_compare(const Eigen::MatrixXd& emp, const Eigen::MatrixXd& analytic,
                                  const Eigen::MatrixXd& se, double k) {
  if (emp.rows() != analytic.rows() || emp.cols() != analytic.cols() || emp.rows() != se.rows() ||
      emp.cols() != se.cols())
    throw DomainError("matrix_compare: shape mismatch");
  const auto total = emp.size();
  if (total == 0) throw DomainError("matrix_compare: empty matrices");
  Eigen::Index within = 0;
  double max_z = 0.0;
  for (Eigen::Index i = 0; i < emp.rows(); ++i) {
    for (Eigen::Index j = 0; j < emp.cols(); ++j) {
      const double diff = std::abs(emp(i, j) - analytic(i, j));
      double z;
      if (se(i, j) > 0.0) {
        z = diff / se(i, j);
      } else {
        z = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      if (z <= k) ++within;
      max_z = std::max(max_z, z);
    }
  }
  VerificationReport r;
  r.rule = Rule::Matrix;
  r.tolerance = k;
  r.estimate = static_cast<double>(within) / static_cast<double>(total);
  r.target = 0.95;
  r.z = max_z;
  r.pass = recompute_pass(r);
  r.detail = {{"entries", total}, {"within", within}};
  return r;
}

void Moments::add(double x) {
  ++count;
  const double d = x - mean;
  mean += d / static_cast<double>(count);
  m2 += d * (x - mean);
}

Moments& Moments::merge(const Moments& o) {
  if (o.count == 0) return *this;
  if (count == 0) {
    *this = o;
    return *this;
  }
  const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
  const double d = o.mean - mean;
  const double n = na + nb;
  mean += d * nb / n;
  m2 += o.m2 + d * d * na * nb / n;
  count += o.count;
  return *this;
}

}  // namespace shelab
