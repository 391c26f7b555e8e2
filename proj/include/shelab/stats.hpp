#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "shelab/report.hpp"

namespace shelab {

struct MeanSe {
  double mean;
  double se;
};

/// Sample mean and standard error with the unbiased variance. Requires n >= 2.
MeanSe mean_se(std::span<const double> samples);

/// Sample variance with the standard error of the variance estimator, computed
/// from the fourth central moment: se^2 = (m4 - s^4 (n-3)/(n-1)) / n.
MeanSe variance_se(std::span<const double> samples);

/// Sample covariance of paired samples and its standard error, from the
/// spread of the centred products.
MeanSe covariance_se(std::span<const double> a, std::span<const double> b);

/// pass iff |estimate - target| <= k se; se = 0 gives z = inf unless exact.
VerificationReport z_test(double estimate, double se, double target, double k = 4.0);

struct KsResult {
  double statistic;
  double p;
};

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value
/// evaluated at the effective size nm/(n+m).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// pass iff >= 95% of entries satisfy |emp - analytic| <= k se and none exceeds 2k se.
VerificationReport matrix_compare(const Eigen::MatrixXd& emp, const Eigen::MatrixXd& analytic,
                                  const Eigen::MatrixXd& se, double k = 4.0);

/// Welford accumulator with an associative merge.
struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  Moments& merge(const Moments& other);
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

}  // namespace shelab
