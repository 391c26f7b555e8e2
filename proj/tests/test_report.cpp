#include <doctest.h>

#include <cmath>
#include <limits>

#include "shelab/report.hpp"
#include "shelab/stats.hpp"

using namespace shelab;

TEST_CASE("report JSON round trip keeps every field") {
  auto r = z_test(1.2, 0.1, 1.0);
  r.name = "x";
  r.statistic = "mean";
  r.replicas = 123;
  r.seed = 0xffffffffffffffffULL;
  r.grid = {{"n", 64}};
  const auto j = to_json(r);
  const auto back = report_from_json(j);
  CHECK(back.name == "x");
  CHECK(back.estimate == r.estimate);
  CHECK(back.se == r.se);
  CHECK(back.z == r.z);
  CHECK(back.seed == r.seed);
  CHECK(back.replicas == 123);
  CHECK(back.grid == r.grid);
  CHECK(back.rule == Rule::ZTest);
  CHECK(to_json(back) == j);
}

TEST_CASE("non-finite numbers serialise as strings") {
  const auto r = z_test(2.0, 0.0, 1.0);
  const auto j = to_json(r);
  CHECK(j["z"] == "inf");
  CHECK(std::isinf(report_from_json(j).z));
  CHECK(j.dump().find("null") == std::string::npos);
}

TEST_CASE("pass is recomputable for each rule") {
  const std::vector<VerificationReport> rs{
      z_test(1.39, 0.1, 1.0), z_test(1.5, 0.1, 1.0), bound_report("b", "s", 1.0, 1.005, 1e-2),
      bound_report("b", "s", 1.0, 1.5, 1e-2), bound_report("b", "s", 0.0, 0.0, 0.0),
      at_least_report("a", "s", 2.0, 1.8), at_least_report("a", "s", 1.0, 1.8),
      matrix_compare(Eigen::MatrixXd::Ones(2, 2), Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Ones(2, 2))};
  for (const auto& r : rs) {
    CHECK(recompute_pass(r) == r.pass);
    CHECK(recompute_pass(report_from_json(to_json(r))) == r.pass);
  }
  CHECK(bound_report("b", "s", 0.0, 0.0, 0.0).z == 0.0);
  CHECK(std::isinf(bound_report("b", "s", 1.0, 0.0, 0.0).z));
  CHECK_FALSE(all_pass(rs));
  CHECK(all_pass({rs[0], rs[2]}));
}
