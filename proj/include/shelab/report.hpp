#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace shelab {

/// How a report's pass flag follows from its numbers.
///  ZTest:   |estimate - target| <= tolerance * se        (tolerance is k)
///  Bound:   |estimate - target| <= tolerance
///  AtLeast: estimate >= tolerance
///  Matrix:  estimate (fraction of entries within k se) >= 0.95 and z (max |z|) <= 2k
enum class Rule { ZTest, Bound, AtLeast, Matrix };

struct VerificationReport {
  std::string name;
  std::string statistic;
  double estimate = 0.0;
  double se = 0.0;
  double target = 0.0;
  double z = 0.0;
  Rule rule = Rule::ZTest;
  double tolerance = 4.0;
  bool pass = false;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  nlohmann::ordered_json grid = nlohmann::ordered_json::object();
  nlohmann::ordered_json detail = nlohmann::ordered_json::object();
};

/// Re-evaluates the rule from the stored numbers.
bool recompute_pass(const VerificationReport& r);

/// Report with rule Bound; z is the error in units of the tolerance.
VerificationReport bound_report(std::string name, std::string statistic, double estimate, double target,
                                double tolerance);
/// Report with rule AtLeast.
VerificationReport at_least_report(std::string name, std::string statistic, double estimate, double minimum);

std::string rule_name(Rule r);
nlohmann::ordered_json to_json(const VerificationReport& r);
VerificationReport report_from_json(const nlohmann::ordered_json& j);
bool all_pass(const std::vector<VerificationReport>& reports);

}  // namespace shelab
