#include "shelab/report.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace shelab {

bool recompute_pass(const VerificationReport& r) {
  switch (r.rule) {
    case Rule::ZTest:
      if (r.se > 0.0) return std::abs(r.estimate - r.target) <= r.tolerance * r.se;
      return r.estimate == r.target;
    case Rule::Bound:
      return std::abs(r.estimate - r.target) <= r.tolerance;
    case Rule::AtLeast:
      return r.estimate >= r.tolerance;
    case Rule::Matrix:
      return r.estimate >= 0.95 && r.z <= 2.0 * r.tolerance;
  }
  return false;
}

VerificationReport bound_report(std::string name, std::string statistic, double estimate, double target,
                                double tolerance) {
  VerificationReport r;
  r.name = std::move(name);
  r.statistic = std::move(statistic);
  r.estimate = estimate;
  r.target = target;
  r.rule = Rule::Bound;
  r.tolerance = tolerance;
  const double err = std::abs(estimate - target);
  if (tolerance > 0.0)
    r.z = err / tolerance;
  else
    r.z = err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  r.pass = recompute_pass(r);
  return r;
}

VerificationReport at_least_report(std::string name, std::string statistic, double estimate, double minimum) {
  VerificationReport r;
  r.name = std::move(name);
  r.statistic = std::move(statistic);
  r.estimate = estimate;
  r.target = minimum;
  r.rule = Rule::AtLeast;
  r.tolerance = minimum;
  r.z = minimum != 0.0 ? estimate / minimum : 0.0;
  r.pass = recompute_pass(r);
  return r;
}

std::string rule_name(Rule r) {
  switch (r) {
    case Rule::ZTest: return "ztest";
    case Rule::Bound: return "bound";
    case Rule::AtLeast: return "at_least";
    case Rule::Matrix: return "matrix";
  }
  return "unknown";
}

namespace {
Rule rule_from_name(const std::string& s) {
  if (s == "ztest") return Rule::ZTest;
  if (s == "bound") return Rule::Bound;
  if (s == "at_least") return Rule::AtLeast;
  if (s == "matrix") return Rule::Matrix;
  throw std::invalid_argument("unknown rule " + s);
}

// JSON has no inf/nan; they are stored as strings so the record stays recomputable.
nlohmann::ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double from_num(const nlohmann::ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return s == "inf" ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}
}  // namespace

nlohmann::ordered_json to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["statistic"] = r.statistic;
  j["estimate"] = num(r.estimate);
  j["se"] = num(r.se);
  j["target"] = num(r.target);
  j["z"] = num(r.z);
  j["rule"] = rule_name(r.rule);
  j["tolerance"] = num(r.tolerance);
  j["pass"] = r.pass;
  j["replicas"] = r.replicas;
  j["seed"] = r.seed;
  j["grid"] = r.grid;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

VerificationReport report_from_json(const nlohmann::ordered_json& j) {
  VerificationReport r;
  r.name = j.at("name").get<std::string>();
  r.statistic = j.at("statistic").get<std::string>();
  r.estimate = from_num(j.at("estimate"));
  r.se = from_num(j.at("se"));
  r.target = from_num(j.at("target"));
  r.z = from_num(j.at("z"));
  r.rule = rule_from_name(j.at("rule").get<std::string>());
  r.tolerance = from_num(j.at("tolerance"));
  r.pass = j.at("pass").get<bool>();
  r.replicas = j.at("replicas").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.grid = j.at("grid");
  if (j.contains("detail")) r.detail = j.at("detail");
  return r;
}

bool all_pass(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

}  // namespace shelab
