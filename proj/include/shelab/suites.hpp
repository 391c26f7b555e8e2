#pragma once

#include <cstddef>
#include <cstdint>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shelab/report.hpp"

namespace shelab {

/// Settings shared by all verification suites. Zero for n, dz or a replica
/// count selects the suite default.
struct RunConfig {
  double t_max = 8.0;
  std::size_t n = 0;
  double dz = 0.0;
  double Z = 1.0;
  std::vector<double> nu = {1.0, 4.0};
  std::size_t replicas = 0;                       // overrides the running suite's count
  std::map<std::string, std::size_t> suite_replicas;  // "cov", "drift", "spde", "evolve"
  std::uint64_t seed = 20240611;
  double tail_tol = 1e-8;
  std::string out = ".";
  int workers = 0;
};

/// Applies one key=value setting; throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
/// Flat key=value file; '#' starts a comment, blank lines are ignored.
void load_config_file(RunConfig& cfg, const std::string& path);

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"ops", "cov", "drift", "spde", "evolve"};
  return names;
}

std::size_t default_n(const std::string& suite);
std::size_t default_replicas(const std::string& suite);
std::size_t effective_replicas(const RunConfig& cfg, const std::string& suite);

/// Throws ConfigError if cfg is unusable for the suite.
void validate(const RunConfig& cfg, const std::string& suite);

struct MatrixDump {
  double dy, ds, y_min, y_max, s_max;
  std::uint64_t seed, stream;
  std::vector<double> values;
};

struct SuiteResult {
  std::string suite;
  nlohmann::ordered_json config;
  std::vector<VerificationReport> reports;
  std::string csv;                 // evolve: replica 0 trajectory
  std::optional<MatrixDump> dump;  // evolve: final state of replica 0
  bool pass() const { return all_pass(reports); }
};

SuiteResult run_ops(const RunConfig& cfg);
SuiteResult run_cov(const RunConfig& cfg);
SuiteResult run_drift(const RunConfig& cfg);
SuiteResult run_spde(const RunConfig& cfg);
SuiteResult run_evolve(const RunConfig& cfg);
SuiteResult run_suite(const std::string& suite, const RunConfig& cfg);

/// {"suite", "timestamp", "config", "pass", "reports"}; the timestamp is
/// omitted when `timestamp` is empty.
nlohmann::ordered_json suite_document(const SuiteResult& r, const std::string& timestamp);
std::string utc_timestamp();

/// Writes <out>/<suite>_report.json, plus the evolve CSV and dump. Returns the paths written.
std::vector<std::string> write_outputs(const SuiteResult& r, const std::string& out_dir);

}  // namespace shelab
