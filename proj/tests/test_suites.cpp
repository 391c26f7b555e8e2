#include <doctest.h>
#include <omp.h>

#include <filesystem>
#include <fstream>

#include "shelab/errors.hpp"
#include "shelab/suites.hpp"

using namespace shelab;

namespace {
bool throws_with(const RunConfig& cfg, const std::string& suite, const std::string& needle) {
  try {
    validate(cfg, suite);
  } catch (const ConfigError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}
}  // namespace

TEST_CASE("apply_setting parses every key") {
  RunConfig c;
  apply_setting(c, "tmax", "6.5");
  apply_setting(c, "n", "1024");
  apply_setting(c, "dz", "0.002");
  apply_setting(c, "Z", "0.5");
  apply_setting(c, "nu", "1, 2,3.5");
  apply_setting(c, "replicas.cov", "300");
  apply_setting(c, "seed", "0xffffffffffffffff");
  apply_setting(c, "tail_tol", "1e-6");
  apply_setting(c, "out", " /tmp/x ");
  apply_setting(c, "workers", "3");
  CHECK(c.t_max == 6.5);
  CHECK(c.n == 1024);
  CHECK(c.dz == 0.002);
  CHECK(c.Z == 0.5);
  CHECK(c.nu == std::vector<double>{1.0, 2.0, 3.5});
  CHECK(effective_replicas(c, "cov") == 300);
  CHECK(effective_replicas(c, "drift") == 20000);
  CHECK(c.seed == 0xffffffffffffffffULL);
  CHECK(c.out == "/tmp/x");
  CHECK(c.workers == 3);
  apply_setting(c, "replicas", "50");
  CHECK(effective_replicas(c, "cov") == 50);
  CHECK(effective_replicas(c, "ops") == 0);
  CHECK_THROWS_AS(apply_setting(c, "n", "12abc"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "seed", "-1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "colour", "red"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "replicas.ops", "5"), ConfigError);
}

TEST_CASE("config file with comments; later flags override") {
  const auto path = std::filesystem::temp_directory_path() / "shelab_test.cfg";
  {
    std::ofstream out(path);
    out << "# comment\n\nn = 512   # trailing\nseed=7\n";
  }
  RunConfig c;
  load_config_file(c, path.string());
  CHECK(c.n == 512);
  CHECK(c.seed == 7);
  apply_setting(c, "seed", "9");
  CHECK(c.seed == 9);
  {
    std::ofstream out(path);
    out << "n 512\n";
  }
  CHECK_THROWS_AS(load_config_file(c, path.string()), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config_file(c, path.string()), ConfigError);
}

TEST_CASE("validate rejects unusable configurations") {
  RunConfig c;
  for (const auto& s : suite_names()) CHECK_NOTHROW(validate(c, s));
  c.n = 4095;
  CHECK(throws_with(c, "ops", "n must be a power of two"));
  c.n = 0;
  c.nu = {1.0, -1.0};
  CHECK(throws_with(c, "drift", "nu must be positive"));
  c.nu = {1.0};
  c.replicas = 1;
  CHECK(throws_with(c, "cov", "replicas"));
  CHECK_NOTHROW(validate(c, "ops"));
  c.replicas = 0;
  c.n = 64;
  c.dz = 1.0;
  CHECK(throws_with(c, "evolve", "stability rule"));
  c.dz = 0.0;
  c.Z = 0.0;
  CHECK(throws_with(c, "evolve", "Z must be positive"));
  CHECK(throws_with(RunConfig{}, "nope", "unknown suite"));
  CHECK_THROWS_AS(run_suite("nope", RunConfig{}), ConfigError);
}

TEST_CASE("ops suite at a small grid; document layout; outputs") {
  RunConfig c;
  c.n = 1024;
  const auto r = run_ops(c);
  CHECK(r.suite == "ops");
  CHECK(r.reports.size() > 10);
  for (const auto& rep : r.reports) CHECK(recompute_pass(rep) == rep.pass);
  const auto doc = suite_document(r, "");
  CHECK_FALSE(doc.contains("timestamp"));
  std::vector<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"suite", "config", "pass", "reports"});
  CHECK(suite_document(r, "2026-01-01T00:00:00Z")["timestamp"] == "2026-01-01T00:00:00Z");
  CHECK(doc["config"]["n"] == 1024);
  const auto dir = std::filesystem::temp_directory_path() / "shelab_suite_out";
  std::filesystem::remove_all(dir);
  const auto paths = write_outputs(r, dir.string());
  REQUIRE(paths.size() == 1);
  std::ifstream in(paths[0]);
  const auto back = nlohmann::ordered_json::parse(in);
  CHECK(back["reports"] == doc["reports"]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("worker count leaves evolve results unchanged") {
  RunConfig c;
  c.n = 64;
  c.replicas = 40;
  c.Z = 0.1;
  omp_set_num_threads(1);
  const auto a = run_evolve(c);
  omp_set_num_threads(3);
  const auto b = run_evolve(c);
  omp_set_num_threads(omp_get_num_procs());
  CHECK(suite_document(a, "").dump() == suite_document(b, "").dump());
  CHECK(a.csv == b.csv);
  REQUIRE(a.dump.has_value());
  CHECK(a.dump->values == b.dump->values);
  CHECK(a.csv.rfind("z,u_h0,v_h0,u_h1,v_h1\n", 0) == 0);
}
