// shelab: verification runs for the stochastic heat equation toolkit.
//
// Exit codes: 0 all reports pass, 1 some report fails, 2 configuration error.

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "shelab/errors.hpp"
#include "shelab/suites.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> seed, tmax, n, dz, Z, replicas, workers, out, nu;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "flat key=value configuration file");
  sub->add_option("--seed", f.seed, "master seed (u64)");
  sub->add_option("--tmax", f.tmax, "time horizon t_max");
  sub->add_option("--n", f.n, "grid size (power of two)");
  sub->add_option("--dz", f.dz, "spatial step of the SDE (0: stability limit)");
  sub->add_option("--Z", f.Z, "spatial horizon of the SDE");
  sub->add_option("--nu", f.nu, "comma-separated exponential rates");
  sub->add_option("--replicas", f.replicas, "Monte Carlo replicas for this suite");
  sub->add_option("--workers", f.workers, "OpenMP threads (0: runtime default)");
  sub->add_option("--out", f.out, "output directory");
}

shelab::RunConfig build_config(const Flags& f) {
  shelab::RunConfig cfg;
  if (!f.config.empty()) shelab::load_config_file(cfg, f.config);
  const std::pair<const char*, const std::optional<std::string>*> flags[] = {
      {"seed", &f.seed}, {"tmax", &f.tmax}, {"n", &f.n}, {"dz", &f.dz}, {"Z", &f.Z},
      {"replicas", &f.replicas}, {"workers", &f.workers}, {"out", &f.out}, {"nu", &f.nu}};
  for (const auto& [key, value] : flags)
    if (*value) shelab::apply_setting(cfg, key, **value);
  return cfg;
}

int run(const std::string& suite, const Flags& f) {
  shelab::RunConfig cfg;
  shelab::SuiteResult res;
  try {
    cfg = build_config(f);
    shelab::validate(cfg, suite);
    if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
    res = shelab::run_suite(suite, cfg);
  } catch (const shelab::ConfigError& e) {
    std::cerr << "shelab " << suite << ": configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "shelab " << suite << ": configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "shelab " << suite << ": " << e.what() << '\n';
    return 2;
  }
  for (const auto& r : res.reports)
    std::printf("%-4s %-40s est=% .6g target=% .6g z=% .3g\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.estimate,
                r.target, r.z);
  try {
    for (const auto& p : shelab::write_outputs(res, cfg.out)) std::printf("wrote %s\n", p.c_str());
  } catch (const std::exception& e) {
    std::cerr << "shelab " << suite << ": " << e.what() << '\n';
    return 2;
  }
  return res.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification runs for the stochastic heat equation on the half plane"};
  app.require_subcommand(1);
  const std::pair<const char*, const char*> commands[] = {{"verify-ops", "ops"},
                                                          {"verify-cov", "cov"},
                                                          {"verify-drift", "drift"},
                                                          {"verify-spde", "spde"},
                                                          {"evolve", "evolve"}};
  Flags flags;
  std::string chosen;
  for (const auto& [cmd, suite] : commands) {
    auto* sub = app.add_subcommand(cmd, std::string("run the ") + suite + " suite");
    add_flags(sub, flags);
    sub->callback([&chosen, s = std::string(suite)] { chosen = s; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return run(chosen, flags);
}
