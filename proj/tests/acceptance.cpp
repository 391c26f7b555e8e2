// Acceptance run: one PASS/FAIL line per criterion, all suites at their defaults.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "shelab/gaussfield.hpp"
#include "shelab/suites.hpp"

using namespace shelab;

namespace {

struct Timed {
  SuiteResult result;
  double seconds;
};

Timed timed_run(const std::string& suite, const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  auto r = run_suite(suite, cfg);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  std::printf("  [%s suite: %zu reports, %.1f s]\n", suite.c_str(), r.reports.size(), dt.count());
  std::fflush(stdout);
  return {std::move(r), dt.count()};
}

// Reports whose names start with any of the prefixes; missing prefixes count as failures.
struct Selection {
  std::vector<const VerificationReport*> reports;
  std::vector<std::string> missing;
  bool pass() const {
    if (!missing.empty() || reports.empty()) return false;
    for (const auto* r : reports)
      if (!r->pass) return false;
    return true;
  }
};

Selection select(const SuiteResult& res, const std::vector<std::string>& prefixes) {
  Selection s;
  for (const auto& p : prefixes) {
    bool found = false;
    for (const auto& r : res.reports)
      if (r.name.rfind(p, 0) == 0) {
        s.reports.push_back(&r);
        found = true;
      }
    if (!found) s.missing.push_back(p);
  }
  return s;
}

std::string summary(const Selection& s) {
  std::string out;
  char buf[160];
  for (const auto* r : s.reports) {
    std::snprintf(buf, sizeof buf, "%s%s=%.4g(%s)", out.empty() ? "" : "; ", r->name.c_str(), r->estimate,
                  r->pass ? "ok" : "FAIL");
    out += buf;
  }
  for (const auto& m : s.missing) out += "; missing " + m;
  return out;
}

int failures = 0;

void criterion(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("%s criterion %2d: %s | %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

}  // namespace

int main() {
  const RunConfig defaults;
  std::map<std::string, Timed> runs;
  for (const auto& s : suite_names()) runs.emplace(s, timed_run(s, defaults));
  const auto& ops = runs.at("ops");
  const auto& cov = runs.at("cov");
  const auto& drift = runs.at("drift").result;
  const auto& spde = runs.at("spde").result;
  const auto& evolve = runs.at("evolve").result;

  {
    const auto s = select(ops.result, {"A2_quarter_laplacian"});
    char t[64];
    std::snprintf(t, sizeof t, "; ops suite %.1f s", ops.seconds);
    criterion(1, "A2 h = sqrt(2) (-d^2)^{1/4} h^a, refinement >= 1.8, < 10 s", s.pass() && ops.seconds < 10.0,
              summary(s) + t);
  }
  {
    const auto s = select(ops.result, {"halfroot_inversion"});
    criterion(2, "half-root inversion of A2 h", s.pass(), summary(s));
  }
  {
    const auto s = select(ops.result, {"A1A2_identity"});
    criterion(3, "A1 A2 h = -h' + (-d^2)^{1/2} h^a with refinement", s.pass(), summary(s));
  }
  {
    const auto s = select(ops.result, {"A1_eigen_nu1.0", "A1_eigen_nu4.0"});
    criterion(4, "A1 e^{-nu .} = sqrt(nu) e^{-nu .}, nu in {1, 4}", s.pass(), summary(s));
  }
  {
    const auto s = select(cov.result, {"greenrep_mean_x0_t1", "greenrep_variance_x0_t1", "gram_u_8x8", "gram_v_8x8"});
    bool target_ok = false;
    for (const auto* r : s.reports)
      if (r->name == "greenrep_variance_x0_t1")
        target_ok = std::abs(r->target - std::sqrt(2.0) / std::sqrt(4.0 * std::numbers::pi)) <= 1e-14;
    char t[96];
    std::snprintf(t, sizeof t, "; target sqrt(2)/sqrt(4 pi) %s; cov suite %.1f s", target_ok ? "ok" : "WRONG",
                  cov.seconds);
    criterion(5, "covariance of U: variance at (0, 1) and 8x8 Grams, < 2 min",
              s.pass() && target_ok && cov.seconds < 120.0, summary(s) + t);
  }
  {
    const auto s = select(cov.result, {"independence_u_v_8x8"});
    criterion(6, "independence of U and dU/dx", s.pass(), summary(s));
  }
  {
    const auto s = select(drift, {"drift_pathwise"});
    criterion(7, "drift field form vs integral form, rel RMS <= 5e-2, refining", s.pass(), summary(s));
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (const auto& [nu, nu2] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {2.0, 1.0}, {2.0, 2.0}}) {
      const auto r = verify_cameron_martin_laplace(nu, nu2, 0.0);
      ok = ok && r.pass && r.tolerance <= 1e-4;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s(%g,%g)=%.2e", detail.empty() ? "" : "; ", nu, nu2, r.estimate);
      detail += buf;
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    const auto s = select(drift, {"cameron_martin"});
    char t[48];
    std::snprintf(t, sizeof t, "; %.2f s", dt.count());
    criterion(8, "Cameron-Martin Laplace identity, rel err <= 1e-4, < 5 s", ok && s.pass() && dt.count() < 5.0,
              detail + t);
  }
  {
    const auto s = select(spde, {"weakform_mean_f1", "weakform_variance_f1", "weakform_mean_f2", "weakform_variance_f2"});
    criterion(9, "weak-form residual is white noise on two tensor bumps", s.pass(), summary(s));
  }
  {
    const auto s = select(evolve, {"stationary_mean_", "stationary_variance_"});
    criterion(10, "stationarity of (u, v) under the spatial SDE after Z = 1", s.pass(), summary(s));
  }
  {
    const auto s = select(ops.result, {"l_nu_at_zero", "l_nu_decay_nu", "l_nu_laplace"});
    bool exact_zero = false;
    for (const auto* r : s.reports)
      if (r->name == "l_nu_at_zero") exact_zero = r->estimate == 0.0;
    criterion(11, "l_nu(0) = 0, t^{3/2} l_nu bounded, Laplace value 0.25", s.pass() && exact_zero, summary(s));
  }
  {
    // Smaller replica counts keep the double run short; grids stay at their defaults.
    RunConfig small;
    small.suite_replicas = {{"cov", 400}, {"drift", 400}, {"spde", 400}, {"evolve", 100}};
    bool ok = true;
    std::string detail;
    for (const auto& suite : suite_names()) {
      const auto a = run_suite(suite, small);
      const auto b = run_suite(suite, small);
      const bool same = suite_document(a, "").dump(2) == suite_document(b, "").dump(2) && a.csv == b.csv &&
                        a.dump.has_value() == b.dump.has_value() && (!a.dump || a.dump->values == b.dump->values);
      ok = ok && same;
      detail += (detail.empty() ? "" : "; ") + suite + (same ? " identical" : " DIFFERS");
    }
    criterion(12, "reruns give identical verdicts and report bytes", ok, detail);
  }

  for (const auto& [name, t] : runs)
    std::printf("  suite %-6s overall %s\n", name.c_str(), t.result.pass() ? "PASS" : "FAIL");
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
