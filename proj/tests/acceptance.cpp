// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
// Optional arguments pick criteria by number, e.g. `acceptance 1 2 3`.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "cogecon/agent.hpp"
#include "cogecon/harness.hpp"
#include "cogecon/task_analysis.hpp"
#include "support/oracles.hpp"
#include "support/properties.hpp"

using namespace cogecon;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

const ViabilityGrid& fine_grid() {
  static const ViabilityGrid g = viability_map(PuckEnv{});
  return g;
}

std::string steps_text(std::optional<std::uint64_t> s) { return s ? std::to_string(*s) : "never"; }

Verdict equilibrium() {
  const double x = equilibrium_x(EnvParams{});
  std::ostringstream os;
  os << "equilibrium_x " << x;
  return {x >= 0.530 && x <= 0.542, os.str()};
}

Verdict viability_band() {
  const auto& g = fine_grid();
  int bad = 0;
  for (int i = 0; i <= 240; ++i)
    for (double sign : {1.0, -1.0}) {
      const double x = sign * i / 100.0;
      if (i <= 52 && g.at(State{x, 0}) != Viability::Controllable) ++bad;
      if (i >= 56 && g.at(State{x, 0}) != Viability::Doomed) ++bad;
    }
  std::size_t asym = 0;
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(g.size()); ++c) asym += g.at(c) != g.at(g.mirror(c));
  std::ostringstream os;
  os << "stationary misclassified " << bad << ", asymmetric cells " << asym << ", controllable "
     << g.count(Viability::Controllable) << " of " << g.size();
  return {bad == 0 && asym == 0, os.str()};
}

Verdict benchmark_adequacy() {
  const auto r = validate_representation(fine_grid(), diagonal_split());
  std::ostringstream os;
  os << "violations " << r.violations << " (" << r.must_push_left << " must-push-left, " << r.must_push_right
     << " must-push-right cells)";
  return {r.violations == 0, os.str()};
}

Verdict diagonal_learning() {
  const TestConfig tc;
  const auto avg = average_curves(test_runs(diagonal_split(), PuckEnv{}, tc));
  const auto reach = steps_to_reach(avg, static_cast<double>(tc.trial_cap));
  return {reach && *reach <= 80000, "cap reached at " + steps_text(reach) + " train steps"};
}

Verdict generation_from_scratch() {
  const AgentConfig cfg;
  const auto res = run_generation_session(PuckEnv{}, cfg, StopRule{});
  const TestConfig tc;
  const auto avg = average_curves(test_runs(res.representation, PuckEnv{}, tc));
  const auto reach = steps_to_reach(avg, static_cast<double>(tc.trial_cap));
  const std::size_t n = res.representation.region_count();
  std::ostringstream os;
  os << "regions " << n << ", generation steps " << res.total_steps << (res.succeeded ? "" : " (no success)")
     << ", cap reached at " << steps_text(reach);
  return {reach && *reach <= 80000 && n >= 4 && n <= 60, os.str()};
}

Verdict seeded_generation() {
  const auto res = run_generation_session(PuckEnv{}, AgentConfig{}, StopRule{}, Bounds{}, seed_representation());
  const std::size_t added = res.representation.prototypes().size() - 2;
  std::ostringstream os;
  os << "added " << added << " prototypes, regions " << res.representation.region_count();
  return {added <= 6, os.str()};
}

Verdict ordering() {
  TestConfig tc;
  tc.max_train_steps = 200000;
  const auto diag = average_curves(test_runs(diagonal_split(), PuckEnv{}, tc));
  const auto grid = average_curves(test_runs(uniform_grid(), PuckEnv{}, tc));
  std::set<std::uint64_t> axis;
  for (const auto& p : diag) axis.insert(p.train_steps);
  for (const auto& p : grid) axis.insert(p.train_steps);
  int checked = 0, below = 0;
  for (std::uint64_t t : axis) {
    if (t < 20000) continue;
    const auto d = score_at(diag, t), g = score_at(grid, t);
    if (!d || !g) continue;
    ++checked;
    below += *d < *g;
  }
  double grid_best = 0;
  for (const auto& p : grid) grid_best = std::max(grid_best, p.mean_score);
  std::ostringstream os;
  os << checked << " points >= 20000 checked, diagonal below grid at " << below << "; grid best " << grid_best;
  return {checked > 0 && below == 0 && grid_best >= 0.5 * static_cast<double>(tc.trial_cap), os.str()};
}

Verdict chain_oracle() {
  int pairs = 0, agree = 0;
  for (double eps : {0.05, 0.2, 0.5})
    for (double f : {0.0, 0.4, 1.0}) {
      const auto t = oracle::chain_compatibility_agreement(eps, f * eps);
      pairs += t.pairs;
      agree += t.agree;
    }
  return {pairs > 0 && agree == pairs, std::to_string(agree) + " of " + std::to_string(pairs) + " verdicts agree"};
}

Verdict fixed_point() {
  const auto r = oracle::four_state_fixed_point(10000);
  std::ostringstream os;
  os << "max |Q - Q*| " << r.max_error << " after " << r.backups << " backups";
  return {r.max_error <= 1e-6, os.str()};
}

Verdict properties() {
  const std::pair<const char*, std::function<std::string()>> suites[] = {
      {"stack", [] { return props::stack_uniqueness(); }},
      {"pref", [] { return props::pref_monotone_and_shift_invariant(); }},
      {"merge/detach", [] { return props::merge_detach_round_trip(); }},
      {"mirror", [] { return props::env_mirror_symmetry(); }},
      {"reruns", [] { return props::bit_identical_reruns(); }},
  };
  std::string failures;
  for (const auto& [nm, fn] : suites) {
    const std::string r = fn();
    if (!r.empty()) failures += std::string(failures.empty() ? "" : "; ") + nm + ": " + r;
  }
  return {failures.empty(), failures.empty() ? "all 5 suites pass" : failures};
}

}  // namespace

int main(int argc, char** argv) {
  const std::function<Verdict()> criteria[] = {equilibrium,       viability_band,    benchmark_adequacy, diagonal_learning,
                                               generation_from_scratch, seeded_generation, ordering,
                                               chain_oracle,      fixed_point,       properties};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  int failed = 0;
  for (int n = 1; n <= 10; ++n) {
    if (!only.empty() && !only.count(n)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[n - 1]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.pass;
    std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail << " [" << std::fixed
              << std::setprecision(1) << secs << "s]" << std::defaultfloat << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
