#pragma once

// Randomized property checks. Each returns an empty string on success and a
// description of the first counterexample otherwise.

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cogecon/action_values.hpp"
#include "cogecon/agent.hpp"
#include "cogecon/harness.hpp"
#include "cogecon/partition.hpp"
#include "cogecon/puck.hpp"
#include "cogecon/random.hpp"

namespace props {

using namespace cogecon;

inline std::string describe(const State& s) {
  std::ostringstream os;
  os.precision(17);
  os << '(' << s.x << ", " << s.v << ')';
  return os.str();
}

// Random pushes and pops; after every operation each region appears at most
// once, and the stack agrees with a naive model.
inline std::string stack_uniqueness(int ops = 10000, std::uint64_t seed = 11) {
  Rng rng(seed);
  ReplacingStack st;
  std::vector<ReplacingStack::Entry> model;
  std::uniform_int_distribution<int> region(0, 15), op(0, 3);
  for (int i = 0; i < ops; ++i) {
    if (op(rng) == 0 && !model.empty()) {
      const auto got = st.pop();
      if (!(got == model.back())) return "pop order differs from model at op " + std::to_string(i);
      model.pop_back();
    } else {
      const RegionId j{region(rng)};
      const State s{uniform01(rng), uniform01(rng)};
      st.push(s, j);
      std::vector<ReplacingStack::Entry> next;
      for (const auto& e : model)
        if (e.region != j) next.push_back(e);
      next.push_back({s, j});
      model = next;
    }
    std::map<std::int64_t, int> seen;
    for (const auto& e : st.entries())
      if (++seen[e.region.value] > 1) return "region repeated after op " + std::to_string(i);
    if (st.entries() != model) return "stack differs from model after op " + std::to_string(i);
  }
  return {};
}

// pref_set grows with eps, and adding a constant to a row changes nothing.
inline std::string pref_monotone_and_shift_invariant(int tables = 2000, std::uint64_t seed = 12) {
  Rng rng(seed);
  std::uniform_real_distribution<double> val(-2.0, 1.0), eps(0.0, 1.0), shift(-5.0, 5.0);
  for (int t = 0; t < tables; ++t) {
    QTable qt;
    const RegionId j{t};
    auto& row = qt.row_mut(j);
    // some ties, some near-ties
    row.q = {val(rng), val(rng)};
    if (t % 7 == 0) row.q[1] = row.q[0];
    const double e1 = eps(rng), e2 = e1 + eps(rng);
    if (!qt.pref_set(j, e1).subset_of(qt.pref_set(j, e2))) return "pref_set shrank as eps grew, table " + std::to_string(t);
    if (qt.pref_set(j, e1).empty()) return "empty pref_set, table " + std::to_string(t);

    // shift by a dyadic constant so the differences stay exact
    const double c = std::ldexp(std::round(shift(rng) * 64.0), -6);
    QTable shifted;
    shifted.row_mut(j).q = {row.q[0] + c, row.q[1] + c};
    const double d0 = shifted.row(j).q[0] - shifted.row(j).q[1], d1 = row.q[0] - row.q[1];
    if (d0 != d1) continue;  // shift not exact in floating point; not a counterexample
    if (qt.pref_set(j, e1) != shifted.pref_set(j, e1)) return "pref_set changed under shift, table " + std::to_string(t);
  }
  return {};
}

// Merging two regions then detaching every folded prototype restores the
// exact classification on a probe grid.
inline std::string merge_detach_round_trip(int trials = 200, std::uint64_t seed = 13) {
  Rng rng(seed);
  const Bounds b;
  std::uniform_int_distribution<int> count(2, 12);
  for (int t = 0; t < trials; ++t) {
    auto rep = Representation::voronoi();
    const int n = count(rng);
    while (static_cast<int>(rep.region_count()) < n) {
      const State s{b.x_lo + uniform01(rng) * b.width(), b.v_lo + uniform01(rng) * b.height()};
      if (!rep.has_point(s)) rep.add_prototype(s);
    }
    std::vector<RegionId> before;
    for (int i = 0; i < 40; ++i)
      for (int k = 0; k < 40; ++k)
        before.push_back(rep.classify({b.x_lo + (i + 0.5) * b.width() / 40, b.v_lo + (k + 0.5) * b.height() / 40}));

    const auto regions = rep.regions();
    std::uniform_int_distribution<std::size_t> pick(0, regions.size() - 1);
    const RegionId a = regions[pick(rng)];
    RegionId c = regions[pick(rng)];
    while (c == a) c = regions[pick(rng)];
    rep.merge(a, c);
    if (rep.region_count() != regions.size() - 1) return "merge did not reduce region count, trial " + std::to_string(t);
    for (const auto& p : std::vector<Prototype>(rep.prototypes()))
      if (p.merged_into && *p.merged_into == a.value && p.id == c.value) rep.detach(p.id);

    std::size_t idx = 0;
    for (int i = 0; i < 40; ++i)
      for (int k = 0; k < 40; ++k) {
        const State s{b.x_lo + (i + 0.5) * b.width() / 40, b.v_lo + (k + 0.5) * b.height() / 40};
        if (rep.classify(s) != before[idx++]) return "classification changed at " + describe(s) + ", trial " + std::to_string(t);
      }
  }
  return {};
}

// step((-x,-v), opposite a) is the exact negation of step((x,v), a).
inline std::string env_mirror_symmetry(int states = 10000, std::uint64_t seed = 14) {
  Rng rng(seed);
  const PuckEnv env;
  std::uniform_real_distribution<double> x(-2.39, 2.39), v(-5.5, 5.5);
  for (int i = 0; i < states; ++i) {
    const State s{x(rng), v(rng)};
    for (Action a : kActions) {
      const Transition t = env.step(s, a);
      const Transition m = env.step({-s.x, -s.v}, opposite(a));
      if (!(m.next.x == -t.next.x && m.next.v == -t.next.v && m.reward == t.reward && m.terminal == t.terminal))
        return "mirror mismatch at " + describe(s);
    }
  }
  return {};
}

// Two identical generation sessions and two identical test runs agree bit for
// bit in everything they export.
inline std::string bit_identical_reruns(std::uint64_t seed = 15) {
  const PuckEnv env;
  AgentConfig cfg;
  cfg.seed = seed;
  StopRule stop;
  stop.max_trials = 30;
  stop.success_steps = 20000;
  auto dump = [](const SessionResult& r) {
    std::ostringstream os;
    save(r.representation, os);
    r.log.write_csv(os);
    r.table.dump(os);
    return os.str();
  };
  const std::string g1 = dump(run_generation_session(env, cfg, stop));
  const std::string g2 = dump(run_generation_session(env, cfg, stop));
  if (g1 != g2) return "generation sessions differ";

  TestConfig tc;
  tc.seed = seed;
  tc.runs = 3;
  tc.max_train_steps = 20000;
  auto curves = [&] {
    std::ostringstream os;
    write_curves_csv(os, test_runs(uniform_grid(), env, tc));
    return os.str();
  };
  if (curves() != curves()) return "test curves differ";
  tc.threads = 1;
  const std::string serial = curves();
  tc.threads = 3;
  if (serial != curves()) return "test curves depend on thread count";
  return {};
}

}  // namespace props
