#pragma once

// The online representation learner. During trials it runs Q-learning and
// remembers surprising states on a replacing-stack; at the end of each trial it
// investigates the remembered states most-recent-first, refreshing action
// values and, on a timer, splitting or merging regions according to the
// compatibility criterion.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cogecon/action_values.hpp"
#include "cogecon/adequacy.hpp"
#include "cogecon/error.hpp"
#include "cogecon/harness.hpp"
#include "cogecon/partition.hpp"
#include "cogecon/puck.hpp"
#include "cogecon/random.hpp"

namespace cogecon {

// LIFO of (state, region) holding at most one entry per region: pushing evicts
// any older entry of the same region.
class ReplacingStack {
 public:
  struct Entry {
    State state;
    RegionId region;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  void push(const State& s, RegionId j) {
    std::erase_if(items_, [j](const Entry& e) { return e.region == j; });
    items_.push_back({s, j});
  }

  Entry pop() {
    if (items_.empty()) throw ContractViolation("pop from an empty stack");
    Entry e = items_.back();
    items_.pop_back();
    return e;
  }

  const Entry& top() const {
    if (items_.empty()) throw ContractViolation("top of an empty stack");
    return items_.back();
  }

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  bool contains(RegionId j) const {
    return std::any_of(items_.begin(), items_.end(), [j](const Entry& e) { return e.region == j; });
  }

  // Bottom to top.
  const std::vector<Entry>& entries() const { return items_; }

  // Re-classifies every entry after the partition changed, keeping only the
  // most recent entry of each region.
  void rekey(const std::function<RegionId(const State&)>& region_of) {
    std::vector<Entry> old;
    old.swap(items_);
    for (Entry& e : old) push(e.state, region_of(e.state));
  }

 private:
  std::vector<Entry> items_;
};

// The generating agent runs with a longer horizon and looser tolerances than
// the tester: at gamma 0.95 and epsilon 0.05 the value differences between
// neighbouring failure distances exceed epsilon almost everywhere, and the
// agent keeps splitting.
struct AgentConfig {
  CriteriaParams criteria{.epsilon = 0.1, .delta = 0.1};
  LearningParams learning{.gamma = 0.99};
  int fe_period = 5;                      // stack investigations per feature-extraction pass
  int merge_period = 10;                  // feature-extraction passes per consolidation sweep
  double repush_probability = 0.1;        // chance of pushing an unsurprising state anyway
  double stack_start_probability = 0.5;   // chance a trial starts from a stacked state
  int consolidate_neighbors = 3;          // k of the mutual k-nearest-neighbour candidate pairs
  Scale scale;
  bool freeze_representation = false;     // never run feature extraction
  std::uint64_t seed = 1;

  void validate() const {
    criteria.validate();
    learning.validate();
    if (fe_period < 1) throw InvalidConfig("fe_period must be >= 1");
    if (merge_period < 1) throw InvalidConfig("merge_period must be >= 1");
    if (!(repush_probability >= 0 && repush_probability <= 1)) throw InvalidConfig("repush_probability must be in [0, 1]");
    if (!(stack_start_probability >= 0 && stack_start_probability <= 1))
      throw InvalidConfig("stack_start_probability must be in [0, 1]");
    if (consolidate_neighbors < 1) throw InvalidConfig("consolidate_neighbors must be >= 1");
  }
};

struct AgentStats {
  std::uint64_t splits = 0;         // prototypes added
  std::uint64_t detaches = 0;
  std::uint64_t merges = 0;
  std::uint64_t investigations = 0; // investigate() calls
  std::uint64_t stack_pops = 0;
  std::uint64_t fe_passes = 0;      // update_representation() calls
  std::uint64_t online_updates = 0; // Q-learning updates in get_action
  std::uint64_t active_updates = 0; // value updates from investigation profiles
  std::size_t stack_max = 0;
  // Why update_representation judged s incompatible with its prototype.
  std::array<std::uint64_t, 4> split_reasons{};

  std::uint64_t backups() const { return online_updates + active_updates; }
};

template <Environment Env>
class EconomizerAgent {
 public:
  EconomizerAgent(const Env& env, AgentConfig cfg, Representation initial = Representation::voronoi())
      : env_(env), cfg_(cfg), rep_(std::move(initial)), qt_(cfg.learning), rng_(cfg.seed) {
    cfg_.validate();
    if (rep_.kind() != RepKind::Voronoi) throw WrongKind("the agent learns a Voronoi representation");
  }

  const Representation& representation() const { return rep_; }
  const QTable& table() const { return qt_; }
  QTable& table() { return qt_; }
  const ReplacingStack& stack() const { return stack_; }
  ReplacingStack& stack() { return stack_; }
  const AgentStats& stats() const { return stats_; }
  const AgentConfig& config() const { return cfg_; }
  Rng& rng() { return rng_; }
  const Env& env() const { return env_; }
  bool investigated(RegionId j) const { return investigated_.contains(j); }
  // Largest stack size since the current trial began.
  std::size_t trial_stack_max() const { return trial_stack_max_; }

  RegionId region(const State& s) const { return rep_.classify(s); }

  // Starts a trial at s; an empty representation adopts s as its first
  // prototype.
  Action begin_trial(const State& s) {
    trial_stack_max_ = stack_.size();
    if (rep_.empty()) {
      rep_.add_prototype(s);
      trace_structure();
    }
    return next_action(s);
  }

  // Uniform choice from pref_delta of s's region.
  Action next_action(const State& s) { return choose_action(qt_, region(s), cfg_.criteria.delta, rng_); }

  // Feeds the transition s_prev -a-> r, s_t. Returns the next action, or
  // nullopt when s_t is terminal (the stack has then been processed).
  std::optional<Action> get_action(const State& s_prev, Action a, double r, const State& s_t, bool terminal) {
    const RegionId j = region(s_prev);
    const RegionId k = region(s_t);
    if (terminal || qt_.reliable_source(k)) {
      const double q_new = terminal ? r : r + qt_.params().gamma * qt_.state_value(k);
      qt_.q_update(j, a, q_new, qt_.params().alpha_fixed);
      ++stats_.online_updates;
    }

    const ExperiencedTransition tr{s_prev, a, r, s_t, terminal};
    const bool surprising = !epsilon_adequate(tr, qt_, rep_, cfg_.criteria);
    if (surprising || !investigated_.contains(j) || coin(rng_, cfg_.repush_probability)) {
      stack_.push(s_prev, j);
      stats_.stack_max = std::max(stats_.stack_max, stack_.size());
      trial_stack_max_ = std::max(trial_stack_max_, stack_.size());
    }

    if (terminal) {
      process_stack();
      return std::nullopt;
    }
    return next_action(s_t);
  }

  // Investigates every stacked state, most recent first. Every fe_period-th
  // pop runs feature extraction instead of a plain value refresh.
  void process_stack() {
    while (!stack_.empty()) {
      const State s = stack_.pop().state;
      const RegionId j = region(s);
      ++stats_.stack_pops;
      if (!cfg_.freeze_representation && stats_.stack_pops % static_cast<std::uint64_t>(cfg_.fe_period) == 0) {
        update_representation(s, j);
      } else {
        const LookaheadProfile prof = investigate_at(s);
        apply_profile(j, prof);
      }
    }
  }

  void update_representation(const State& s, RegionId j) {
    ++stats_.fe_passes;
    const NearestPrototypes np = rep_.nearest_and_primary(s);
    const Prototype sp = np.primary;
    const std::optional<Prototype> sp2 = np.nearest;

    const LookaheadProfile prof_s = investigate_at(s);
    const LookaheadProfile prof_p = investigate_at(sp.point);
    apply_profile(j, prof_p);

    if (!should_split(prof_s, prof_p, cfg_.criteria) || !qt_.reliable_prototype(j)) {
      apply_profile(j, prof_s);
    } else {
      ++stats_.split_reasons[static_cast<std::size_t>(incompatibility(prof_s, prof_p, cfg_.criteria))];
      qt_.reduce_reliability(j);
      std::optional<LookaheadProfile> prof_p2;
      if (sp2 && !env_.terminal(sp2->point)) prof_p2 = investigate_at(sp2->point);
      const bool split_p_p2 = prof_p2 && should_split(prof_p, *prof_p2, cfg_.criteria);
      const bool split_s_p2 = prof_p2 && should_split(prof_s, *prof_p2, cfg_.criteria);

      bool added = false;
      if ((!split_p_p2 || split_s_p2) && !rep_.has_point(s)) {
        const RegionId fresh = rep_.add_prototype(s);
        seed_region(fresh, j, prof_s);
        ++stats_.splits;
        added = true;
      }
      if (split_p_p2) {
        rep_.detach(sp2->id);
        seed_region(sp2->region(), j, *prof_p2);
        if (!added) apply_profile(sp2->region(), prof_s);
        ++stats_.detaches;
      }
      if (added || split_p_p2) {
        stack_.rekey([this](const State& x) { return region(x); });
        trace_structure();
      }
    }

    if (stats_.fe_passes % static_cast<std::uint64_t>(cfg_.merge_period) == 0) consolidate();
  }

  // Merges neighbouring regions whose prototypes turn out compatible.
  // Candidates are pairs of primary prototypes that are mutual k-nearest
  // neighbours and both reliable; the smaller id is folded into the larger.
  void consolidate() {
    const auto& protos = rep_.prototypes();
    std::vector<Prototype> prim;
    for (const Prototype& p : protos)
      if (p.primary()) prim.push_back(p);
    if (prim.size() < 2) return;

    const std::size_t k = std::min(static_cast<std::size_t>(cfg_.consolidate_neighbors), prim.size() - 1);
    std::vector<std::vector<std::size_t>> knn(prim.size());
    for (std::size_t i = 0; i < prim.size(); ++i) {
      std::vector<std::pair<double, std::size_t>> d;
      for (std::size_t m = 0; m < prim.size(); ++m)
        if (m != i) d.emplace_back(rep_.distance2(prim[i].point, prim[m].point), m);
      std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
      for (std::size_t t = 0; t < k; ++t) knn[i].push_back(d[t].second);
    }
    auto in = [&](std::size_t i, std::size_t m) { return std::find(knn[i].begin(), knn[i].end(), m) != knn[i].end(); };

    bool changed = false;
    for (std::size_t i = 0; i < prim.size(); ++i) {
      for (std::size_t m = i + 1; m < prim.size(); ++m) {
        if (!in(i, m) || !in(m, i)) continue;
        const Prototype& a = rep_.prototype(prim[i].id);
        const Prototype& b = rep_.prototype(prim[m].id);
        if (!a.primary() || !b.primary()) continue;
        const RegionId ra = a.region(), rb = b.region();
        if (!qt_.reliable_prototype(ra) || !qt_.reliable_prototype(rb)) continue;
        if (env_.terminal(a.point) || env_.terminal(b.point)) continue;
        const State pa_point = a.point, pb_point = b.point;
        const LookaheadProfile pa = investigate_at(pa_point);
        const LookaheadProfile pb = investigate_at(pb_point);
        if (!pa.all_reliable() || !pb.all_reliable() || !compatible(pa, pb, cfg_.criteria)) continue;
        const RegionId keep = std::max(ra, rb), fold = std::min(ra, rb);
        rep_.merge(keep, fold);
        qt_.erase(fold);
        ++stats_.merges;
        changed = true;
      }
    }
    if (changed) {
      stack_.rekey([this](const State& x) { return region(x); });
      trace_structure();
    }
  }

  LookaheadProfile investigate_at(const State& s) {
    LookaheadProfile p = investigate(env_, rep_, qt_, cfg_.criteria, s);
    ++stats_.investigations;
    investigated_.insert(p.origin_region);
    return p;
  }

  // Invoked after every structural change; used by tests to observe the
  // partition as it evolves.
  std::function<void(const Representation&)> on_structure_change;

 private:
  // For each reliable action: count the update, then move Q(j, a) toward the
  // look-ahead value at the decreasing investigation rate.
  void apply_profile(RegionId j, const LookaheadProfile& prof) {
    for (Action a : kActions) {
      if (!prof[a].reliable) continue;
      qt_.increment(j, a);
      qt_.blend(j, a, prof[a].q1, qt_.alpha_investigate(j, a));
      ++stats_.active_updates;
    }
  }

  // A region carved out of `parent` starts from the parent's values, with its
  // reliable look-ahead values taking over as first samples.
  void seed_region(RegionId fresh, RegionId parent, const LookaheadProfile& prof) {
    QTable::Row row;
    row.q = qt_.row(parent).q;
    for (Action a : kActions) {
      if (!prof[a].reliable) continue;
      row.q[index(a)] = prof[a].q1;
      row.updates[index(a)] = 1;
    }
    qt_.row_mut(fresh) = row;
  }

  void trace_structure() {
    if (on_structure_change) on_structure_change(rep_);
  }

  const Env& env_;
  AgentConfig cfg_;
  Representation rep_;
  QTable qt_;
  Rng rng_;
  ReplacingStack stack_;
  std::unordered_set<RegionId> investigated_;
  AgentStats stats_;
  std::size_t trial_stack_max_ = 0;
};

struct StopRule {
  std::uint64_t max_total_steps = 20'000'000;
  std::uint64_t max_trials = 2000;
  std::uint64_t success_steps = 1'000'000;  // a trial this long ends the session
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t steps = 0;
  std::size_t regions = 0;
  std::uint64_t splits = 0;  // during this trial's end-of-trial processing
  std::uint64_t merges = 0;
  std::size_t stack_max = 0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct SessionLog {
  std::vector<TrialRecord> trials;

  void write_csv(std::ostream& os) const {
    os << "trial,steps,regions,splits,merges,stack_max\n";
    for (const auto& t : trials)
      os << t.trial << ',' << t.steps << ',' << t.regions << ',' << t.splits << ',' << t.merges << ',' << t.stack_max
         << '\n';
  }
};

struct SessionResult {
  Representation representation;
  QTable table;
  SessionLog log;
  bool succeeded = false;
  std::uint64_t total_steps = 0;
};

// Drives trials until the stop rule fires. start(rng) draws a start state;
// with stack_start_probability a trial instead begins at a state popped from a
// non-empty stack.
template <Environment Env, class StartFn>
SessionResult run_session(EconomizerAgent<Env>& agent, StartFn&& start, const StopRule& stop) {
  SessionResult out;
  const Env& env = agent.env();
  std::optional<State> first;
  if (agent.representation().empty()) {
    first = start(agent.rng());
    agent.begin_trial(*first);  // adopts the first prototype; the action is re-drawn below
  }

  std::uint64_t total = 0;
  for (std::uint64_t trial = 0; trial < stop.max_trials && total < stop.max_total_steps; ++trial) {
    State s;
    if (first) {
      s = *first;
      first.reset();
    } else if (!agent.stack().empty() && coin(agent.rng(), agent.config().stack_start_probability)) {
      s = agent.stack().pop().state;
    } else {
      s = start(agent.rng());
    }
    if (env.terminal(s)) continue;

    const AgentStats before = agent.stats();
    Action a = agent.begin_trial(s);
    std::uint64_t steps = 0;
    bool success = false;
    while (true) {
      const Transition t = env.step(s, a);
      ++steps;
      ++total;
      const auto next = agent.get_action(s, a, t.reward, t.next, t.terminal);
      if (!next) break;
      if (steps >= stop.success_steps) {
        success = true;
        break;
      }
      if (total >= stop.max_total_steps) break;
      s = t.next;
      a = *next;
    }
    const AgentStats& after = agent.stats();
    out.log.trials.push_back({trial, steps, agent.representation().region_count(), after.splits - before.splits,
                              after.merges - before.merges, agent.trial_stack_max()});
    if (success) {
      out.succeeded = true;
      break;
    }
  }
  out.representation = agent.representation();
  out.table = agent.table();
  out.total_steps = total;
  return out;
}

// Generation stage on the puck task: trials start in the central third of the
// state bounds.
inline SessionResult run_generation_session(const PuckEnv& env, const AgentConfig& cfg, const StopRule& stop,
                                            const Bounds& bounds = {},
                                            std::optional<Representation> initial = std::nullopt) {
  Representation rep = initial ? std::move(*initial) : Representation::voronoi(cfg.scale);
  EconomizerAgent<PuckEnv> agent(env, cfg, std::move(rep));
  return run_session(agent, [&bounds](Rng& rng) { return sample_start(StartZone::CentralThird, bounds, rng); }, stop);
}

// The two-prototype seed straddling the controllable band.
inline Representation seed_representation(Scale scale = {}) {
  Representation rep = Representation::voronoi(scale);
  rep.add_prototype({0.2680, 0.6200});
  rep.add_prototype({-0.2680, -0.6200});
  return rep;
}

}  // namespace cogecon
