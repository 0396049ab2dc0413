#pragma once

// One-step look-ahead profiles and the two representational criteria built on
// them: epsilon-adequacy of a region at a state, and compatibility of a pair of
// states.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>

#include "cogecon/action_values.hpp"
#include "cogecon/error.hpp"
#include "cogecon/partition.hpp"
#include "cogecon/puck.hpp"

namespace cogecon {

struct CriteriaParams {
  double epsilon = 0.05;  // adequacy tolerance, reward units
  double delta = 0.05;    // action-selection tolerance, reward units
  int max_steps = 200;    // investigation rollout cap

  void validate() const {
    if (!(delta >= 0 && delta <= epsilon)) throw InvalidConfig("need 0 <= delta <= epsilon");
    if (max_steps < 1) throw InvalidConfig("max_steps must be >= 1");
  }
};

struct ActionLookahead {
  double q1 = 0.0;
  bool reliable = false;
  int steps = 0;
  bool terminal = false;
};

struct LookaheadProfile {
  std::array<ActionLookahead, kNumActions> actions{};
  State origin;
  RegionId origin_region;

  const ActionLookahead& operator[](Action a) const { return actions[index(a)]; }
  ActionLookahead& operator[](Action a) { return actions[index(a)]; }

  bool all_reliable() const {
    return std::all_of(actions.begin(), actions.end(), [](const ActionLookahead& l) { return l.reliable; });
  }
  bool any_reliable() const {
    return std::any_of(actions.begin(), actions.end(), [](const ActionLookahead& l) { return l.reliable; });
  }
};

inline std::ostream& operator<<(std::ostream& os, const LookaheadProfile& p) {
  os << "profile(" << p.origin.x << ", " << p.origin.v << ") region " << p.origin_region << ':';
  for (Action a : kActions) {
    const auto& l = p[a];
    os << ' ' << name(a) << '=' << l.q1 << (l.reliable ? "" : "?") << '/' << l.steps << (l.terminal ? "T" : "");
  }
  return os;
}

// Rolls each action out repeatedly from s until the state leaves s's region,
// fails, or max_steps elapse, then bootstraps from the region reached.
template <Environment Env>
LookaheadProfile investigate(const Env& env, const Representation& rep, const QTable& qt, const CriteriaParams& crit,
                             const State& s) {
  if (env.terminal(s)) throw ContractViolation("cannot investigate a terminal state");
  const double gamma = qt.params().gamma;
  LookaheadProfile prof;
  prof.origin = s;
  prof.origin_region = rep.classify(s);
  for (Action a : kActions) {
    State cur = s;
    double r_hat = 0.0, discount = 1.0;
    int steps = 0;
    RegionId k;
    bool terminal = false;
    do {
      const Transition t = env.step(cur, a);
      k = rep.classify(t.next);
      r_hat += discount * t.reward;
      discount *= gamma;
      ++steps;
      cur = t.next;
      terminal = t.terminal;
    } while (!(k != prof.origin_region || steps >= crit.max_steps || terminal));

    ActionLookahead& l = prof[a];
    l.steps = steps;
    l.terminal = terminal;
    if (terminal) {
      l.q1 = r_hat;
      l.reliable = true;
    } else {
      // discount == gamma^steps here
      l.q1 = r_hat + discount * qt.state_value(k);
      l.reliable = qt.reliable_source(k);
    }
  }
  return prof;
}

// Look-ahead state value: best q1 among reliable actions.
inline double v1(const LookaheadProfile& p) {
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& l : p.actions) {
    if (!l.reliable) continue;
    best = std::max(best, l.q1);
    any = true;
  }
  if (!any) throw ContractViolation("profile has no reliable action");
  return best;
}

// Look-ahead preferred actions among the reliable ones.
inline ActionSet pref1(const LookaheadProfile& p, double eps) {
  if (eps < 0) throw ContractViolation("preference tolerance must be non-negative");
  const double best = v1(p);
  ActionSet out;
  for (Action a : kActions)
    if (p[a].reliable && p[a].q1 >= best - eps) out.insert(a);
  return out;
}

struct ExperiencedTransition {
  State prev;
  Action action = Action::PushLeft;
  double reward = 0.0;
  State next;
  bool terminal = false;
};

// Surprise test on a single experienced transition. The look-ahead value of
// the taken action is r + gamma V(region(next)) (r when terminal); the test
// fails when it strays more than epsilon from the stored Q(j, a), or when a is
// a preferred action yet falls more than epsilon below what the region's other
// actions promise.
inline bool epsilon_adequate(const ExperiencedTransition& tr, const QTable& qt, const Representation& rep,
                             const CriteriaParams& crit) {
  const RegionId j = rep.classify(tr.prev);
  const double q1 = tr.terminal ? tr.reward : tr.reward + qt.params().gamma * qt.state_value(rep.classify(tr.next));
  const double eps = crit.epsilon;
  if (!(std::abs(q1 - qt.q(j, tr.action)) <= eps)) return false;
  if (qt.pref_set(j, crit.delta).contains(tr.action)) {
    double v1_est = q1;
    for (Action b : kActions)
      if (b != tr.action) v1_est = std::max(v1_est, qt.q(j, b));
    if (!(q1 >= v1_est - eps)) return false;
  }
  return true;
}

// Full adequacy check at a state from a complete, reliable profile:
// pref_delta(j) must lie inside pref1_epsilon(s), and |V1(s) - V(j)| <= epsilon.
inline bool epsilon_adequate(const LookaheadProfile& p, const QTable& qt, const CriteriaParams& crit) {
  if (!p.all_reliable()) throw ContractViolation("adequacy needs every action reliable");
  const RegionId j = p.origin_region;
  if (!qt.pref_set(j, crit.delta).subset_of(pref1(p, crit.epsilon))) return false;
  return std::abs(v1(p) - qt.state_value(j)) <= crit.epsilon;
}

enum class Incompatibility {
  None,
  Preference,   // pref1_epsilon sets differ
  Value,        // look-ahead values further apart than delta
  Consistency,  // top-action sets differ (pref1_delta or pref1_0)
};

inline const char* name(Incompatibility i) {
  switch (i) {
    case Incompatibility::None: return "none";
    case Incompatibility::Preference: return "preference";
    case Incompatibility::Value: return "value";
    case Incompatibility::Consistency: return "consistency";
  }
  return "?";
}

// First compatibility rule the pair violates. The consistency rule compares
// pref1_delta sets when delta <= epsilon/2 and pref1_0 sets otherwise.
inline Incompatibility incompatibility(const LookaheadProfile& p1, const LookaheadProfile& p2,
                                       const CriteriaParams& crit) {
  if (!(p1.all_reliable() && p2.all_reliable())) throw ContractViolation("compatibility needs every action reliable");
  const double eps = crit.epsilon, delta = crit.delta;
  if (pref1(p1, eps) != pref1(p2, eps)) return Incompatibility::Preference;
  if (!(std::abs(v1(p1) - v1(p2)) <= delta)) return Incompatibility::Value;
  const double consist = delta <= eps / 2 ? delta : 0.0;
  if (pref1(p1, consist) != pref1(p2, consist)) return Incompatibility::Consistency;
  return Incompatibility::None;
}

inline bool compatible(const LookaheadProfile& p1, const LookaheadProfile& p2, const CriteriaParams& crit) {
  return incompatibility(p1, p2, crit) == Incompatibility::None;
}

// Only split when both profiles can be judged, and they disagree.
inline bool should_split(const LookaheadProfile& p1, const LookaheadProfile& p2, const CriteriaParams& crit) {
  if (!(p1.all_reliable() && p2.all_reliable())) return false;
  return !compatible(p1, p2, crit);
}

}  // namespace cogecon
