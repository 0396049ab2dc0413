#pragma once

// Representation testing: a plain Q-learner over a frozen partition, trained
// from scratch and periodically measured by the median length of a batch of
// test trials with learning switched off.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "cogecon/action_values.hpp"
#include "cogecon/error.hpp"
#include "cogecon/partition.hpp"
#include "cogecon/puck.hpp"
#include "cogecon/random.hpp"

namespace cogecon {

struct CurvePoint {
  std::uint64_t train_steps = 0;
  double score = 0.0;
  int run_id = 0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct AveragedPoint {
  std::uint64_t train_steps = 0;
  double mean_score = 0.0;

  friend bool operator==(const AveragedPoint&, const AveragedPoint&) = default;
};

struct TestConfig {
  int batch_size = 50;
  std::uint64_t trial_cap = 100000;        // test-trial cap
  std::uint64_t train_trial_cap = 10000;   // training-trial cap
  std::uint64_t measure_every_steps = 2000;
  std::uint64_t measure_every_trials = 20;
  int runs = 10;
  std::uint64_t max_train_steps = 100000;  // training budget, checked between trials
  StartZone train_zone = StartZone::CentralThird;
  StartZone test_zone = StartZone::CentralQuarter;
  Bounds bounds;
  LearningParams learning;
  double delta = 0.05;  // actions are drawn uniformly from pref_delta
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
    if (trial_cap < 1) throw InvalidConfig("trial_cap must be >= 1");
    if (train_trial_cap < 1) throw InvalidConfig("train_trial_cap must be >= 1");
    if (runs < 1) throw InvalidConfig("runs must be >= 1");
    if (delta < 0) throw InvalidConfig("delta must be >= 0");
    learning.validate();
  }
};

inline double median(std::vector<double> xs) {
  if (xs.empty()) throw ContractViolation("median of an empty batch");
  const std::size_t n = xs.size(), mid = n / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double hi = xs[mid];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

inline Action choose_action(const QTable& qt, RegionId j, double delta, Rng& rng) {
  const ActionSet pref = qt.pref_set(j, delta);
  if (pref.size() == 1) return pref.nth(0);
  return pref.nth(std::uniform_int_distribution<std::size_t>(0, pref.size() - 1)(rng));
}

// Fixed-representation Q-learner used by the tester.
template <Environment Env>
class FixedLearner {
 public:
  FixedLearner(const Env& env, const Representation& rep, const LearningParams& lp, double delta)
      : env_(env), rep_(rep), qt_(lp), delta_(delta) {}

  const QTable& table() const { return qt_; }
  QTable& table() { return qt_; }

  // One trial from s; returns its length (steps taken, at most cap).
  std::uint64_t run_trial(State s, std::uint64_t cap, bool learn, Rng& rng) {
    std::uint64_t steps = 0;
    RegionId j = rep_.classify(s);
    while (steps < cap) {
      const Action a = choose_action(qt_, j, delta_, rng);
      const Transition t = env_.step(s, a);
      ++steps;
      const RegionId k = rep_.classify(t.next);
      if (learn) {
        const double target = t.terminal ? t.reward : t.reward + qt_.params().gamma * qt_.state_value(k);
        qt_.q_update(j, a, target, qt_.params().alpha_fixed);
      }
      if (t.terminal) break;
      s = t.next;
      j = k;
    }
    return steps;
  }

 private:
  const Env& env_;
  const Representation& rep_;
  QTable qt_;
  double delta_;
};

// Median length of a frozen-policy test batch. Each trial draws from its own
// seeded stream, so trial outcomes do not depend on the cap of earlier trials.
template <Environment Env>
double measure(FixedLearner<Env>& learner, const TestConfig& cfg, std::uint64_t seed) {
  std::vector<double> lengths;
  lengths.reserve(static_cast<std::size_t>(cfg.batch_size));
  for (int i = 0; i < cfg.batch_size; ++i) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    const State s = sample_start(cfg.test_zone, cfg.bounds, rng);
    lengths.push_back(static_cast<double>(learner.run_trial(s, cfg.trial_cap, false, rng)));
  }
  return median(std::move(lengths));
}

// One learning curve. A measurement is taken at a trial boundary once either
// measure_every_steps training steps or measure_every_trials trials have
// elapsed since the previous one, plus a final one when training stops.
template <Environment Env>
std::vector<CurvePoint> test_representation(const Representation& rep, const Env& env, const TestConfig& cfg,
                                            int run_id = 0) {
  cfg.validate();
  if (rep.empty()) throw EmptyRepresentation();
  const std::uint64_t run_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(run_id)});
  Rng train_rng(derive_seed(run_seed, {0}));
  FixedLearner<Env> learner(env, rep, cfg.learning, cfg.delta);

  std::vector<CurvePoint> curve;
  std::uint64_t train_steps = 0, steps_since = 0, trials_since = 0, n_meas = 0;
  auto take = [&] {
    curve.push_back({train_steps, measure(learner, cfg, derive_seed(run_seed, {1, n_meas++})), run_id});
    steps_since = trials_since = 0;
  };
  while (train_steps < cfg.max_train_steps) {
    const State s = sample_start(cfg.train_zone, cfg.bounds, train_rng);
    const std::uint64_t len = learner.run_trial(s, cfg.train_trial_cap, true, train_rng);
    train_steps += len;
    steps_since += len;
    ++trials_since;
    if (steps_since >= cfg.measure_every_steps || trials_since >= cfg.measure_every_trials) take();
  }
  if (curve.empty() || curve.back().train_steps != train_steps) take();
  return curve;
}

// Runs cfg.runs curves, in parallel when threads allow. Output is ordered by
// run id and independent of scheduling.
template <Environment Env>
std::vector<std::vector<CurvePoint>> test_runs(const Representation& rep, const Env& env, const TestConfig& cfg) {
  cfg.validate();
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t width = static_cast<std::size_t>(cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw);
  std::vector<std::vector<CurvePoint>> out(static_cast<std::size_t>(cfg.runs));
  for (std::size_t base = 0; base < out.size(); base += width) {
    std::vector<std::future<std::vector<CurvePoint>>> jobs;
    for (std::size_t r = base; r < std::min(out.size(), base + width); ++r)
      jobs.push_back(std::async(width == 1 ? std::launch::deferred : std::launch::async,
                                [&, r] { return test_representation(rep, env, cfg, static_cast<int>(r)); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) out[base + i] = jobs[i].get();
  }
  return out;
}

// Pointwise mean over the union of all measurement positions. Each run
// contributes its latest score at or before a position (its first score
// before it has any).
inline std::vector<AveragedPoint> average_curves(const std::vector<std::vector<CurvePoint>>& runs) {
  std::vector<std::uint64_t> axis;
  for (const auto& run : runs)
    for (const auto& p : run) axis.push_back(p.train_steps);
  std::sort(axis.begin(), axis.end());
  axis.erase(std::unique(axis.begin(), axis.end()), axis.end());

  std::size_t n_runs = 0;
  for (const auto& run : runs) n_runs += run.empty() ? 0 : 1;
  std::vector<AveragedPoint> out;
  out.reserve(axis.size());
  std::vector<std::size_t> cursor(runs.size(), 0);
  for (std::uint64_t t : axis) {
    double sum = 0.0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto& run = runs[r];
      if (run.empty()) continue;
      while (cursor[r] + 1 < run.size() && run[cursor[r] + 1].train_steps <= t) ++cursor[r];
      sum += run[cursor[r]].score;
    }
    out.push_back({t, sum / static_cast<double>(n_runs)});
  }
  return out;
}

// Averaged score at train_steps t (last observation carried forward).
inline std::optional<double> score_at(const std::vector<AveragedPoint>& curve, std::uint64_t t) {
  std::optional<double> out;
  for (const auto& p : curve) {
    if (p.train_steps > t) break;
    out = p.mean_score;
  }
  return out;
}

inline std::optional<std::uint64_t> steps_to_reach(const std::vector<AveragedPoint>& curve, double score) {
  for (const auto& p : curve)
    if (p.mean_score >= score) return p.train_steps;
  return std::nullopt;
}

struct SummaryRow {
  std::string name;
  std::size_t regions = 0;
  double final_score = 0.0;
  std::optional<std::uint64_t> steps_to_cap;
};

struct Comparison {
  std::vector<SummaryRow> summary;
  std::map<std::string, std::vector<std::vector<CurvePoint>>> curves;
  std::map<std::string, std::vector<AveragedPoint>> averaged;
};

inline void write_curves_csv(std::ostream& os, const std::vector<std::vector<CurvePoint>>& runs) {
  os << "train_steps,score,run_id\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& run : runs)
    for (const auto& p : run) os << p.train_steps << ',' << p.score << ',' << p.run_id << '\n';
}

inline void write_averaged_csv(std::ostream& os, const std::vector<AveragedPoint>& curve) {
  os << "train_steps,mean_score\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : curve) os << p.train_steps << ',' << p.mean_score << '\n';
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "name,regions,final_score,steps_to_cap\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : rows) {
    os << r.name << ',' << r.regions << ',' << r.final_score << ',';
    if (r.steps_to_cap) os << *r.steps_to_cap;
    os << '\n';
  }
}

template <Environment Env>
Comparison compare(const std::vector<std::pair<std::string, Representation>>& reps, const Env& env,
                   const TestConfig& cfg) {
  Comparison out;
  for (const auto& [nm, rep] : reps) {
    auto runs = test_runs(rep, env, cfg);
    auto avg = average_curves(runs);
    SummaryRow row{nm, rep.region_count(), avg.empty() ? 0.0 : avg.back().mean_score,
                   steps_to_reach(avg, static_cast<double>(cfg.trial_cap))};
    out.summary.push_back(row);
    out.curves[nm] = std::move(runs);
    out.averaged[nm] = std::move(avg);
  }
  return out;
}

// Writes <dir>/<name>_curves.csv, <dir>/<name>_avg.csv and <dir>/summary.csv.
inline void write_comparison(const Comparison& cmp, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    return os;
  };
  for (const auto& [nm, runs] : cmp.curves) {
    auto os = open(dir / (nm + "_curves.csv"));
    write_curves_csv(os, runs);
  }
  for (const auto& [nm, avg] : cmp.averaged) {
    auto os = open(dir / (nm + "_avg.csv"));
    write_averaged_csv(os, avg);
  }
  auto os = open(dir / "summary.csv");
  write_summary_csv(os, cmp.summary);
}

}  // namespace cogecon
