#pragma once

// Tabular action values over partition regions. For a partition the feature
// weight of (region, action) is the table entry itself, so a region row holds
// one value and one update counter per action.

#include <algorithm>
#include <array>
#include <cstdint>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "cogecon/error.hpp"
#include "cogecon/partition.hpp"
#include "cogecon/puck.hpp"

namespace cogecon {

struct LearningParams {
  double gamma = 0.95;
  double alpha_fixed = 0.5;       // online Q-learning rate
  std::uint64_t min_updates = 3;  // reliability threshold
  std::uint64_t enough_samples = 10;  // floor of the 1/k investigation rate is 1/enough_samples

  void validate() const {
    if (!(gamma > 0 && gamma <= 1)) throw InvalidConfig("gamma must be in (0, 1]");
    if (!(alpha_fixed > 0 && alpha_fixed <= 1)) throw InvalidConfig("alpha must be in (0, 1]");
    if (min_updates < 1) throw InvalidConfig("min_updates must be >= 1");
    if (enough_samples < 1) throw InvalidConfig("enough_samples must be >= 1");
  }
};

// Bit set over the action enumeration.
class ActionSet {
 public:
  constexpr ActionSet() = default;
  constexpr ActionSet(std::initializer_list<Action> actions) {
    for (Action a : actions) insert(a);
  }

  constexpr void insert(Action a) { bits_ |= static_cast<std::uint8_t>(1u << index(a)); }
  constexpr bool contains(Action a) const { return (bits_ >> index(a)) & 1u; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(__builtin_popcount(bits_)); }
  constexpr bool subset_of(ActionSet o) const { return (bits_ & ~o.bits_) == 0; }

  // i-th member in enumeration order.
  Action nth(std::size_t i) const {
    for (Action a : kActions)
      if (contains(a) && i-- == 0) return a;
    throw ContractViolation("ActionSet::nth out of range");
  }

  friend constexpr bool operator==(ActionSet, ActionSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, ActionSet s) {
  os << '{';
  bool first = true;
  for (Action a : kActions) {
    if (!s.contains(a)) continue;
    os << (first ? "" : ",") << name(a);
    first = false;
  }
  return os << '}';
}

// {a : values[a] >= max(values) - eps}
inline ActionSet threshold_set(const std::array<double, kNumActions>& values, double eps) {
  const double best = *std::max_element(values.begin(), values.end());
  ActionSet out;
  for (Action a : kActions)
    if (values[index(a)] >= best - eps) out.insert(a);
  return out;
}

class QTable {
 public:
  struct Row {
    std::array<double, kNumActions> q{};  // unvisited entries read as 0
    std::array<std::uint64_t, kNumActions> updates{};
  };

  QTable() = default;
  explicit QTable(const LearningParams& p) : params_(p) { params_.validate(); }

  const LearningParams& params() const { return params_; }

  const Row& row(RegionId j) const {
    static const Row kEmpty{};
    auto it = rows_.find(j);
    return it == rows_.end() ? kEmpty : it->second;
  }
  Row& row_mut(RegionId j) { return rows_[j]; }
  bool has_row(RegionId j) const { return rows_.contains(j); }
  void erase(RegionId j) { rows_.erase(j); }
  void clear() { rows_.clear(); }
  std::size_t size() const { return rows_.size(); }

  double q(RegionId j, Action a) const { return row(j).q[index(a)]; }
  std::uint64_t updates(RegionId j, Action a) const { return row(j).updates[index(a)]; }

  double state_value(RegionId j) const {
    const auto& r = row(j).q;
    return *std::max_element(r.begin(), r.end());
  }

  ActionSet pref_set(RegionId j, double eps) const {
    if (eps < 0) throw ContractViolation("preference tolerance must be non-negative");
    return threshold_set(row(j).q, eps);
  }

  // Convex blend toward target; the counter is left alone.
  void blend(RegionId j, Action a, double target, double rate) {
    if (!(rate > 0 && rate <= 1)) throw ContractViolation("learning rate must be in (0, 1]");
    double& q = rows_[j].q[index(a)];
    q = (1.0 - rate) * q + rate * target;
  }

  void increment(RegionId j, Action a) { ++rows_[j].updates[index(a)]; }

  // Blend and count one update.
  void q_update(RegionId j, Action a, double target, double rate) {
    blend(j, a, target, rate);
    increment(j, a);
  }

  // Decreasing investigation rate: 1/k up to enough_samples updates, then
  // 1/enough_samples.
  double alpha_investigate(RegionId j, Action a) const {
    const std::uint64_t k = updates(j, a);
    if (k < 1) throw ContractViolation("alpha_investigate needs at least one counted update");
    if (k <= params_.enough_samples) return 1.0 / static_cast<double>(k);
    return 1.0 / static_cast<double>(params_.enough_samples);
  }

  // Some action of j has been updated min_updates times.
  bool reliable_source(RegionId j) const {
    const auto& u = row(j).updates;
    return std::any_of(u.begin(), u.end(), [&](std::uint64_t c) { return c >= params_.min_updates; });
  }

  // Every action of j has been updated min_updates times.
  bool reliable_prototype(RegionId j) const {
    const auto& u = row(j).updates;
    return std::all_of(u.begin(), u.end(), [&](std::uint64_t c) { return c >= params_.min_updates; });
  }

  // Halves every counter of j, so the region has to re-earn reliability.
  void reduce_reliability(RegionId j) {
    auto it = rows_.find(j);
    if (it == rows_.end()) return;
    for (auto& c : it->second.updates) c /= 2;
  }

  std::vector<RegionId> region_ids() const {
    std::vector<RegionId> ids;
    ids.reserve(rows_.size());
    for (const auto& [id, r] : rows_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  // Diagnostic dump: "region action value updates" per line.
  void dump(std::ostream& os) const {
    const auto old = os.precision(17);
    for (RegionId j : region_ids())
      for (Action a : kActions) os << j << ' ' << name(a) << ' ' << q(j, a) << ' ' << updates(j, a) << '\n';
    os.precision(old);
  }

 private:
  LearningParams params_;
  std::unordered_map<RegionId, Row> rows_;
};

}  // namespace cogecon
