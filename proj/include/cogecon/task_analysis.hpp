#pragma once

// Ground truth for the puck task on a grid: which states can be kept off the
// walls forever (the viability kernel), which controllable states need one
// particular action, and how well a representation keeps those apart.

#include <cmath>
#include <cstdint>
#include <deque>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <vector>

#include "cogecon/error.hpp"
#include "cogecon/partition.hpp"
#include "cogecon/puck.hpp"

namespace cogecon {

enum class Viability : std::uint8_t { Controllable, Doomed };

enum class CriticalClass : std::uint8_t { MustPushLeft, MustPushRight, DontCare, Doomed };

inline const char* name(Viability v) { return v == Viability::Controllable ? "controllable" : "doomed"; }

inline const char* name(CriticalClass c) {
  switch (c) {
    case CriticalClass::MustPushLeft: return "must_push_left";
    case CriticalClass::MustPushRight: return "must_push_right";
    case CriticalClass::DontCare: return "dont_care";
    case CriticalClass::Doomed: return "doomed";
  }
  return "?";
}

// Node-centred grid: cell (i, k) is the square of side h around
// (cx + (i - ci) h, cv + (k - ck) h), where (cx, cv) is the centre of bounds
// and (ci, ck) the middle indices. Cells are laid out mirror-symmetrically
// about the centre, so (0, 0) is a cell centre for the default bounds.
class ViabilityGrid {
 public:
  static constexpr std::int64_t kSink = -1;  // terminal or out of bounds

  ViabilityGrid() = default;
  ViabilityGrid(const Bounds& bounds, double hx, double hv) : bounds_(bounds), hx_(hx), hv_(hv) {
    if (!(hx > 0 && hv > 0)) throw InvalidConfig("grid resolution must be positive");
    if (!(bounds.width() >= 0 && bounds.height() >= 0)) throw InvalidConfig("grid bounds inverted");
    hi_ = half_count(bounds.width(), hx);
    hk_ = half_count(bounds.height(), hv);
    cells_.assign(static_cast<std::size_t>(nx() * nv()), Viability::Controllable);
  }

  const Bounds& bounds() const { return bounds_; }
  double hx() const { return hx_; }
  double hv() const { return hv_; }
  std::int64_t nx() const { return 2 * hi_ + 1; }
  std::int64_t nv() const { return 2 * hk_ + 1; }
  std::size_t size() const { return cells_.size(); }

  State center(std::int64_t cell) const {
    const std::int64_t i = cell % nx(), k = cell / nx();
    return {cx() + static_cast<double>(i - hi_) * hx_, cv() + static_cast<double>(k - hk_) * hv_};
  }

  // Cell containing s, or kSink when s lies outside the grid. Offsets round
  // half away from zero so the lookup commutes with the mirror map.
  std::int64_t cell_of(const State& s) const {
    if (!finite(s)) return kSink;
    const double fi = std::round((s.x - cx()) / hx_), fk = std::round((s.v - cv()) / hv_);
    if (std::abs(fi) > static_cast<double>(hi_) || std::abs(fk) > static_cast<double>(hk_)) return kSink;
    return (static_cast<std::int64_t>(fk) + hk_) * nx() + static_cast<std::int64_t>(fi) + hi_;
  }

  std::int64_t mirror(std::int64_t cell) const { return static_cast<std::int64_t>(size()) - 1 - cell; }

  Viability at(std::int64_t cell) const { return cells_.at(static_cast<std::size_t>(cell)); }
  Viability at(const State& s) const {
    const std::int64_t c = cell_of(s);
    if (c == kSink) throw ContractViolation("state outside the viability grid");
    return at(c);
  }
  void set(std::int64_t cell, Viability v) { cells_.at(static_cast<std::size_t>(cell)) = v; }

  std::size_t count(Viability v) const {
    std::size_t n = 0;
    for (auto c : cells_) n += c == v;
    return n;
  }

  // Successor cell of `cell` under each action; kept by viability_map so that
  // the critical classification reuses the exact edges of the fixpoint.
  std::vector<std::array<std::int64_t, kNumActions>> images;

 private:
  static std::int64_t half_count(double extent, double h) {
    // largest n with n*h <= extent/2, tolerant of representation error
    return static_cast<std::int64_t>(std::floor(extent / 2.0 / h + 1e-9));
  }
  double cx() const { return 0.5 * (bounds_.x_lo + bounds_.x_hi); }
  double cv() const { return 0.5 * (bounds_.v_lo + bounds_.v_hi); }

  Bounds bounds_;
  double hx_ = 0.01, hv_ = 0.01;
  std::int64_t hi_ = 0, hk_ = 0;
  std::vector<Viability> cells_;
};

// Where the dynamics carry a cell when one action is held: the first cell
// other than the start one, or kSink for a wall or for leaving the grid. With
// dt = 0.02 a single step often stays inside a 0.01 cell, which would read as
// a self-loop and keep hopeless cells alive, so the action is held until the
// state exits. A state that never exits within max_hold steps sits on an
// equilibrium and maps to itself.
template <Environment Env>
std::int64_t cell_image(const Env& env, const ViabilityGrid& grid, std::int64_t cell, Action a, int max_hold = 1000) {
  State s = grid.center(cell);
  if (env.terminal(s)) return ViabilityGrid::kSink;
  for (int n = 0; n < max_hold; ++n) {
    const Transition t = env.step(s, a);
    if (t.terminal) return ViabilityGrid::kSink;
    const std::int64_t c = grid.cell_of(t.next);
    if (c != cell) return c;
    s = t.next;
  }
  return cell;
}

// Viability kernel on the grid. A cell is doomed when it is terminal or every
// action leads to a doomed cell or a sink; everything else stays controllable.
// Solved with a worklist over predecessor edges, so the result is the
// greatest fixpoint regardless of visiting order.
template <Environment Env>
ViabilityGrid viability_map(const Env& env, const Bounds& bounds = {}, double resolution = 0.01) {
  ViabilityGrid grid(bounds, resolution, resolution);
  const std::int64_t n = static_cast<std::int64_t>(grid.size());
  grid.images.resize(grid.size());
  std::vector<std::uint8_t> live(grid.size(), 0);  // actions whose image is still controllable
  std::vector<std::vector<std::int64_t>> preds(grid.size());
  for (std::int64_t c = 0; c < n; ++c) {
    for (Action a : kActions) {
      const std::int64_t img = cell_image(env, grid, c, a);
      grid.images[static_cast<std::size_t>(c)][index(a)] = img;
      if (img == ViabilityGrid::kSink) continue;
      ++live[static_cast<std::size_t>(c)];
      preds[static_cast<std::size_t>(img)].push_back(c);
    }
  }
  std::deque<std::int64_t> work;
  for (std::int64_t c = 0; c < n; ++c)
    if (live[static_cast<std::size_t>(c)] == 0 || env.terminal(grid.center(c))) {
      grid.set(c, Viability::Doomed);
      work.push_back(c);
    }
  while (!work.empty()) {
    const std::int64_t d = work.front();
    work.pop_front();
    for (std::int64_t p : preds[static_cast<std::size_t>(d)]) {
      if (grid.at(p) == Viability::Doomed) continue;
      if (--live[static_cast<std::size_t>(p)] == 0) {
        grid.set(p, Viability::Doomed);
        work.push_back(p);
      }
    }
  }
  return grid;
}

inline CriticalClass classify_cell(const ViabilityGrid& grid, std::int64_t cell) {
  if (grid.at(cell) == Viability::Doomed) return CriticalClass::Doomed;
  if (grid.images.size() != grid.size()) throw ContractViolation("grid has no transition images");
  auto ok = [&](Action a) {
    const std::int64_t img = grid.images[static_cast<std::size_t>(cell)][index(a)];
    return img != ViabilityGrid::kSink && grid.at(img) == Viability::Controllable;
  };
  const bool left = ok(Action::PushLeft), right = ok(Action::PushRight);
  if (left && right) return CriticalClass::DontCare;
  if (left) return CriticalClass::MustPushLeft;
  if (right) return CriticalClass::MustPushRight;
  return CriticalClass::Doomed;
}

inline CriticalClass classify_critical(const ViabilityGrid& grid, const State& s) {
  const std::int64_t c = grid.cell_of(s);
  if (c == ViabilityGrid::kSink) throw ContractViolation("state outside the viability grid");
  return classify_cell(grid, c);
}

struct ValidationReport {
  std::uint64_t violations = 0;  // (must-push-left, must-push-right) cell pairs sharing a region
  std::size_t regions = 0;
  std::size_t must_push_left = 0;
  std::size_t must_push_right = 0;
  std::size_t mixed_regions = 0;  // regions holding both kinds
};

inline std::ostream& operator<<(std::ostream& os, const ValidationReport& r) {
  return os << "regions " << r.regions << "\nviolations " << r.violations << "\nmixed_regions " << r.mixed_regions
            << "\nmust_push_left " << r.must_push_left << "\nmust_push_right " << r.must_push_right << '\n';
}

inline ValidationReport validate_representation(const ViabilityGrid& grid, const Representation& rep) {
  if (rep.empty()) throw EmptyRepresentation();
  ValidationReport out;
  out.regions = rep.region_count();
  std::map<RegionId, std::pair<std::uint64_t, std::uint64_t>> counts;
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(grid.size()); ++c) {
    const CriticalClass k = classify_cell(grid, c);
    if (k == CriticalClass::MustPushLeft) {
      ++counts[rep.classify(grid.center(c))].first;
      ++out.must_push_left;
    } else if (k == CriticalClass::MustPushRight) {
      ++counts[rep.classify(grid.center(c))].second;
      ++out.must_push_right;
    }
  }
  for (const auto& [r, lr] : counts) {
    out.violations += lr.first * lr.second;
    out.mixed_regions += (lr.first > 0 && lr.second > 0);
  }
  return out;
}

// `x v class` rows, one per cell.
inline void write_viability(std::ostream& os, const ViabilityGrid& grid) {
  os << "x v class\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(grid.size()); ++c) {
    const State s = grid.center(c);
    os << s.x << ' ' << s.v << ' ' << name(grid.at(c)) << '\n';
  }
}

// `x v class` rows for the must-push cells only (the critical curves).
inline void write_critical(std::ostream& os, const ViabilityGrid& grid) {
  os << "x v class\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(grid.size()); ++c) {
    const CriticalClass k = classify_cell(grid, c);
    if (k != CriticalClass::MustPushLeft && k != CriticalClass::MustPushRight) continue;
    const State s = grid.center(c);
    os << s.x << ' ' << s.v << ' ' << name(k) << '\n';
  }
}

}  // namespace cogecon
