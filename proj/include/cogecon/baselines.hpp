#pragma once

// Box geometries for the fixed comparison representations that are not
// simple constructors: a variable-resolution refinement around visited
// trajectories, and a rectilinear quantization with hand-placed cut lines.

#include <algorithm>
#include <functional>
#include <vector>

#include "cogecon/error.hpp"
#include "cogecon/partition.hpp"
#include "cogecon/puck.hpp"

namespace cogecon {

struct LeveledBox {
  Box box;
  int level = 0;
};

namespace detail {

inline bool box_holds(const Box& b, const Bounds& outer, const State& s) {
  const bool in_x = s.x >= b.x_lo && (s.x < b.x_hi || (b.x_hi == outer.x_hi && s.x <= b.x_hi));
  const bool in_v = s.v >= b.v_lo && (s.v < b.v_hi || (b.v_hi == outer.v_hi && s.v <= b.v_hi));
  return in_x && in_v;
}

inline std::vector<LeveledBox> quarter(const LeveledBox& n) {
  const Box& b = n.box;
  const double xm = 0.5 * (b.x_lo + b.x_hi), vm = 0.5 * (b.v_lo + b.v_hi);
  return {{{b.x_lo, xm, b.v_lo, vm}, n.level + 1},
          {{xm, b.x_hi, b.v_lo, vm}, n.level + 1},
          {{b.x_lo, xm, vm, b.v_hi}, n.level + 1},
          {{xm, b.x_hi, vm, b.v_hi}, n.level + 1}};
}

// Boxes share a side of positive length.
inline bool adjacent(const Box& a, const Box& b) {
  const double ox = std::min(a.x_hi, b.x_hi) - std::max(a.x_lo, b.x_lo);
  const double ov = std::min(a.v_hi, b.v_hi) - std::max(a.v_lo, b.v_lo);
  const bool touch_x = a.x_hi == b.x_lo || b.x_hi == a.x_lo;
  const bool touch_v = a.v_hi == b.v_lo || b.v_hi == a.v_lo;
  return (touch_x && ov > 0) || (touch_v && ox > 0);
}

}  // namespace detail

// Quadtree refinement: every box holding one of the points is halved in both
// coordinates, down to max_level halvings. With balance set, boxes are then
// split until neighbours differ by at most one level.
inline std::vector<LeveledBox> refine_around(const std::vector<State>& points, const Bounds& bounds, int max_level,
                                             bool balance) {
  if (max_level < 0) throw InvalidConfig("max_level must be >= 0");
  std::vector<State> pts;
  pts.reserve(points.size());
  for (const State& s : points) pts.push_back(bounds.clamp(s));

  std::vector<LeveledBox> leaves;
  std::function<void(const LeveledBox&, std::vector<State>)> grow = [&](const LeveledBox& n, std::vector<State> inside) {
    if (inside.empty() || n.level >= max_level) {
      leaves.push_back(n);
      return;
    }
    for (const LeveledBox& c : detail::quarter(n)) {
      std::vector<State> sub;
      for (const State& s : inside)
        if (detail::box_holds(c.box, bounds, s)) sub.push_back(s);
      grow(c, std::move(sub));
    }
  };
  grow({{bounds.x_lo, bounds.x_hi, bounds.v_lo, bounds.v_hi}, 0}, std::move(pts));

  while (balance) {
    balance = false;
    std::vector<LeveledBox> next;
    for (const LeveledBox& l : leaves) {
      const bool coarse = std::any_of(leaves.begin(), leaves.end(), [&](const LeveledBox& m) {
        return m.level > l.level + 1 && detail::adjacent(l.box, m.box);
      });
      if (!coarse) {
        next.push_back(l);
        continue;
      }
      for (const LeveledBox& c : detail::quarter(l)) next.push_back(c);
      balance = true;
    }
    leaves = std::move(next);
  }
  return leaves;
}

inline Representation boxes_of(const std::vector<LeveledBox>& leaves) {
  std::vector<Box> bs;
  bs.reserve(leaves.size());
  for (const auto& l : leaves) bs.push_back(l.box);
  std::sort(bs.begin(), bs.end(), [](const Box& a, const Box& b) {
    return a.v_lo != b.v_lo ? a.v_lo < b.v_lo : a.x_lo < b.x_lo;
  });
  return Representation::boxes(std::move(bs));
}

// Product of two sorted cut lists; each list must start at the low bound and
// end at the high bound.
inline Representation rectilinear(const std::vector<double>& x_edges, const std::vector<double>& v_edges) {
  if (x_edges.size() < 2 || v_edges.size() < 2) throw InvalidConfig("need at least two edges per axis");
  if (!std::is_sorted(x_edges.begin(), x_edges.end()) || !std::is_sorted(v_edges.begin(), v_edges.end()))
    throw InvalidConfig("edges must be sorted");
  std::vector<Box> bs;
  for (std::size_t k = 0; k + 1 < v_edges.size(); ++k)
    for (std::size_t i = 0; i + 1 < x_edges.size(); ++i)
      bs.push_back({x_edges[i], x_edges[i + 1], v_edges[k], v_edges[k + 1]});
  return Representation::boxes(std::move(bs));
}

// Trajectory of a fixed policy from s, up to max_steps or failure.
template <Environment Env, class Policy>
std::vector<State> rollout(const Env& env, State s, Policy policy, std::size_t max_steps) {
  std::vector<State> out{s};
  for (std::size_t n = 0; n < max_steps; ++n) {
    const Transition t = env.step(s, policy(s));
    if (t.terminal) break;
    s = t.next;
    out.push_back(s);
  }
  return out;
}

}  // namespace cogecon
