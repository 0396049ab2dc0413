#pragma once

// Puck-on-a-hill: a puck on the hill y = -beta x^2 pushed left or right by a
// fixed thrust, failing when it reaches the wall at |x| = x_limit.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <string>

#include "cogecon/error.hpp"
#include "cogecon/random.hpp"

namespace cogecon {

struct State {
  double x = 0.0;  // position, m
  double v = 0.0;  // velocity, m/s

  friend bool operator==(const State&, const State&) = default;
};

inline bool finite(const State& s) { return std::isfinite(s.x) && std::isfinite(s.v); }

enum class Action : std::uint8_t { PushLeft = 0, PushRight = 1 };

inline constexpr std::size_t kNumActions = 2;
inline constexpr std::array<Action, kNumActions> kActions{Action::PushLeft, Action::PushRight};

constexpr std::size_t index(Action a) { return static_cast<std::size_t>(a); }

constexpr Action opposite(Action a) {
  return a == Action::PushLeft ? Action::PushRight : Action::PushLeft;
}

inline const char* name(Action a) { return a == Action::PushLeft ? "left" : "right"; }

struct Transition {
  double reward = 0.0;
  State next;
  bool terminal = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Anything the agents can learn on: a deterministic model that can be
// started from any state. Resetting is implicit because step() takes the
// state it starts from.
template <class E>
concept Environment = requires(const E& env, State s, Action a) {
  { env.step(s, a) } -> std::same_as<Transition>;
  { env.terminal(s) } -> std::convertible_to<bool>;
};

struct EnvParams {
  double beta = 0.3;
  double g = 9.8;
  double mass = 1.0;
  double dt = 0.02;
  double force_mag = 3.0;
  double x_limit = 2.4;
  double fail_reward = -1.0;

  void validate() const {
    if (!(dt > 0)) throw InvalidConfig("dt must be positive");
    if (!(force_mag > 0)) throw InvalidConfig("force_mag must be positive");
    if (!(x_limit > 0)) throw InvalidConfig("x_limit must be positive");
    if (!(beta > 0)) throw InvalidConfig("beta must be positive");
    if (!(mass > 0)) throw InvalidConfig("mass must be positive");
  }
};

// Axis-aligned rectangle of the (x, v) plane.
struct Bounds {
  double x_lo = -2.4;
  double x_hi = 2.4;
  double v_lo = -5.5;
  double v_hi = 5.5;

  double width() const { return x_hi - x_lo; }
  double height() const { return v_hi - v_lo; }
  bool contains(const State& s) const {
    return s.x >= x_lo && s.x <= x_hi && s.v >= v_lo && s.v <= v_hi;
  }
  State clamp(const State& s) const {
    return {std::clamp(s.x, x_lo, x_hi), std::clamp(s.v, v_lo, v_hi)};
  }
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

enum class StartZone { CentralThird, CentralQuarter };

inline Bounds central_zone(const Bounds& b, StartZone zone) {
  const double f = zone == StartZone::CentralThird ? 1.0 / 3.0 : 1.0 / 4.0;
  const double cx = 0.5 * (b.x_lo + b.x_hi), cv = 0.5 * (b.v_lo + b.v_hi);
  const double hx = 0.5 * b.width() * f, hv = 0.5 * b.height() * f;
  return {cx - hx, cx + hx, cv - hv, cv + hv};
}

inline State sample_start(StartZone zone, const Bounds& bounds, Rng& rng) {
  if (bounds.width() < 0 || bounds.height() < 0) throw InvalidConfig("inverted start bounds");
  const Bounds z = central_zone(bounds, zone);
  auto draw = [&rng](double lo, double hi) {
    if (hi <= lo) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const double x = draw(z.x_lo, z.x_hi);
  const double v = draw(z.v_lo, z.v_hi);
  return {x, v};
}

class PuckEnv {
 public:
  PuckEnv() = default;
  explicit PuckEnv(const EnvParams& params) : params_(params) { params_.validate(); }

  const EnvParams& params() const { return params_; }

  // Hill angle at x; positive on the left side of the hill.
  double theta(double x) const { return std::atan(-2.0 * params_.beta * x); }

  bool terminal(const State& s) const { return std::abs(s.x) >= params_.x_limit; }

  double force(Action a) const {
    return a == Action::PushRight ? params_.force_mag : -params_.force_mag;
  }

  // Explicit Euler step; the angle is taken from the current position.
  Transition step(const State& s, Action a) const {
    if (terminal(s)) throw ContractViolation("step() called from a terminal state");
    // sin and cos of atan(-u) in closed form. Library sin/cos and sincos can
    // disagree in the last bit, which would break exact mirror symmetry.
    const double u = 2.0 * params_.beta * s.x;
    const double r = std::sqrt(1.0 + u * u);
    const double sin_th = -u / r, cos_th = 1.0 / r;
    const double f = force(a);
    const double accel = (f - params_.mass * params_.g * sin_th) * cos_th / params_.mass;
    Transition t;
    t.next.x = s.x + params_.dt * s.v;
    t.next.v = s.v + params_.dt * accel;
    t.terminal = terminal(t.next);
    t.reward = t.terminal ? params_.fail_reward : 0.0;
    return t;
  }

 private:
  EnvParams params_;
};

static_assert(Environment<PuckEnv>);

// Position where full thrust exactly balances gravity; a stationary puck
// further out cannot climb back.
inline double equilibrium_x(const EnvParams& p) {
  const double ratio = p.force_mag / (p.mass * p.g);
  if (!(ratio < 1.0)) throw NoEquilibrium("thrust never balances gravity (force_mag >= m*g)");
  return std::abs(std::tan(std::asin(ratio)) / (-2.0 * p.beta));
}

// Re-derives the observed state-space extent from random-action trials started
// near the crest. Position extent is the wall; velocity extent is the largest
// |v| seen before failure, mirrored.
inline Bounds sweep_bounds(const PuckEnv& env, Rng& rng, int trials = 200, int max_steps = 100000) {
  double vmax = 0.0;
  const double xl = env.params().x_limit;
  for (int t = 0; t < trials; ++t) {
    State s{std::uniform_real_distribution<double>(-0.1 * xl, 0.1 * xl)(rng), 0.0};
    for (int k = 0; k < max_steps; ++k) {
      const Action a = coin(rng, 0.5) ? Action::PushRight : Action::PushLeft;
      const Transition tr = env.step(s, a);
      vmax = std::max(vmax, std::abs(tr.next.v));
      if (tr.terminal) break;
      s = tr.next;
    }
  }
  return {-xl, xl, -vmax, vmax};
}

}  // namespace cogecon
