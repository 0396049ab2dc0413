#include <gtest/gtest.h>

#include <cmath>

#include "cogecon/puck.hpp"

using namespace cogecon;

TEST(Theta, ZeroAtHilltop) { EXPECT_EQ(PuckEnv{}.theta(0.0), 0.0); }

TEST(Theta, RightSlope) {
  // atan(-0.6)
  EXPECT_NEAR(PuckEnv{}.theta(1.0), -0.540420, 1e-6);
}

TEST(Theta, OddSymmetry) {
  const PuckEnv env;
  EXPECT_NEAR(env.theta(-1.0), 0.540420, 1e-6);
  EXPECT_EQ(env.theta(-1.0), -env.theta(1.0));
}

TEST(Step, PushRightFromOrigin) {
  const Transition t = PuckEnv{}.step({0.0, 0.0}, Action::PushRight);
  EXPECT_EQ(t.next.x, 0.0);
  EXPECT_NEAR(t.next.v, 0.06, 1e-12);
  EXPECT_EQ(t.reward, 0.0);
  EXPECT_FALSE(t.terminal);
}

TEST(Step, PushRightOnSlope) {
  // sin(theta) = -0.514496, cos(theta) = 0.857493 at x = 1
  const double s = -0.6 / std::sqrt(1.36), c = 1.0 / std::sqrt(1.36);
  const double accel = (3.0 - 9.8 * s) * c;
  const Transition t = PuckEnv{}.step({1.0, 0.0}, Action::PushRight);
  EXPECT_EQ(t.next.x, 1.0);
  EXPECT_NEAR(t.next.v, 0.02 * accel, 1e-12);
  EXPECT_NEAR(t.next.v, 0.137919, 2e-6);  // hand value, rounded
}

TEST(Step, WallIsTerminal) {
  const PuckEnv env;
  for (Action a : kActions) {
    const Transition t = env.step({2.399, 1.0}, a);
    EXPECT_NEAR(t.next.x, 2.419, 1e-12);
    EXPECT_TRUE(t.terminal);
    EXPECT_EQ(t.reward, -1.0);
  }
}

TEST(Step, ExactlyAtLimitIsTerminal) {
  const PuckEnv env;
  EXPECT_TRUE(env.terminal({2.4, 0.0}));
  EXPECT_TRUE(env.terminal({-2.4, 0.0}));
  EXPECT_FALSE(env.terminal({2.3999999, 0.0}));
}

TEST(Step, FromTerminalIsContractViolation) {
  EXPECT_THROW(PuckEnv{}.step({2.5, 0.0}, Action::PushLeft), ContractViolation);
}

TEST(Step, Deterministic) {
  const PuckEnv env;
  const State s{0.3141, -1.2718};
  const Transition a = env.step(s, Action::PushLeft), b = env.step(s, Action::PushLeft);
  EXPECT_EQ(a.next, b.next);
  EXPECT_EQ(a.reward, b.reward);
  EXPECT_EQ(a.terminal, b.terminal);
}

TEST(Step, TerminalClosure) {
  const PuckEnv env;
  Rng rng(5);
  std::uniform_real_distribution<double> x(-2.39, 2.39), v(-5.5, 5.5);
  for (int i = 0; i < 2000; ++i) {
    const Transition t = env.step({x(rng), v(rng)}, i % 2 ? Action::PushLeft : Action::PushRight);
    EXPECT_EQ(t.terminal, std::abs(t.next.x) >= 2.4);
    EXPECT_EQ(t.reward, t.terminal ? -1.0 : 0.0);
  }
}

TEST(Step, GravityWinsBeyondEquilibrium) {
  const PuckEnv env;
  State s{equilibrium_x(env.params()) + 0.01, 0.0};
  double prev_v = s.v;
  for (int i = 0; i < 1000; ++i) {
    const Transition t = env.step(s, Action::PushLeft);  // uphill on the right side
    ASSERT_GT(t.next.v, prev_v) << "step " << i;
    if (t.terminal) break;
    prev_v = t.next.v;
    s = t.next;
  }
}

TEST(Equilibrium, Defaults) {
  const double x = equilibrium_x(EnvParams{});
  EXPECT_NEAR(x, 0.536, 5e-4);
  EXPECT_NEAR(x, std::tan(std::asin(3.0 / 9.8)) / 0.6, 1e-12);
}

TEST(Equilibrium, VanishingForce) {
  EnvParams p;
  p.force_mag = 1e-12;
  EXPECT_NEAR(equilibrium_x(p), 0.0, 1e-12);
}

TEST(Equilibrium, ThrustersDominate) {
  EnvParams p;
  p.force_mag = 9.8;
  EXPECT_THROW(equilibrium_x(p), NoEquilibrium);
  p.force_mag = 20.0;
  EXPECT_THROW(equilibrium_x(p), NoEquilibrium);
}

TEST(EnvParams, Validation) {
  EnvParams p;
  p.dt = 0;
  EXPECT_THROW(p.validate(), InvalidConfig);
  p = {};
  p.beta = -1;
  EXPECT_THROW(p.validate(), InvalidConfig);
  p = {};
  p.force_mag = 0;
  EXPECT_THROW(p.validate(), InvalidConfig);
  p = {};
  p.x_limit = 0;
  EXPECT_THROW(p.validate(), InvalidConfig);
  EXPECT_THROW(PuckEnv{p}, InvalidConfig);
}

TEST(SampleStart, CentralThird) {
  const Bounds b;
  const Bounds z = central_zone(b, StartZone::CentralThird);
  EXPECT_NEAR(z.x_lo, -0.8, 1e-12);
  EXPECT_NEAR(z.x_hi, 0.8, 1e-12);
  EXPECT_NEAR(z.v_lo, -11.0 / 6, 1e-12);
  EXPECT_NEAR(z.v_hi, 11.0 / 6, 1e-12);
  Rng rng(1);
  double xmin = 1, xmax = -1;
  for (int i = 0; i < 5000; ++i) {
    const State s = sample_start(StartZone::CentralThird, b, rng);
    ASSERT_TRUE(z.contains(s));
    ASSERT_FALSE(PuckEnv{}.terminal(s));
    xmin = std::min(xmin, s.x);
    xmax = std::max(xmax, s.x);
  }
  EXPECT_LT(xmin, -0.75);
  EXPECT_GT(xmax, 0.75);
}

TEST(SampleStart, CentralQuarter) {
  const Bounds z = central_zone(Bounds{}, StartZone::CentralQuarter);
  EXPECT_NEAR(z.x_lo, -0.6, 1e-12);
  EXPECT_NEAR(z.x_hi, 0.6, 1e-12);
  EXPECT_NEAR(z.v_lo, -1.375, 1e-12);
  EXPECT_NEAR(z.v_hi, 1.375, 1e-12);
  Rng rng(2);
  for (int i = 0; i < 2000; ++i) ASSERT_TRUE(z.contains(sample_start(StartZone::CentralQuarter, Bounds{}, rng)));
}

TEST(SampleStart, DegenerateBoundsGiveCentre) {
  const Bounds b{0.5, 0.5, -1.0, -1.0};
  Rng rng(3);
  const State s = sample_start(StartZone::CentralThird, b, rng);
  EXPECT_EQ(s.x, 0.5);
  EXPECT_EQ(s.v, -1.0);
}

TEST(SweepBounds, SymmetricAndFinite) {
  Rng rng(4);
  const Bounds b = sweep_bounds(PuckEnv{}, rng, 50, 5000);
  EXPECT_EQ(b.x_lo, -2.4);
  EXPECT_EQ(b.x_hi, 2.4);
  EXPECT_EQ(b.v_lo, -b.v_hi);
  EXPECT_GT(b.v_hi, 0.5);
  EXPECT_TRUE(std::isfinite(b.v_hi));
}

TEST(Actions, OppositeAndNames) {
  EXPECT_EQ(opposite(Action::PushLeft), Action::PushRight);
  EXPECT_EQ(opposite(Action::PushRight), Action::PushLeft);
  EXPECT_EQ(PuckEnv{}.force(Action::PushRight), 3.0);
  EXPECT_EQ(PuckEnv{}.force(Action::PushLeft), -3.0);
  EXPECT_EQ(kNumActions, 2u);
}
