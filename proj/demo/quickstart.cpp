// Grow a representation from scratch, then score it with the independent
// tester against the diagonal split.

#include <iostream>

#include "cogecon/agent.hpp"
#include "cogecon/harness.hpp"

using namespace cogecon;

int main() {
  const PuckEnv env;
  AgentConfig agent;
  agent.seed = 4;
  StopRule stop;
  stop.success_steps = 100000;

  SessionResult gen = run_generation_session(env, agent, stop);
  std::cout << "generated " << gen.representation.region_count() << " regions in " << gen.log.trials.size()
            << " trials\n";

  TestConfig test;
  test.runs = 3;
  test.max_train_steps = 50000;
  const Comparison cmp = compare({{"generated", gen.representation}, {"diagonal", diagonal_split()}}, env, test);
  for (const auto& row : cmp.summary)
    std::cout << row.name << ": final median " << row.final_score << " over " << row.regions << " regions\n";
}
