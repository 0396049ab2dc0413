// Writes the fixed comparison representations into a directory:
//   diagonal.rep, grid10x10.rep, vrdp.rep, vrdp_enhanced.rep,
//   controllability.rep, seed2.rep

#include <filesystem>
#include <iostream>
#include <vector>

#include "cogecon/agent.hpp"
#include "cogecon/baselines.hpp"
#include "cogecon/partition.hpp"
#include "cogecon/puck.hpp"

namespace fs = std::filesystem;
using namespace cogecon;

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? argv[1] : "data";
  try {
    fs::create_directories(dir);
    const PuckEnv env;
    const Bounds bounds;

    // Trajectories standing in for the two experimental trials: one pushing
    // right until it hits the wall, and a long successful one under the
    // diagonal bang-bang policy.
    const auto failed = rollout(env, {0.0, 0.0}, [](const State&) { return Action::PushRight; }, 100000);
    const auto kept = rollout(env, {-0.8, 1.8},
                              [](const State& s) { return s.v + 1.7615 * s.x >= 0 ? Action::PushLeft : Action::PushRight; },
                              100000);
    std::vector<State> both = failed;
    both.insert(both.end(), kept.begin(), kept.end());

    // six halvings per axis: finest cells 4.8/64 by 11/64
    const Representation vrdp = boxes_of(refine_around(both, bounds, 6, true));
    const Representation enhanced = boxes_of(refine_around(kept, bounds, 6, false));
    const Representation quant = rectilinear({-2.4, -1.2, -0.6, -0.3, -0.1, 0.1, 0.3, 0.6, 1.2, 2.4},
                                             {-5.5, -3.0, -1.5, -0.75, -0.25, 0.25, 0.75, 1.5, 3.0, 5.5});

    const std::vector<std::pair<const char*, Representation>> out{
        {"diagonal.rep", diagonal_split()},        {"grid10x10.rep", uniform_grid()},
        {"vrdp.rep", vrdp},                        {"vrdp_enhanced.rep", enhanced},
        {"controllability.rep", quant},            {"seed2.rep", seed_representation()},
    };
    for (const auto& [file, rep] : out) {
      save_file(rep, (dir / file).string());
      std::cout << file << ": " << rep.region_count() << " regions\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
