// Print a coarse picture of the controllable band and its must-push edges:
// L = must push left, R = must push right, . = don't care, blank = doomed.

#include <iostream>

#include "cogecon/task_analysis.hpp"

using namespace cogecon;

int main() {
  const PuckEnv env;
  const ViabilityGrid grid = viability_map(env);
  for (double v = 3.0; v >= -3.0; v -= 0.25) {
    for (double x = -2.0; x <= 2.0; x += 0.05) {
      switch (classify_critical(grid, {x, v})) {
        case CriticalClass::MustPushLeft: std::cout << 'L'; break;
        case CriticalClass::MustPushRight: std::cout << 'R'; break;
        case CriticalClass::DontCare: std::cout << '.'; break;
        case CriticalClass::Doomed: std::cout << ' '; break;
      }
    }
    std::cout << '\n';
  }
  std::cout << "diagonal split: " << validate_representation(grid, diagonal_split()).violations << " violations\n";
}
