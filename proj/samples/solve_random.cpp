// Generates a small random 3-SAT instance near the satisfiability threshold,
// solves it with IPBMR under a flip budget and compares against the exact
// optimum.

#include <iostream>

#include "ipbmr/ipbmr.hpp"

int main() {
  ipbmr::GeneratorSpec spec;
  spec.num_vars = 18;
  spec.num_clauses = 80;
  spec.seed = 42;
  const ipbmr::Formula formula = ipbmr::generate(spec);

  ipbmr::SolverConfig config;
  config.max_flips = 100000;
  config.seed = 1;
  ipbmr::RunObserver observer;
  observer.on_improvement = [](const ipbmr::Cost& cost, double seconds) {
    std::cout << "improved to " << cost << " after " << seconds << " s\n";
  };
  const ipbmr::RunResult result = ipbmr::run(formula, config, observer);
  const ipbmr::BruteForceResult exact = ipbmr::brute_force(formula);

  std::cout << "IPBMR: " << result.best_cost << " in " << result.pb_calls << " path-breaking calls, "
            << result.total_flips << " flips\n";
  std::cout << "exact: " << exact.cost << '\n';
  return result.best_cost == exact.cost ? 0 : 1;
}
