// Walks through the library: a classical equilibrium, best-response
// dynamics on a quantum game, and the nonlinearity of observable payoffs.
#include <iostream>

#include "qnash/qnash.hpp"

using namespace qnash;

int main() {
  const FiniteGame pennies = demos::matching_pennies();
  for (const auto& eq : support_enumeration_nash(pennies)) {
    std::cout << "matching pennies equilibrium: row (";
    std::cout << eq.profile.distributions[0][0] << ", " << eq.profile.distributions[0][1] << "), col (";
    std::cout << eq.profile.distributions[1][0] << ", " << eq.profile.distributions[1][1] << ")\n";
  }

  const QuantumGame bell = demos::bell_preparation_game();
  const DynamicsOutcome run = iterated_best_response(bell, random_play(bell, 7));
  std::cout << "bell game dynamics: " << run.kind() << " after " << run.iterations() << " sweeps\n";
  const auto verdict = verify_epsilon_nash_quantum(bell, run.final_play(), 1e-6, 100, 7);
  std::cout << "  epsilon-Nash at 1e-6: " << (accepted(verdict) ? "yes" : "no") << "\n";
  std::cout << "  payoff of player 1: " << payoff_value(bell, run.final_play(), 0) << "\n";

  const QuantumGame zero_sum = demos::observable_demo_game();
  const GridReport grid = grid_search_pure_nash(zero_sum, 16, 0.05);
  std::cout << "observable demo: " << grid.accepted << " of " << grid.total_plays
            << " grid plays are 0.05-Nash; smallest worst gain " << grid.min_max_gain << "\n";

  std::cout << "nonlinearity gap: " << demos::observable_nonlinearity_witness().gap() << "\n";
}
