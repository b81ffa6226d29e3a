#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "arena/game.hpp"

namespace arena {

enum class PositionLabel { Loss, Win };

struct StateSpaceBudgetExceeded : std::runtime_error {
    StateSpaceBudgetExceeded(std::size_t budget)
        : std::runtime_error("state-space node budget of " + std::to_string(budget) +
                             " exhausted") {}
};

struct SolverOptions {
    std::size_t node_budget = 5'000'000;
};

struct OptimalResult {
    bool losing_position = false;
    std::vector<Move> moves;  // winning moves, or the single fallback when losing
};

int mex(const std::set<int>& values);

// Exact game-value oracle. Ground truth is full-enumeration recursion over
// the game DAG with memoization; closed forms below are cross-checked
// accelerators only.
class Solver {
  public:
    explicit Solver(SolverOptions options = {}) : options_(options) {}

    // Normal-play Grundy value via disjunctive-sum decomposition.
    int grundy(const GameState& state);

    // Win/Loss for the player to move, any convention.
    PositionLabel label_minimax(const GameState& state, PlayConvention convention);

    // Normal play: moves whose successor has Grundy 0. Misere/Poison:
    // moves to Loss-labeled successors. Losing positions return the
    // minimal legal move as fallback.
    OptimalResult optimal_moves(const GameState& state, PlayConvention convention);

    std::size_t nodes_expanded() const { return nodes_; }
    void clear_cache();

  private:
    int component_grundy(const GameState& component);
    void charge_node();

    SolverOptions options_;
    std::size_t nodes_ = 0;
    std::unordered_map<std::string, int> grundy_cache_;
    std::unordered_map<std::string, PositionLabel> label_cache_;
};

// Independent subgames: Nim piles, Kayles runs of standing pins;
// Fibonacci and Chomp do not decompose.
std::vector<GameState> decompose(const GameState& state);

int grundy_sum(const std::vector<int>& components);

int nim_sum(const std::vector<int>& piles);
int nim_pile_grundy(int n, int max_take);

// Fibonacci terms with F1=1, F2=2; strictly decreasing, non-consecutive.
std::vector<long long> zeckendorf(long long n);
bool is_fibonacci(long long n);

struct FibOpening {
    bool losing_position = false;
    int take = 0;  // smallest Zeckendorf term when winning
};
FibOpening fibonacci_optimal_opening(int n);

// G(0..n_max) for single all-standing rows, by full move enumeration.
std::vector<int> kayles_grundy_sequence(int n_max, Solver& solver);

// The bite that leaves a symmetric L on a full n x n grid (n >= 2).
ChompMove chomp_square_opening(int n);

std::string state_key(const GameState& state);

}  // namespace arena
