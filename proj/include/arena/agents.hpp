#pragma once

#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "arena/game.hpp"
#include "arena/gateway.hpp"
#include "arena/solver.hpp"

namespace arena {

struct Observation {
    GameState state;
    PlayConvention convention = PlayConvention::Normal;
    std::vector<std::pair<int, Move>> move_history;  // (player index, move)
    std::string role_name = "Player";
    std::string game_config_ref;
    ChompOrientation orientation = ChompOrientation::TopLeft;
};

struct MoveDiagnostics {
    int parse_retries = 0;
    bool fallback_used = false;
    bool losing_position = false;  // oracle had no winning move
};

struct MoveDecision {
    Move move;
    std::vector<ChatExchange> transcripts;  // empty for non-LLM agents
    MoveDiagnostics diagnostics;
};

class Agent {
  public:
    virtual ~Agent() = default;
    virtual MoveDecision choose(const Observation& obs) = 0;
    virtual std::string name() const = 0;
};

// Plays perfectly from the Grundy/minimax solver; from losing positions it
// plays the deterministic fallback (first move in sort order).
class OracleAgent : public Agent {
  public:
    explicit OracleAgent(SolverOptions options = {}) : solver_(options) {}
    MoveDecision choose(const Observation& obs) override;
    std::string name() const override { return "oracle"; }

  private:
    Solver solver_;
};

// Uniform over legal moves with a private seeded generator.
class RandomAgent : public Agent {
  public:
    explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}
    MoveDecision choose(const Observation& obs) override;
    std::string name() const override { return "random"; }

  private:
    std::mt19937_64 rng_;
};

class Reasoner;

// Delegates to a reasoner pipeline and enforces move legality: an illegal or
// undecodable action is resampled up to 3 times, then replaced by a seeded
// random legal move with fallback_used set.
class LlmAgent : public Agent {
  public:
    LlmAgent(std::shared_ptr<Reasoner> reasoner, std::uint64_t fallback_seed,
             std::string agent_name = "llm");
    MoveDecision choose(const Observation& obs) override;
    std::string name() const override { return name_; }

    static constexpr int kMaxResamples = 3;

  private:
    std::shared_ptr<Reasoner> reasoner_;
    std::mt19937_64 fallback_rng_;
    std::string name_;
};

}  // namespace arena
