#include "arena/agents.hpp"

#include <algorithm>

#include "arena/prompts.hpp"
#include "arena/reasoners.hpp"

namespace arena {

namespace {

// Full n x n Chomp boards beyond exhaustive reach: the symmetric-L strategy
// labels them winning with the diagonal bite, no enumeration needed.
std::optional<Move> large_square_shortcut(const GameState& state) {
    const auto* chomp = std::get_if<ChompState>(&state);
    if (chomp == nullptr || chomp->n_rows != chomp->n_cols || chomp->n_rows < 8)
        return std::nullopt;
    for (int h : chomp->col_heights)
        if (h != chomp->n_rows) return std::nullopt;
    return Move{chomp_square_opening(chomp->n_rows)};
}

}  // namespace

MoveDecision OracleAgent::choose(const Observation& obs) {
    if (obs.convention != PlayConvention::Misere) {
        if (auto shortcut = large_square_shortcut(obs.state)) {
            MoveDecision d;
            d.move = *shortcut;
            return d;
        }
    }
    const OptimalResult result = solver_.optimal_moves(obs.state, obs.convention);
    MoveDecision d;
    d.move = result.moves.front();
    d.diagnostics.losing_position = result.losing_position;
    return d;
}

MoveDecision RandomAgent::choose(const Observation& obs) {
    const auto moves = legal_moves(obs.state);
    if (moves.empty()) throw IllegalMove("no legal moves: position is terminal");
    std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
    MoveDecision d;
    d.move = moves[pick(rng_)];
    return d;
}

LlmAgent::LlmAgent(std::shared_ptr<Reasoner> reasoner, std::uint64_t fallback_seed,
                   std::string agent_name)
    : reasoner_(std::move(reasoner)),
      fallback_rng_(fallback_seed),
      name_(std::move(agent_name)) {
    if (!reasoner_) throw std::invalid_argument("llm agent needs a reasoner");
}

MoveDecision LlmAgent::choose(const Observation& obs) {
    MoveDecision d;
    for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
        try {
            Decision decision = reasoner_->decide(obs);
            d.transcripts.insert(d.transcripts.end(), decision.transcripts.begin(),
                                 decision.transcripts.end());
            const Move move = decode_move(decision.action, obs.state, obs.orientation);
            if (!is_legal(obs.state, move)) throw UndecodableAction("illegal move");
            d.move = move;
            d.diagnostics.parse_retries = attempt;
            return d;
        } catch (const PromptError&) {
            ++d.diagnostics.parse_retries;
        } catch (const ReasonerError&) {
            ++d.diagnostics.parse_retries;
        }
    }
    const auto moves = legal_moves(obs.state);
    if (moves.empty()) throw IllegalMove("no legal moves: position is terminal");
    std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
    d.move = moves[pick(fallback_rng_)];
    d.diagnostics.fallback_used = true;
    return d;
}

}  // namespace arena
