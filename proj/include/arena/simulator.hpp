#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/agents.hpp"
#include "arena/reasoners.hpp"

namespace arena {

enum class AgentKindSpec { Oracle, Random, Llm };
std::string to_string(AgentKindSpec kind);
AgentKindSpec agent_kind_from_string(const std::string& name);

struct AgentSpec {
    AgentKindSpec kind = AgentKindSpec::Oracle;
    ReasonerConfig reasoner;  // used when kind == Llm
};

struct EpisodeConfig {
    std::string name;  // preset or user label; recorded as config_ref
    GameState initial_state;
    PlayConvention convention = PlayConvention::Normal;
    ChompOrientation orientation = ChompOrientation::TopLeft;
    bool agent_moves_first = true;
    AgentSpec agent;
    AgentSpec opponent;
    int max_plies = 0;  // 0 = 4 x initial material backstop
    std::uint64_t seed = 0;
};

// The eight benchmark start configurations.
std::vector<EpisodeConfig> builtin_presets();
EpisodeConfig preset(const std::string& name);

enum class EpisodeOutcome { AgentWin, AgentLoss, Forfeit, PlyCap };
std::string to_string(EpisodeOutcome outcome);

struct PlyRecord {
    int player = 0;  // 0 = agent under test, 1 = opponent
    Move move;
    MoveDiagnostics diagnostics;
};

struct EpisodeRecord {
    std::string config_ref;
    GameState initial_state;
    PlayConvention convention = PlayConvention::Normal;
    ChompOrientation orientation = ChompOrientation::TopLeft;
    std::uint64_t seed = 0;
    std::vector<PlyRecord> plies;
    EpisodeOutcome outcome = EpisodeOutcome::AgentLoss;
    int forfeited_by = -1;  // player index on Forfeit, else -1
    std::size_t n_exchanges = 0;
};

nlohmann::json episode_to_json(const EpisodeRecord& record);
EpisodeRecord episode_from_json(const nlohmann::json& j);

// True iff replaying the plies from the initial state is legal throughout and
// ends in a state consistent with the recorded outcome.
bool replay_consistent(const EpisodeRecord& record);

struct SimulatorContext {
    std::shared_ptr<Gateway> gateway;  // required only for LLM agents
    std::shared_ptr<const TemplateCatalog> catalog;
};

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const SimulatorContext& ctx,
                                  std::uint64_t seed);

EpisodeRecord run_episode(const EpisodeConfig& config, const SimulatorContext& ctx);

struct WinRateReport {
    std::string config_ref;
    int n = 0;
    double win_rate = 0.0;
    int forfeits = 0;
    int ply_caps = 0;
    double mean_plies = 0.0;
    std::uint64_t base_seed = 0;
    std::vector<EpisodeOutcome> outcomes;  // indexed by episode
};

nlohmann::json report_to_json(const WinRateReport& report);

// Episode i runs with seed base_seed + i; aggregation is keyed by episode
// index, so the report is identical for any worker count.
WinRateReport run_match(const EpisodeConfig& config, int n_episodes,
                        std::uint64_t base_seed, const SimulatorContext& ctx,
                        int n_workers = 1,
                        std::vector<EpisodeRecord>* episodes_out = nullptr);

}  // namespace arena
