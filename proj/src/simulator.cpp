#include "arena/simulator.hpp"

#include <algorithm>
#include <thread>

#include "arena/store.hpp"

namespace arena {

using nlohmann::json;

std::string to_string(AgentKindSpec kind) {
    switch (kind) {
        case AgentKindSpec::Oracle: return "oracle";
        case AgentKindSpec::Random: return "random";
        case AgentKindSpec::Llm: return "llm";
    }
    return "?";
}

AgentKindSpec agent_kind_from_string(const std::string& name) {
    if (name == "oracle") return AgentKindSpec::Oracle;
    if (name == "random") return AgentKindSpec::Random;
    if (name == "llm") return AgentKindSpec::Llm;
    throw std::invalid_argument("unknown agent kind: " + name);
}

std::string to_string(EpisodeOutcome outcome) {
    switch (outcome) {
        case EpisodeOutcome::AgentWin: return "agent_win";
        case EpisodeOutcome::AgentLoss: return "agent_loss";
        case EpisodeOutcome::Forfeit: return "forfeit";
        case EpisodeOutcome::PlyCap: return "ply_cap";
    }
    return "?";
}

std::vector<EpisodeConfig> builtin_presets() {
    std::vector<EpisodeConfig> presets;
    auto add = [&presets](std::string name, GameState state, PlayConvention convention,
                          ChompOrientation orientation = ChompOrientation::TopLeft) {
        EpisodeConfig c;
        c.name = std::move(name);
        c.initial_state = std::move(state);
        c.convention = convention;
        c.orientation = orientation;
        presets.push_back(std::move(c));
    };
    add("nim-normal", NimState{{31}, 3}, PlayConvention::Normal);
    add("nim-misere", NimState{{31}, 3}, PlayConvention::Misere);
    add("fib-normal", FibState{20, 19}, PlayConvention::Normal);
    add("fib-misere", FibState{20, 19}, PlayConvention::Misere);
    add("kayles-single", KaylesState{{std::vector<std::uint8_t>(20, 1)}},
        PlayConvention::Normal);
    add("kayles-2rows",
        KaylesState{{std::vector<std::uint8_t>(5, 1), std::vector<std::uint8_t>(6, 1)}},
        PlayConvention::Normal);
    add("chomp-rect", ChompState{std::vector<int>(8, 2), 2, 8}, PlayConvention::Poison,
        ChompOrientation::TopLeft);
    add("chomp-square", ChompState{std::vector<int>(5, 5), 5, 5},
        PlayConvention::Poison, ChompOrientation::TopRight);
    return presets;
}

EpisodeConfig preset(const std::string& name) {
    for (auto& p : builtin_presets())
        if (p.name == name) return p;
    throw std::invalid_argument("unknown preset: " + name);
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const SimulatorContext& ctx,
                                  std::uint64_t seed) {
    switch (spec.kind) {
        case AgentKindSpec::Oracle: return std::make_unique<OracleAgent>();
        case AgentKindSpec::Random: return std::make_unique<RandomAgent>(seed);
        case AgentKindSpec::Llm: {
            if (!ctx.gateway || !ctx.catalog)
                throw std::invalid_argument(
                    "llm agent needs a gateway and template catalog");
            ReasonerConfig config = spec.reasoner;
            config.seed = seed;
            auto reasoner = std::make_shared<Reasoner>(config, ctx.gateway, ctx.catalog);
            return std::make_unique<LlmAgent>(std::move(reasoner), seed,
                                              to_string(config.kind));
        }
    }
    throw std::logic_error("unreachable agent kind");
}

EpisodeRecord run_episode(const EpisodeConfig& config, const SimulatorContext& ctx) {
    EpisodeRecord record;
    record.config_ref = config.name;
    record.initial_state = config.initial_state;
    record.convention = config.convention;
    record.orientation = config.orientation;
    record.seed = config.seed;

    auto agent = make_agent(config.agent, ctx, config.seed * 2 + 1);
    auto opponent = make_agent(config.opponent, ctx, config.seed * 2 + 2);

    const int max_plies =
        config.max_plies > 0 ? config.max_plies
                             : 4 * std::max(1, total_material(config.initial_state));

    GameState state = config.initial_state;
    int mover = config.agent_moves_first ? 0 : 1;
    while (!is_terminal(state, config.convention)) {
        if (static_cast<int>(record.plies.size()) >= max_plies) {
            record.outcome = EpisodeOutcome::PlyCap;  // engine-bug backstop
            return record;
        }
        Observation obs;
        obs.state = state;
        obs.convention = config.convention;
        obs.orientation = config.orientation;
        obs.role_name = mover == 0 ? "Player 1" : "Player 2";
        obs.game_config_ref = config.name;
        for (const auto& ply : record.plies)
            obs.move_history.emplace_back(ply.player, ply.move);
        MoveDecision decision;
        try {
            decision = (mover == 0 ? *agent : *opponent).choose(obs);
        } catch (const GatewayFailure&) {
            record.outcome = EpisodeOutcome::Forfeit;
            record.forfeited_by = mover;
            return record;
        }
        record.n_exchanges += decision.transcripts.size();
        state = arena::apply(state, decision.move);
        record.plies.push_back({mover, decision.move, decision.diagnostics});
        mover = 1 - mover;
    }
    const int winner =
        outcome(state, config.convention) == Winner::Mover ? mover : 1 - mover;
    record.outcome = winner == 0 ? EpisodeOutcome::AgentWin : EpisodeOutcome::AgentLoss;
    return record;
}

json episode_to_json(const EpisodeRecord& record) {
    json plies = json::array();
    for (const auto& ply : record.plies)
        plies.push_back(json{{"player", ply.player},
                             {"move", move_to_json(ply.move)},
                             {"parse_retries", ply.diagnostics.parse_retries},
                             {"fallback_used", ply.diagnostics.fallback_used},
                             {"losing_position", ply.diagnostics.losing_position}});
    return json{{"config_ref", record.config_ref},
                {"initial_state", state_to_json(record.initial_state)},
                {"convention", to_string(record.convention)},
                {"orientation", to_string(record.orientation)},
                {"seed", record.seed},
                {"plies", plies},
                {"outcome", to_string(record.outcome)},
                {"forfeited_by", record.forfeited_by},
                {"n_exchanges", record.n_exchanges}};
}

EpisodeRecord episode_from_json(const json& j) {
    EpisodeRecord record;
    j.at("config_ref").get_to(record.config_ref);
    record.initial_state = state_from_json(j.at("initial_state"));
    record.convention = convention_from_string(j.at("convention").get<std::string>());
    record.orientation = orientation_from_string(j.at("orientation").get<std::string>());
    j.at("seed").get_to(record.seed);
    for (const auto& ply : j.at("plies")) {
        PlyRecord p;
        ply.at("player").get_to(p.player);
        p.move = move_from_json(ply.at("move"));
        ply.at("parse_retries").get_to(p.diagnostics.parse_retries);
        ply.at("fallback_used").get_to(p.diagnostics.fallback_used);
        ply.at("losing_position").get_to(p.diagnostics.losing_position);
        record.plies.push_back(std::move(p));
    }
    const std::string outcome_name = j.at("outcome").get<std::string>();
    for (auto o : {EpisodeOutcome::AgentWin, EpisodeOutcome::AgentLoss,
                   EpisodeOutcome::Forfeit, EpisodeOutcome::PlyCap})
        if (to_string(o) == outcome_name) record.outcome = o;
    j.at("forfeited_by").get_to(record.forfeited_by);
    j.at("n_exchanges").get_to(record.n_exchanges);
    return record;
}

bool replay_consistent(const EpisodeRecord& record) {
    GameState state = record.initial_state;
    int expected_mover = record.plies.empty() ? 0 : record.plies.front().player;
    for (const auto& ply : record.plies) {
        if (ply.player != expected_mover) return false;
        if (!is_legal(state, ply.move)) return false;
        state = arena::apply(state, ply.move);
        expected_mover = 1 - expected_mover;
    }
    if (record.outcome == EpisodeOutcome::Forfeit ||
        record.outcome == EpisodeOutcome::PlyCap)
        return !is_terminal(state, record.convention) || record.plies.empty();
    if (!is_terminal(state, record.convention)) return false;
    const int winner = outcome(state, record.convention) == Winner::Mover
                           ? expected_mover
                           : 1 - expected_mover;
    return (winner == 0) == (record.outcome == EpisodeOutcome::AgentWin);
}

json report_to_json(const WinRateReport& report) {
    json outcomes = json::array();
    for (auto o : report.outcomes) outcomes.push_back(to_string(o));
    return json{{"config_ref", report.config_ref}, {"n", report.n},
                {"win_rate", report.win_rate},     {"forfeits", report.forfeits},
                {"ply_caps", report.ply_caps},     {"mean_plies", report.mean_plies},
                {"base_seed", report.base_seed},   {"outcomes", outcomes}};
}

WinRateReport run_match(const EpisodeConfig& config, int n_episodes,
                        std::uint64_t base_seed, const SimulatorContext& ctx,
                        int n_workers, std::vector<EpisodeRecord>* episodes_out) {
    std::vector<EpisodeRecord> episodes(n_episodes);
    auto run_range = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            EpisodeConfig c = config;
            c.seed = base_seed + static_cast<std::uint64_t>(i);
            episodes[i] = run_episode(c, ctx);
        }
    };
    n_workers = std::max(1, std::min(n_workers, n_episodes));
    if (n_workers == 1) {
        run_range(0, n_episodes);
    } else {
        std::vector<std::thread> workers;
        const int chunk = (n_episodes + n_workers - 1) / n_workers;
        for (int w = 0; w < n_workers; ++w)
            workers.emplace_back(run_range, w * chunk,
                                 std::min(n_episodes, (w + 1) * chunk));
        for (auto& worker : workers) worker.join();
    }

    WinRateReport report;
    report.config_ref = config.name;
    report.n = n_episodes;
    report.base_seed = base_seed;
    long long total_plies = 0;
    int wins = 0;
    for (const auto& episode : episodes) {
        report.outcomes.push_back(episode.outcome);
        total_plies += static_cast<long long>(episode.plies.size());
        switch (episode.outcome) {
            case EpisodeOutcome::AgentWin: ++wins; break;
            case EpisodeOutcome::Forfeit: ++report.forfeits; break;
            case EpisodeOutcome::PlyCap: ++report.ply_caps; break;
            default: break;
        }
    }
    report.win_rate = n_episodes > 0 ? static_cast<double>(wins) / n_episodes : 0.0;
    report.mean_plies =
        n_episodes > 0 ? static_cast<double>(total_plies) / n_episodes : 0.0;
    if (episodes_out != nullptr) *episodes_out = std::move(episodes);
    return report;
}

}  // namespace arena
