#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "arena/simulator.hpp"
#include "arena/solver.hpp"
#include "arena/store.hpp"

using namespace arena;

namespace {

const SimulatorContext kNoLlm{};

EpisodeConfig vs(const std::string& preset_name, AgentKindSpec agent,
                 AgentKindSpec opponent, std::uint64_t seed = 0) {
    EpisodeConfig c = preset(preset_name);
    c.agent.kind = agent;
    c.opponent.kind = opponent;
    c.seed = seed;
    return c;
}

SimulatorContext scripted_context(
    std::function<std::string(const ChatRequest&)> responder) {
    SimulatorContext ctx;
    ctx.gateway =
        std::make_shared<Gateway>(std::make_shared<ScriptedBackend>(std::move(responder)));
    ctx.catalog = std::make_shared<const TemplateCatalog>(TemplateCatalog::builtin());
    return ctx;
}

}  // namespace

TEST_CASE("the eight presets match the benchmark start configurations") {
    const auto presets = builtin_presets();
    REQUIRE(presets.size() == 8);
    CHECK(preset("nim-normal").initial_state == GameState{NimState{{31}, 3}});
    CHECK(preset("nim-misere").convention == PlayConvention::Misere);
    CHECK(preset("fib-normal").initial_state == GameState{FibState{20, 19}});
    CHECK(preset("fib-misere").convention == PlayConvention::Misere);
    CHECK(total_material(preset("kayles-single").initial_state) == 20);
    const auto tworows = std::get<KaylesState>(preset("kayles-2rows").initial_state);
    REQUIRE(tworows.rows.size() == 2);
    CHECK(tworows.rows[0].size() == 5);
    CHECK(tworows.rows[1].size() == 6);
    const auto rect = std::get<ChompState>(preset("chomp-rect").initial_state);
    CHECK(rect.n_rows == 2);
    CHECK(rect.n_cols == 8);
    CHECK(preset("chomp-rect").orientation == ChompOrientation::TopLeft);
    const auto square = std::get<ChompState>(preset("chomp-square").initial_state);
    CHECK(square.n_rows == 5);
    CHECK(preset("chomp-square").orientation == ChompOrientation::TopRight);
    for (const auto& p : presets) CHECK(p.agent_moves_first);
    CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
}

TEST_CASE("oracle vs oracle outcome equals the start label on every preset") {
    Solver solver;
    for (const auto& p : builtin_presets()) {
        EpisodeConfig c = p;
        c.agent.kind = AgentKindSpec::Oracle;
        c.opponent.kind = AgentKindSpec::Oracle;
        const auto record = run_episode(c, kNoLlm);
        const bool first_wins =
            solver.label_minimax(p.initial_state, p.convention) == PositionLabel::Win;
        CHECK(record.outcome == (first_wins ? EpisodeOutcome::AgentWin
                                            : EpisodeOutcome::AgentLoss));
        CHECK(replay_consistent(record));
    }
}

TEST_CASE("oracle first mover wins nim-normal and fib-normal") {
    for (const std::string name : {"nim-normal", "fib-normal"}) {
        const auto record =
            run_episode(vs(name, AgentKindSpec::Oracle, AgentKindSpec::Oracle), kNoLlm);
        CHECK(record.outcome == EpisodeOutcome::AgentWin);
    }
}

TEST_CASE("oracle beats random on kayles-2rows for every seed") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto record = run_episode(
            vs("kayles-2rows", AgentKindSpec::Oracle, AgentKindSpec::Random, seed),
            kNoLlm);
        CHECK(record.outcome == EpisodeOutcome::AgentWin);  // G(5) xor G(6) != 0
    }
}

TEST_CASE("episodes terminate within the material bound") {
    for (const auto& p : builtin_presets()) {
        EpisodeConfig c = p;
        c.agent.kind = AgentKindSpec::Random;
        c.opponent.kind = AgentKindSpec::Random;
        c.seed = 11;
        const auto record = run_episode(c, kNoLlm);
        CHECK(static_cast<int>(record.plies.size()) <=
              total_material(p.initial_state));
        CHECK((record.outcome == EpisodeOutcome::AgentWin ||
               record.outcome == EpisodeOutcome::AgentLoss));
    }
}

TEST_CASE("run_match derives per-episode seeds and aggregates") {
    const auto report = run_match(
        vs("nim-normal", AgentKindSpec::Oracle, AgentKindSpec::Random), 50, 7, kNoLlm);
    CHECK(report.n == 50);
    CHECK(report.win_rate == 1.0);
    CHECK(report.forfeits == 0);
    CHECK(report.outcomes.size() == 50);
    CHECK(report.mean_plies > 0.0);
}

TEST_CASE("single-episode match equals that episode's outcome") {
    const auto config = vs("nim-normal", AgentKindSpec::Oracle, AgentKindSpec::Oracle);
    const auto report = run_match(config, 1, 3, kNoLlm);
    EpisodeConfig c = config;
    c.seed = 3;
    const auto record = run_episode(c, kNoLlm);
    CHECK(report.win_rate ==
          (record.outcome == EpisodeOutcome::AgentWin ? 1.0 : 0.0));
}

TEST_CASE("random-vs-random win rate matches the exact expectation") {
    // Exact first-mover win probability under uniform random play,
    // single pile of n with up to 3 per take.
    std::vector<double> p(7, 0.0);
    for (int n = 1; n <= 6; ++n) {
        const int takes = std::min(3, n);
        double sum = 0.0;
        for (int c = 1; c <= takes; ++c) sum += (n - c == 0) ? 1.0 : 1.0 - p[n - c];
        p[n] = sum / takes;
    }
    EpisodeConfig config = vs("nim-normal", AgentKindSpec::Random,
                              AgentKindSpec::Random);
    config.initial_state = NimState{{6}, 3};
    const int n = 2000;
    const auto report = run_match(config, n, 123, kNoLlm);
    const double sigma = std::sqrt(p[6] * (1 - p[6]) / n);
    CHECK(std::abs(report.win_rate - p[6]) < 3.5 * sigma);
}

TEST_CASE("mirror test: swapping sides flips a deterministic result") {
    EpisodeConfig forward = vs("nim-normal", AgentKindSpec::Oracle,
                               AgentKindSpec::Oracle);
    EpisodeConfig mirrored = forward;
    std::swap(mirrored.agent, mirrored.opponent);
    mirrored.agent_moves_first = false;
    const auto a = run_match(forward, 10, 1, kNoLlm);
    const auto b = run_match(mirrored, 10, 1, kNoLlm);
    CHECK(a.win_rate == 1.0 - b.win_rate);
}

TEST_CASE("reports are invariant to worker count") {
    const auto config = vs("nim-normal", AgentKindSpec::Oracle, AgentKindSpec::Random);
    std::vector<EpisodeRecord> serial, parallel;
    const auto a = run_match(config, 24, 9, kNoLlm, 1, &serial);
    const auto b = run_match(config, 24, 9, kNoLlm, 6, &parallel);
    CHECK(report_to_json(a) == report_to_json(b));
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i)
        CHECK(episode_to_json(serial[i]) == episode_to_json(parallel[i]));
}

TEST_CASE("llm agent episodes run through the scripted gateway") {
    auto ctx = scripted_context([](const ChatRequest& request) {
        // Take enough to leave a multiple of 4 when possible, else 1.
        const std::string& prompt = request.messages.back().content;
        const auto pos = prompt.find(" items remaining");
        int remaining = 0;
        if (pos != std::string::npos) {
            auto start = prompt.rfind(' ', pos - 1);
            remaining = std::stoi(prompt.substr(start + 1, pos - start - 1));
        }
        const int take = remaining % 4 == 0 ? 1 : remaining % 4;
        return "```json\n{\"action\": " + std::to_string(take) + "}\n```";
    });
    EpisodeConfig config = vs("nim-normal", AgentKindSpec::Llm, AgentKindSpec::Oracle);
    config.agent.reasoner.kind = ReasonerKind::Standard;
    const auto record = run_episode(config, ctx);
    CHECK(record.outcome == EpisodeOutcome::AgentWin);  // optimal script, winning start
    CHECK(record.n_exchanges > 0);
    CHECK(replay_consistent(record));
}

TEST_CASE("gateway failure forfeits the failing side") {
    auto ctx = scripted_context([](const ChatRequest&) -> std::string {
        throw GatewayFailure(GatewayFailure::Kind::Auth, "scripted outage");
    });
    EpisodeConfig config = vs("nim-normal", AgentKindSpec::Llm, AgentKindSpec::Oracle);
    const auto record = run_episode(config, ctx);
    CHECK(record.outcome == EpisodeOutcome::Forfeit);
    CHECK(record.forfeited_by == 0);
    CHECK(record.plies.empty());

    EpisodeConfig flipped = vs("nim-normal", AgentKindSpec::Oracle, AgentKindSpec::Llm);
    const auto record2 = run_episode(flipped, ctx);
    CHECK(record2.outcome == EpisodeOutcome::Forfeit);
    CHECK(record2.forfeited_by == 1);
    CHECK(record2.plies.size() == 1);
}

TEST_CASE("episode records roundtrip through JSON") {
    const auto record = run_episode(
        vs("kayles-2rows", AgentKindSpec::Oracle, AgentKindSpec::Random, 5), kNoLlm);
    const auto back = episode_from_json(episode_to_json(record));
    CHECK(episode_to_json(back) == episode_to_json(record));
    CHECK(replay_consistent(back));
}

TEST_CASE("tampered records fail the replay check") {
    auto record = run_episode(
        vs("nim-normal", AgentKindSpec::Oracle, AgentKindSpec::Oracle), kNoLlm);
    REQUIRE(replay_consistent(record));
    auto flipped = record;
    flipped.outcome = flipped.outcome == EpisodeOutcome::AgentWin
                          ? EpisodeOutcome::AgentLoss
                          : EpisodeOutcome::AgentWin;
    CHECK_FALSE(replay_consistent(flipped));
    auto truncated = record;
    truncated.plies.pop_back();
    CHECK_FALSE(replay_consistent(truncated));
}
