#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "arena/agents.hpp"
#include "arena/reasoners.hpp"

using namespace arena;

namespace {

Observation observe(GameState state,
                    PlayConvention convention = PlayConvention::Normal) {
    Observation obs;
    obs.state = std::move(state);
    obs.convention = convention;
    obs.role_name = "Player 1";
    return obs;
}

// Plays a full episode; returns the index (0 or 1) of the winning player.
int play(Agent& first, Agent& second, GameState start, PlayConvention convention) {
    GameState state = std::move(start);
    int to_move = 0;
    while (!is_terminal(state, convention)) {
        Agent& agent = to_move == 0 ? first : second;
        Observation obs = observe(state, convention);
        state = arena::apply(state, agent.choose(obs).move);
        to_move = 1 - to_move;
    }
    // outcome() names the winner relative to the player now to move.
    return outcome(state, convention) == Winner::Mover ? to_move : 1 - to_move;
}

std::shared_ptr<Reasoner> scripted_reasoner(
    std::function<std::string(const ChatRequest&)> responder,
    ReasonerKind kind = ReasonerKind::Standard) {
    ReasonerConfig config;
    config.kind = kind;
    auto gateway =
        std::make_shared<Gateway>(std::make_shared<ScriptedBackend>(std::move(responder)));
    auto catalog = std::make_shared<const TemplateCatalog>(TemplateCatalog::builtin());
    return std::make_shared<Reasoner>(config, gateway, catalog);
}

}  // namespace

TEST_CASE("oracle takes 3 from a single pile of 31, cap 3, normal play") {
    OracleAgent oracle;
    const auto d = oracle.choose(observe(NimState{{31}, 3}));
    CHECK(d.move == Move{NimMove{0, 3}});  // leaves 28, a multiple of 4
    CHECK_FALSE(d.diagnostics.losing_position);
    CHECK(d.transcripts.empty());
}

TEST_CASE("oracle opens the fibonacci pile of 20 with 2") {
    OracleAgent oracle;
    const auto d = oracle.choose(observe(FibState{20, 19}));
    CHECK(d.move == Move{FibMove{2}});
}

TEST_CASE("oracle falls back deterministically from a losing position") {
    OracleAgent oracle;
    const auto d = oracle.choose(observe(NimState{{4}, 3}));
    CHECK(d.move == Move{NimMove{0, 1}});
    CHECK(d.diagnostics.losing_position);
}

TEST_CASE("oracle opens a large full square via the symmetric-L strategy") {
    OracleAgent oracle;  // 19x19 is far beyond exhaustive reach
    const auto d = oracle.choose(observe(ChompState{std::vector<int>(19, 19), 19, 19}));
    CHECK(d.move == Move{ChompMove{1, 1}});
}

TEST_CASE("random agent is deterministic per seed") {
    const Observation obs = observe(NimState{{5}, 3});
    std::vector<Move> first_run;
    for (int i = 0; i < 20; ++i) {
        RandomAgent agent(42);
        first_run.push_back(agent.choose(obs).move);
    }
    for (int i = 1; i < 20; ++i) CHECK(first_run[i] == first_run[0]);

    RandomAgent a(1), b(1);
    for (int i = 0; i < 50; ++i) CHECK(a.choose(obs).move == b.choose(obs).move);
}

TEST_CASE("random agent with a single legal move plays it") {
    RandomAgent agent(7);
    CHECK(agent.choose(observe(NimState{{1}, 3})).move == Move{NimMove{0, 1}});
}

TEST_CASE("random agent draws roughly uniformly") {
    RandomAgent agent(20250824);
    const Observation obs = observe(NimState{{5}, 3});  // 3 legal moves
    std::map<Move, int> counts;
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[agent.choose(obs).move];
    REQUIRE(counts.size() == 3);
    const double expected = n / 3.0;
    double chi2 = 0.0;
    for (const auto& [move, count] : counts)
        chi2 += (count - expected) * (count - expected) / expected;
    CHECK(chi2 < 11.34);  // chi-square df=2, far outside 99th percentile ~9.21
}

TEST_CASE("every agent move is legal across randomized states") {
    OracleAgent oracle;
    RandomAgent random(3);
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 200; ++iter) {
        GameState state;
        switch (iter % 3) {
            case 0: {
                NimState s{{}, 1 + static_cast<int>(rng() % 4)};
                for (std::size_t i = 0; i < 1 + rng() % 3; ++i)
                    s.piles.push_back(1 + static_cast<int>(rng() % 15));
                state = s;
                break;
            }
            case 1: {
                const int remaining = 2 + static_cast<int>(rng() % 25);
                state = FibState{remaining, 1 + static_cast<int>(rng() % remaining)};
                break;
            }
            default: {
                KaylesState s;
                s.rows.emplace_back();
                for (std::size_t i = 0; i < 1 + rng() % 10; ++i)
                    s.rows.back().push_back(rng() % 2);
                if (legal_moves(GameState{s}).empty()) continue;
                state = s;
                break;
            }
        }
        const auto convention =
            rng() % 2 == 0 ? PlayConvention::Normal : PlayConvention::Misere;
        CHECK(is_legal(state, oracle.choose(observe(state, convention)).move));
        CHECK(is_legal(state, random.choose(observe(state, convention)).move));
    }
}

TEST_CASE("oracle vs oracle: first mover wins iff the start is winning") {
    Solver solver;
    for (int n = 1; n <= 12; ++n) {
        const GameState start = NimState{{n}, 3};
        OracleAgent a, b;
        const int winner = play(a, b, start, PlayConvention::Normal);
        const bool first_wins = solver.grundy(start) != 0;
        CHECK(winner == (first_wins ? 0 : 1));
    }
    for (int pins = 1; pins <= 8; ++pins) {
        KaylesState s;
        s.rows.emplace_back(pins, std::uint8_t{1});
        OracleAgent a, b;
        CHECK(play(a, b, GameState{s}, PlayConvention::Normal) == 0);  // G(n)>0 for n>=1
    }
    for (int rows = 2; rows <= 3; ++rows)
        for (int cols = 2; cols <= 4; ++cols) {
            const GameState start = ChompState{std::vector<int>(cols, rows), rows, cols};
            OracleAgent a, b;
            // every rectangular chomp start larger than 1x1 is a first-player win
            CHECK(play(a, b, start, PlayConvention::Poison) == 0);
        }
}

TEST_CASE("oracle from a winning start beats the random agent every time") {
    int oracle_wins = 0;
    for (int seed = 0; seed < 200; ++seed) {
        OracleAgent oracle;
        RandomAgent random(seed);
        if (play(oracle, random, GameState{NimState{{31}, 3}},
                 PlayConvention::Normal) == 0)
            ++oracle_wins;
    }
    CHECK(oracle_wins == 200);
}

TEST_CASE("llm agent passes a legal scripted action through") {
    auto reasoner = scripted_reasoner(
        [](const ChatRequest&) { return R"(```json
{"action": 2}
```)"; });
    LlmAgent agent(reasoner, 0);
    const auto d = agent.choose(observe(NimState{{5}, 3}));
    CHECK(d.move == Move{NimMove{0, 2}});
    CHECK_FALSE(d.diagnostics.fallback_used);
    CHECK(d.transcripts.size() == 1);
}

TEST_CASE("llm agent resamples an illegal action, then falls back randomly") {
    int calls = 0;
    auto reasoner = scripted_reasoner([&calls](const ChatRequest&) {
        ++calls;
        return R"(```json
{"action": 9}
```)";
    });
    LlmAgent agent(reasoner, 123);
    const auto d = agent.choose(observe(NimState{{5}, 3}));
    CHECK(calls == 1 + LlmAgent::kMaxResamples);
    CHECK(d.diagnostics.fallback_used);
    CHECK(is_legal(GameState{NimState{{5}, 3}}, d.move));
    CHECK(d.transcripts.size() == 4);  // the violations stay auditable
}

TEST_CASE("llm agent survives unparseable chatter the same way") {
    auto reasoner = scripted_reasoner(
        [](const ChatRequest&) { return "I resign. no json."; });
    LlmAgent agent(reasoner, 5);
    const auto d = agent.choose(observe(NimState{{5}, 3}));
    CHECK(d.diagnostics.fallback_used);
    CHECK(is_legal(GameState{NimState{{5}, 3}}, d.move));
}
