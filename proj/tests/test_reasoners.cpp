#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "arena/reasoners.hpp"

using namespace arena;
using nlohmann::json;

namespace {

Observation nim31() {
    Observation obs;
    obs.state = NimState{{31}, 3};
    obs.role_name = "Player 1";
    return obs;
}

std::string answer(int take) {
    return "```json\n{\"action\": " + std::to_string(take) + "}\n```";
}

std::string reasoned_answer(int take, const std::string& why = "because") {
    return "```json\n{\"reasoning\": \"" + why +
           "\", \"action\": " + std::to_string(take) + "}\n```";
}

const std::string kStage1 =
    "```json\n{\"game definition\": \"subtraction game\", "
    "\"winning condition\": \"take the last item\", "
    "\"move constraints\": \"1 to 3 items\"}\n```";
const std::string kStage2 =
    "```json\n{\"state evaluation\": \"count mod 4\", "
    "\"winning strategy\": \"leave a multiple of 4\", "
    "\"endgame tactics\": \"mirror to zero\"}\n```";
const std::string kStage3 =
    "```json\n{\"optimized prompt\": \"OPTIMIZED: leave a multiple of 4.\"}\n```";

struct Rig {
    std::shared_ptr<ScriptedBackend> backend;
    std::shared_ptr<Gateway> gateway;
    std::shared_ptr<Reasoner> reasoner;
};

Rig make_rig(ReasonerConfig config, std::shared_ptr<ScriptedBackend> backend) {
    Rig rig;
    rig.backend = std::move(backend);
    rig.gateway = std::make_shared<Gateway>(rig.backend);
    rig.reasoner = std::make_shared<Reasoner>(
        config, rig.gateway,
        std::make_shared<const TemplateCatalog>(TemplateCatalog::builtin()));
    return rig;
}

Rig queue_rig(ReasonerConfig config, const std::vector<std::string>& replies) {
    auto backend = std::make_shared<ScriptedBackend>();
    for (const auto& reply : replies) backend->push_response(reply);
    return make_rig(config, std::move(backend));
}

// Stage-aware responder for the staged pipelines.
std::string staged_responder(const ChatRequest& request, int decision_take) {
    const std::string& prompt = request.messages.back().content;
    if (prompt.find("Extract the key information") != std::string::npos) return kStage1;
    if (prompt.find("derive the general winning strategy") != std::string::npos)
        return kStage2;
    if (prompt.find("Refine the initial game prompt") != std::string::npos)
        return kStage3;
    return answer(decision_take);
}

}  // namespace

TEST_CASE("single-shot pipelines issue exactly one request") {
    for (auto kind : {ReasonerKind::Standard, ReasonerKind::React, ReasonerKind::Cot}) {
        ReasonerConfig config;
        config.kind = kind;
        auto rig = queue_rig(config, {kind == ReasonerKind::Standard
                                          ? answer(3)
                                          : reasoned_answer(3)});
        const auto d = rig.reasoner->decide(nim31());
        CHECK(d.action == json(3));
        CHECK(d.transcripts.size() == 1);
        CHECK(rig.gateway->requests_issued() == 1);
        CHECK(d.consensus_reached);
    }
}

TEST_CASE("cot prompt ends with the step-by-step suffix; standard does not") {
    ReasonerConfig config;
    config.kind = ReasonerKind::Cot;
    auto rig = queue_rig(config, {reasoned_answer(3)});
    rig.reasoner->decide(nim31());
    const std::string prompt =
        rig.gateway->transcript().front().request.messages.back().content;
    const std::string suffix = "Let's think step-by-step. What is the best move for you?";
    CHECK(prompt.size() > suffix.size());
    CHECK(prompt.substr(prompt.size() - suffix.size()) == suffix);
    CHECK(prompt.find("31 items remaining") != std::string::npos);

    config.kind = ReasonerKind::Standard;
    auto plain = queue_rig(config, {answer(3)});
    plain.reasoner->decide(nim31());
    CHECK(plain.gateway->transcript().front().request.messages.back().content.find(
              suffix) == std::string::npos);
}

TEST_CASE("react accepts an answer without the optional reasoning field") {
    ReasonerConfig config;
    config.kind = ReasonerKind::React;
    auto rig = queue_rig(config, {answer(2)});
    CHECK(rig.reasoner->decide(nim31()).action == json(2));
}

TEST_CASE("self-consistency takes the mode of the decoded actions") {
    ReasonerConfig config;
    config.kind = ReasonerKind::SelfConsistency;
    config.n_samples = 3;
    auto rig = queue_rig(config, {answer(2), answer(2), answer(1)});
    const auto d = rig.reasoner->decide(nim31());
    CHECK(d.action == json(2));
    CHECK(d.transcripts.size() == 3);
    CHECK_FALSE(d.tie_broken);
    CHECK(d.per_agent_finals.size() == 3);
}

TEST_CASE("self-consistency ties go to the earliest sample, flagged") {
    ReasonerConfig config;
    config.kind = ReasonerKind::SelfConsistency;
    config.n_samples = 2;
    auto rig = queue_rig(config, {answer(1), answer(2)});
    const auto d = rig.reasoner->decide(nim31());
    CHECK(d.action == json(1));
    CHECK(d.tie_broken);
}

TEST_CASE("self-consistency with one sample degenerates to standard") {
    ReasonerConfig config;
    config.kind = ReasonerKind::SelfConsistency;
    config.n_samples = 1;
    auto rig = queue_rig(config, {answer(3)});
    const auto d = rig.reasoner->decide(nim31());
    CHECK(d.action == json(3));
    CHECK(rig.gateway->requests_issued() == 1);
}

TEST_CASE("self-consistency drops bad draws and fails only when all fail") {
    ReasonerConfig config;
    config.kind = ReasonerKind::SelfConsistency;
    config.n_samples = 3;
    auto mixed = queue_rig(config, {"garbage", answer(2), "also garbage"});
    CHECK(mixed.reasoner->decide(nim31()).action == json(2));

    auto hopeless = queue_rig(config, {"a", "b", "c"});
    CHECK_THROWS_AS(hopeless.reasoner->decide(nim31()), AllSamplesFailed);
}

TEST_CASE("self-refinement runs 1 + 2n exchanges and keeps the last answer") {
    ReasonerConfig config;
    config.kind = ReasonerKind::SelfRefinement;
    config.n_refine_steps = 3;
    auto rig = queue_rig(config, {reasoned_answer(1), "critique: 1 is weak",
                                  reasoned_answer(3), "critique: 3 is right",
                                  reasoned_answer(3), "critique: keep it",
                                  reasoned_answer(3)});
    const auto d = rig.reasoner->decide(nim31());
    CHECK(d.action == json(3));
    CHECK(d.transcripts.size() == 7);
    // the revise prompt carries the critique and the previous answer
    const auto& revise0 = d.transcripts[2].request.messages.back().content;
    CHECK(revise0.find("critique: 1 is weak") != std::string::npos);
    CHECK(revise0.find("\"action\":1") != std::string::npos);
}

TEST_CASE("self-refinement with zero steps degenerates to standard") {
    ReasonerConfig config;
    config.kind = ReasonerKind::SelfRefinement;
    config.n_refine_steps = 0;
    auto rig = queue_rig(config, {reasoned_answer(2)});
    const auto d = rig.reasoner->decide(nim31());
    CHECK(d.action == json(2));
    CHECK(d.transcripts.size() == 1);
}

TEST_CASE("self-refinement resamples an unparseable revision once") {
    ReasonerConfig config;
    config.kind = ReasonerKind::SelfRefinement;
    config.n_refine_steps = 1;
    auto rig = queue_rig(config, {reasoned_answer(1), "critique", "garbage",
                                  reasoned_answer(2)});
    const auto d = rig.reasoner->decide(nim31());
    CHECK(d.action == json(2));
    CHECK(d.transcripts.size() == 4);  // initial, critique, failed revise, retry
}

TEST_CASE("mad stops immediately on round-0 consensus") {
    ReasonerConfig config;
    config.kind = ReasonerKind::Mad;
    auto rig = queue_rig(config, {reasoned_answer(2), reasoned_answer(2)});
    const auto d = rig.reasoner->decide(nim31());
    CHECK(d.action == json(2));
    CHECK(d.rounds_used == 0);
    CHECK(d.consensus_reached);
    CHECK(rig.gateway->requests_issued() == 2);  // early stop: no extra rounds
    for (const auto& exchange : rig.gateway->transcript())
        CHECK(exchange.request.temperature == doctest::Approx(0.7));
}

TEST_CASE("mad converges after one debate round") {
    ReasonerConfig config;
    config.kind = ReasonerKind::Mad;
    auto rig = queue_rig(config, {reasoned_answer(1), reasoned_answer(2),
                                  reasoned_answer(2), reasoned_answer(2)});
    const auto d = rig.reasoner->decide(nim31());
    CHECK(d.action == json(2));
    CHECK(d.rounds_used == 1);
    CHECK(d.consensus_reached);
    CHECK(d.transcripts.size() == 4);  // n_debaters * (1 + rounds_used)
    // debate prompts quote the other agent's raw JSON answer
    const auto& round1 = d.transcripts[2].request.messages.back().content;
    CHECK(round1.find("Another agent answered:") != std::string::npos);
    CHECK(round1.find("\"action\":2") != std::string::npos);
}

TEST_CASE("mad without consensus applies the majority/earliest tie policy") {
    ReasonerConfig config;
    config.kind = ReasonerKind::Mad;
    config.n_debate_rounds = 3;
    std::vector<std::string> replies;
    for (int round = 0; round < 4; ++round) {
        replies.push_back(reasoned_answer(1));
        replies.push_back(reasoned_answer(2));
    }
    auto rig = queue_rig(config, replies);
    const auto d = rig.reasoner->decide(nim31());
    CHECK(d.rounds_used == 3);
    CHECK_FALSE(d.consensus_reached);
    CHECK(d.no_consensus);
    CHECK(d.tie_broken);
    CHECK(d.action == json(1));  // earliest debater among the tie
    CHECK(d.transcripts.size() == 8);
}

TEST_CASE("dreamad-minus runs exactly four exchanges") {
    ReasonerConfig config;
    config.kind = ReasonerKind::DreamadMinus;
    auto rig = make_rig(config, std::make_shared<ScriptedBackend>([](const ChatRequest& r) {
                            return staged_responder(r, 1);
                        }));
    Observation obs;
    obs.state = FibState{20, 19};
    const auto d = rig.reasoner->decide(obs);
    CHECK(d.action == json(1));
    CHECK(d.transcripts.size() == 4);  // reinterpret, strategize, diversify, decide
    // The decision prompt is the stage-2 optimized prompt plus the answer schema.
    const auto& decide_prompt = d.transcripts[3].request.messages.back().content;
    CHECK(decide_prompt.find("OPTIMIZED: leave a multiple of 4.") == 0);
    CHECK(decide_prompt.find("Output Format:") != std::string::npos);
    REQUIRE(d.optimized_prompt.has_value());
    CHECK(decide_prompt == *d.optimized_prompt);
}

TEST_CASE("dreamad stage temperatures follow the elicit/diversify split") {
    ReasonerConfig config;
    config.kind = ReasonerKind::DreamadMinus;
    auto rig = make_rig(config, std::make_shared<ScriptedBackend>([](const ChatRequest& r) {
                            return staged_responder(r, 1);
                        }));
    Observation obs;
    obs.state = FibState{20, 19};
    rig.reasoner->decide(obs);
    const auto transcript = rig.gateway->transcript();
    REQUIRE(transcript.size() == 4);
    CHECK(transcript[0].request.temperature == doctest::Approx(0.1));  // reinterpret
    CHECK(transcript[1].request.temperature == doctest::Approx(0.1));  // strategize
    CHECK(transcript[2].request.temperature == doctest::Approx(0.7));  // diversify
}

TEST_CASE("dreamad chains stages, debate, and one refinement exchange") {
    ReasonerConfig config;
    config.kind = ReasonerKind::Dreamad;
    auto rig = make_rig(config, std::make_shared<ScriptedBackend>([](const ChatRequest& r) {
                            return staged_responder(r, 2);
                        }));
    const auto d = rig.reasoner->decide(nim31());
    CHECK(d.action == json(2));
    CHECK(d.rounds_used == 0);  // both debaters agree immediately
    // 3 stages x 2 debaters + 2 round-0 answers + 1 post-debate refinement
    CHECK(d.transcripts.size() == 9);
    const auto& refine_prompt = d.transcripts.back().request.messages.back().content;
    CHECK(refine_prompt.find("The debate concluded") != std::string::npos);
    CHECK(refine_prompt.find("\"action\":2") != std::string::npos);
}

TEST_CASE("dreamad refinement verdict is final") {
    ReasonerConfig config;
    config.kind = ReasonerKind::Dreamad;
    auto rig = make_rig(config, std::make_shared<ScriptedBackend>([](const ChatRequest& r) {
                            const std::string& p = r.messages.back().content;
                            if (p.find("The debate concluded") != std::string::npos)
                                return answer(3);  // refinement amends the consensus
                            return staged_responder(r, 2);
                        }));
    CHECK(rig.reasoner->decide(nim31()).action == json(3));
}

TEST_CASE("a failing stage is resampled once, then StageFailed") {
    ReasonerConfig config;
    config.kind = ReasonerKind::DreamadMinus;
    int reinterpret_calls = 0;
    auto rig = make_rig(config,
                        std::make_shared<ScriptedBackend>([&](const ChatRequest& r) {
                            const std::string& p = r.messages.back().content;
                            if (p.find("Extract the key information") != std::string::npos) {
                                ++reinterpret_calls;
                                return std::string("```json\n{\"game definition\": \"g\"}\n```");
                            }
                            return staged_responder(r, 1);
                        }));
    Observation obs;
    obs.state = FibState{20, 19};
    CHECK_THROWS_AS(rig.reasoner->decide(obs), StageFailed);
    CHECK(reinterpret_calls == 2);
}

TEST_CASE("misere observations pick the misere template when it exists") {
    ReasonerConfig config;
    config.kind = ReasonerKind::Standard;
    auto rig = queue_rig(config, {answer(2)});
    Observation obs = nim31();
    obs.convention = PlayConvention::Misere;
    rig.reasoner->decide(obs);
    const auto& prompt = rig.gateway->transcript().front().request.messages.back().content;
    CHECK(prompt.find("takes the last item loses") != std::string::npos);
}
