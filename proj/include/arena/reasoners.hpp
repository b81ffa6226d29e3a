#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/agents.hpp"
#include "arena/gateway.hpp"
#include "arena/prompts.hpp"

namespace arena {

enum class ReasonerKind {
    Standard,
    React,
    Cot,
    SelfConsistency,
    SelfRefinement,
    Mad,
    Dreamad,
    DreamadMinus,
};
std::string to_string(ReasonerKind kind);
ReasonerKind reasoner_kind_from_string(const std::string& name);

struct ReasonerConfig {
    ReasonerKind kind = ReasonerKind::Standard;
    std::string model_id = "test-model";
    int max_tokens = 1024;
    int n_samples = 5;        // self-consistency draws
    int n_refine_steps = 3;   // critique-and-revise iterations
    int n_debate_rounds = 3;  // debate rounds after the independent round
    int n_debaters = 2;
    double temp_decision = 0.1;   // single-shot and self-* pipelines
    double temp_debate = 0.7;     // debate answers
    double temp_spke = 0.1;       // prior-knowledge stages
    double temp_diversify = 0.7;  // prompt-diversification stage
    bool strict_parse = false;    // refuse fence-less responses
    std::uint64_t seed = 0;       // bookkeeping / ordering key
};

struct Decision {
    nlohmann::json action;                 // decoded final action payload
    std::vector<ChatExchange> transcripts;  // every exchange, in issue order
    int rounds_used = 0;                   // debate rounds entered after round 0
    bool consensus_reached = true;
    std::vector<nlohmann::json> per_agent_finals;
    bool tie_broken = false;
    bool no_consensus = false;
    std::optional<std::string> optimized_prompt;  // first debater's, when staged
};

struct ReasonerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AllSamplesFailed : ReasonerError {
    AllSamplesFailed() : ReasonerError("every sampled response was unparseable") {}
};
struct StageFailed : ReasonerError {
    explicit StageFailed(const std::string& stage)
        : ReasonerError("stage '" + stage + "' failed after one resample") {}
};

class Reasoner {
  public:
    Reasoner(ReasonerConfig config, std::shared_ptr<Gateway> gateway,
             std::shared_ptr<const TemplateCatalog> catalog);

    Decision decide(const Observation& obs);

    const ReasonerConfig& config() const { return config_; }

    struct Sample;  // one parsed-and-decoded answer

  private:
    std::string base_prompt(const Observation& obs) const;
    ChatExchange ask(const std::string& prompt, double temperature,
                     const std::string& tag);
    Sample ask_parsed(const Observation& obs, const std::string& prompt,
                      double temperature, const std::string& tag,
                      std::vector<ChatExchange>& log);

    Decision decide_single(const Observation& obs, PromptStyle style);
    Decision decide_self_consistency(const Observation& obs);
    Decision decide_self_refinement(const Observation& obs);
    Decision decide_mad(const Observation& obs);
    Decision decide_dreamad(const Observation& obs, bool with_debate);

    std::string optimized_prompt_for(const Observation& obs, int debater_index,
                                     std::vector<ChatExchange>& log);
    void run_debate(const Observation& obs, const std::vector<std::string>& prompts,
                    Decision& decision);

    ReasonerConfig config_;
    std::shared_ptr<Gateway> gateway_;
    std::shared_ptr<const TemplateCatalog> catalog_;
};

}  // namespace arena
