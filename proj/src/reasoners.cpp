#include "arena/reasoners.hpp"

#include <algorithm>
#include <map>

namespace arena {

using nlohmann::json;

std::string to_string(ReasonerKind kind) {
    switch (kind) {
        case ReasonerKind::Standard: return "standard";
        case ReasonerKind::React: return "react";
        case ReasonerKind::Cot: return "cot";
        case ReasonerKind::SelfConsistency: return "self_consistency";
        case ReasonerKind::SelfRefinement: return "self_refinement";
        case ReasonerKind::Mad: return "mad";
        case ReasonerKind::Dreamad: return "dreamad";
        case ReasonerKind::DreamadMinus: return "dreamad_minus";
    }
    return "?";
}

ReasonerKind reasoner_kind_from_string(const std::string& name) {
    for (auto kind : {ReasonerKind::Standard, ReasonerKind::React, ReasonerKind::Cot,
                      ReasonerKind::SelfConsistency, ReasonerKind::SelfRefinement,
                      ReasonerKind::Mad, ReasonerKind::Dreamad,
                      ReasonerKind::DreamadMinus})
        if (to_string(kind) == name) return kind;
    throw std::invalid_argument("unknown reasoner kind: " + name);
}

namespace {

std::string rebuild_answer_json(const ParsedResponse& parsed) {
    json obj;
    if (parsed.reasoning) obj["reasoning"] = *parsed.reasoning;
    obj["action"] = parsed.action_payload;
    return obj.dump();
}

std::string output_format_of(const std::string& prompt) {
    const auto pos = prompt.find("Output Format:");
    return pos == std::string::npos ? std::string{} : prompt.substr(pos);
}

}  // namespace

struct Reasoner::Sample {
    bool ok = false;
    json action;
    Move move;
    std::string raw_json;  // the answer rebuilt as a JSON object string
};

Reasoner::Reasoner(ReasonerConfig config, std::shared_ptr<Gateway> gateway,
                   std::shared_ptr<const TemplateCatalog> catalog)
    : config_(std::move(config)),
      gateway_(std::move(gateway)),
      catalog_(std::move(catalog)) {
    if (!gateway_) throw std::invalid_argument("reasoner needs a gateway");
    if (!catalog_) throw std::invalid_argument("reasoner needs a template catalog");
}

std::string Reasoner::base_prompt(const Observation& obs) const {
    PromptStyle style = PromptStyle::React;
    if (config_.kind == ReasonerKind::Standard) style = PromptStyle::Standard;
    if (config_.kind == ReasonerKind::Cot) style = PromptStyle::Cot;

    std::string id = to_string(kind_of(obs.state));
    if (obs.convention == PlayConvention::Misere &&
        catalog_->contains(id + "_misere_" + to_string(style)))
        id += "_misere";
    id += "_" + to_string(style);
    return render(catalog_->at(id),
                  state_bindings(obs.state, obs.role_name, obs.orientation));
}

ChatExchange Reasoner::ask(const std::string& prompt, double temperature,
                           const std::string& tag) {
    ChatRequest request;
    request.model_id = config_.model_id;
    request.messages = {{"user", prompt}};
    request.temperature = temperature;
    request.max_tokens = config_.max_tokens;
    request.request_tag = tag;
    return gateway_->complete(request);
}

Reasoner::Sample Reasoner::ask_parsed(const Observation& obs, const std::string& prompt,
                                      double temperature, const std::string& tag,
                                      std::vector<ChatExchange>& log) {
    const auto exchange = ask(prompt, temperature, tag);
    log.push_back(exchange);
    const auto parsed = parse_response(exchange.response_text, config_.strict_parse);
    Sample s;
    s.ok = true;
    s.action = parsed.action_payload;
    s.move = decode_move(s.action, obs.state, obs.orientation);
    s.raw_json = rebuild_answer_json(parsed);
    return s;
}

namespace {

// Parsed-with-one-resample wrapper shared by multi-step pipelines.
template <typename Fn>
Reasoner::Sample try_twice(Fn&& attempt) {
    try {
        return attempt(0);
    } catch (const PromptError&) {
        try {
            return attempt(1);
        } catch (const PromptError&) {
            return {};  // not ok
        }
    }
}

}  // namespace

Decision Reasoner::decide(const Observation& obs) {
    switch (config_.kind) {
        case ReasonerKind::Standard: return decide_single(obs, PromptStyle::Standard);
        case ReasonerKind::React: return decide_single(obs, PromptStyle::React);
        case ReasonerKind::Cot: return decide_single(obs, PromptStyle::Cot);
        case ReasonerKind::SelfConsistency: return decide_self_consistency(obs);
        case ReasonerKind::SelfRefinement: return decide_self_refinement(obs);
        case ReasonerKind::Mad: return decide_mad(obs);
        case ReasonerKind::Dreamad: return decide_dreamad(obs, true);
        case ReasonerKind::DreamadMinus: return decide_dreamad(obs, false);
    }
    throw std::logic_error("unreachable reasoner kind");
}

Decision Reasoner::decide_single(const Observation& obs, PromptStyle) {
    Decision d;
    const auto sample = ask_parsed(obs, base_prompt(obs), config_.temp_decision,
                                   to_string(config_.kind), d.transcripts);
    d.action = sample.action;
    d.per_agent_finals = {sample.action};
    return d;
}

Decision Reasoner::decide_self_consistency(const Observation& obs) {
    Decision d;
    const std::string prompt = base_prompt(obs);
    std::vector<Sample> samples;
    for (int i = 0; i < config_.n_samples; ++i) {
        // Draws are independent; a bad draw is dropped, not resampled.
        Sample s;
        try {
            s = ask_parsed(obs, prompt, config_.temp_decision,
                           "self_consistency/sample" + std::to_string(i),
                           d.transcripts);
        } catch (const PromptError&) {
        }
        samples.push_back(std::move(s));
    }
    // Mode over decoded moves; ties go to the earliest-sampled candidate.
    std::vector<std::size_t> firsts;
    std::vector<int> counts;
    std::vector<const Sample*> reps;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i].ok) continue;
        d.per_agent_finals.push_back(samples[i].action);
        bool found = false;
        for (std::size_t k = 0; k < reps.size(); ++k)
            if (reps[k]->move == samples[i].move) {
                ++counts[k];
                found = true;
                break;
            }
        if (!found) {
            reps.push_back(&samples[i]);
            counts.push_back(1);
            firsts.push_back(i);
        }
    }
    if (reps.empty()) throw AllSamplesFailed();
    const int best = *std::max_element(counts.begin(), counts.end());
    std::size_t winner = reps.size();
    for (std::size_t k = 0; k < reps.size(); ++k)
        if (counts[k] == best && (winner == reps.size() || firsts[k] < firsts[winner]))
            winner = k;
    d.tie_broken = std::count(counts.begin(), counts.end(), best) > 1;
    d.action = reps[winner]->action;
    return d;
}

Decision Reasoner::decide_self_refinement(const Observation& obs) {
    Decision d;
    const std::string base = base_prompt(obs);
    Sample current = try_twice([&](int attempt) {
        return ask_parsed(obs, base, config_.temp_decision,
                          "self_refinement/initial" + std::string(attempt ? "/retry" : ""),
                          d.transcripts);
    });
    if (!current.ok) throw AllSamplesFailed();
    for (int step = 0; step < config_.n_refine_steps; ++step) {
        const std::string critique_prompt =
            render(catalog_->at("refine_critique"),
                   {{"base_prompt", base}, {"previous_answer", current.raw_json}});
        const auto critique = ask(critique_prompt, config_.temp_decision,
                                  "self_refinement/critique" + std::to_string(step));
        d.transcripts.push_back(critique);
        const std::string revise_prompt =
            render(catalog_->at("refine_revise"),
                   {{"base_prompt", base},
                    {"previous_answer", current.raw_json},
                    {"critique", critique.response_text}});
        Sample revised = try_twice([&](int) {
            return ask_parsed(obs, revise_prompt, config_.temp_decision,
                              "self_refinement/revise" + std::to_string(step),
                              d.transcripts);
        });
        if (revised.ok) current = std::move(revised);  // keep the last good answer
    }
    d.action = current.action;
    d.per_agent_finals = {current.action};
    return d;
}

void Reasoner::run_debate(const Observation& obs,
                          const std::vector<std::string>& prompts, Decision& d) {
    const int n = static_cast<int>(prompts.size());
    std::vector<Sample> finals(n);
    for (int i = 0; i < n; ++i)
        finals[i] = try_twice([&](int) {
            return ask_parsed(obs, prompts[i], config_.temp_debate,
                              "debater" + std::to_string(i) + "/round0", d.transcripts);
        });

    auto consensus = [&finals] {
        for (const auto& s : finals)
            if (!s.ok || !(s.move == finals.front().move)) return false;
        return true;
    };

    d.rounds_used = 0;
    while (!consensus() && d.rounds_used < config_.n_debate_rounds) {
        ++d.rounds_used;
        std::vector<Sample> next(n);
        for (int i = 0; i < n; ++i) {
            std::string others;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                others += "Another agent answered: " +
                          (finals[j].ok ? finals[j].raw_json : "(no valid answer)") +
                          "\n";
            }
            const std::string prompt =
                render(catalog_->at("debate_round"),
                       {{"base_prompt", prompts[i]}, {"other_answers", others}});
            next[i] = try_twice([&](int) {
                return ask_parsed(obs, prompt, config_.temp_debate,
                                  "debater" + std::to_string(i) + "/round" +
                                      std::to_string(d.rounds_used),
                                  d.transcripts);
            });
            if (!next[i].ok) next[i] = finals[i];  // keep the previous answer
        }
        finals = std::move(next);
    }

    for (const auto& s : finals)
        d.per_agent_finals.push_back(s.ok ? s.action : json());

    if (consensus()) {
        d.consensus_reached = true;
        d.action = finals.front().action;
        return;
    }
    d.consensus_reached = false;
    d.no_consensus = true;
    // Majority among valid finals; ties go to the lowest debater index.
    int best_count = 0;
    int winner = -1;
    bool tie = false;
    for (int i = 0; i < n; ++i) {
        if (!finals[i].ok) continue;
        int count = 0;
        for (int j = 0; j < n; ++j)
            if (finals[j].ok && finals[j].move == finals[i].move) ++count;
        if (count > best_count) {
            best_count = count;
            winner = i;
            tie = false;
        } else if (count == best_count && winner >= 0 &&
                   !(finals[i].move == finals[winner].move)) {
            tie = true;
        }
    }
    if (winner < 0) throw AllSamplesFailed();
    d.tie_broken = tie;
    d.action = finals[winner].action;
}

Decision Reasoner::decide_mad(const Observation& obs) {
    Decision d;
    const std::vector<std::string> prompts(
        std::max(2, config_.n_debaters), base_prompt(obs));
    run_debate(obs, prompts, d);
    return d;
}

std::string Reasoner::optimized_prompt_for(const Observation& obs, int debater_index,
                                           std::vector<ChatExchange>& log) {
    const std::string base = base_prompt(obs);
    const std::string who = "debater" + std::to_string(debater_index);

    auto run_stage = [&](const std::string& template_id, const Bindings& bindings,
                         double temperature, const std::vector<std::string>& fields) {
        const std::string prompt = render(catalog_->at(template_id), bindings);
        for (int attempt = 0; attempt < 2; ++attempt) {
            const auto exchange = ask(prompt, temperature, who + "/" + template_id);
            log.push_back(exchange);
            try {
                return parse_stage_fields(exchange.response_text, fields,
                                          config_.strict_parse);
            } catch (const PromptError&) {
                if (attempt == 1) throw StageFailed(template_id);
            }
        }
        throw StageFailed(template_id);
    };

    const auto reinterpretation = run_stage(
        "dreamad_reinterpret", {{"current_state", base}}, config_.temp_spke,
        {"game definition", "winning condition", "move constraints"});
    const auto strategy = run_stage(
        "dreamad_strategize",
        {{"game_definition", reinterpretation.at("game definition")},
         {"winning_condition", reinterpretation.at("winning condition")},
         {"move_constraints", reinterpretation.at("move constraints")},
         {"current_state_short", render_state(obs.state, obs.orientation)}},
        config_.temp_spke, {"state evaluation", "winning strategy", "endgame tactics"});
    const auto refined = run_stage(
        "dreamad_diversify",
        {{"initial_prompt", base},
         {"game_definition", reinterpretation.at("game definition")},
         {"state_evaluation", strategy.at("state evaluation")},
         {"winning_strategy", strategy.at("winning strategy")},
         {"endgame_tactics", strategy.at("endgame tactics")}},
        config_.temp_diversify, {"optimized prompt"});

    // The optimized prompt drives the decision; the response schema rides along
    // so answers stay machine-readable.
    std::string prompt = refined.at("optimized prompt");
    const std::string schema = output_format_of(base);
    if (!schema.empty()) prompt += "\n" + schema;
    return prompt;
}

Decision Reasoner::decide_dreamad(const Observation& obs, bool with_debate) {
    Decision d;
    const int n = with_debate ? std::max(2, config_.n_debaters) : 1;
    std::vector<std::string> prompts;
    for (int i = 0; i < n; ++i)
        prompts.push_back(optimized_prompt_for(obs, i, d.transcripts));
    d.optimized_prompt = prompts.front();

    if (!with_debate) {
        const auto sample =
            ask_parsed(obs, prompts.front(), config_.temp_decision,
                       "dreamad_minus/decide", d.transcripts);
        d.action = sample.action;
        d.per_agent_finals = {sample.action};
        return d;
    }

    run_debate(obs, prompts, d);

    const std::string refine_prompt =
        render(catalog_->at("post_debate_refine"),
               {{"base_prompt", base_prompt(obs)},
                {"consensus_answer", json{{"action", d.action}}.dump()}});
    const auto verdict = ask_parsed(obs, refine_prompt, config_.temp_spke,
                                    "post_debate_refine", d.transcripts);
    d.action = verdict.action;
    return d;
}

}  // namespace arena
