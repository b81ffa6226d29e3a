#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/dataset.hpp"
#include "arena/reasoners.hpp"

namespace arena {

struct EmptyLogs : std::runtime_error {
    EmptyLogs() : std::runtime_error("no responses to analyze") {}
};

// Canonical string key for an action payload, used across all analyses.
std::string action_key(const nlohmann::json& action);

struct ActionDistribution {
    std::map<std::string, int> counts;
    int n_total = 0;
};

ActionDistribution distribution_of(const std::vector<std::string>& actions);
double frequency(const ActionDistribution& dist, const std::string& action);

struct StrongConsistencyReport {
    std::string mode_action;
    double mode_frequency = 0.0;
    bool flagged = false;  // mode_frequency strictly exceeds threshold
    double threshold = 0.5;
    bool tie = false;      // several actions share the top count
    bool small_n = false;  // fewer than 10 trials
};

StrongConsistencyReport detect_strong_consistency(const ActionDistribution& dist,
                                                  double threshold = 0.5);

struct BiasShiftReport {
    ActionDistribution pre;
    ActionDistribution post;
    std::string pre_mode_action;
    double delta_mode = 0.0;     // post - pre frequency of the pre-debate mode
    double delta_optimal = 0.0;  // change in optimal-action frequency
    std::string pairing = "pooled";  // pooled | paired trial composition
};

BiasShiftReport measure_bias_shift(const std::vector<std::string>& pre_actions,
                                   const std::vector<std::string>& post_actions,
                                   const std::set<std::string>& optimal_actions,
                                   const std::string& pairing = "pooled");

// Fraction of optimal actions per debate round; index 0 is the initial round.
std::vector<double> optimal_decline_curve(
    const std::vector<std::vector<std::string>>& per_round_actions,
    const std::set<std::string>& optimal_actions);

// Two-sided 97.5% Student-t quantile for the given degrees of freedom.
double student_t_975(int dof);

struct SweepPoint {
    double temperature = 0.0;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool ci_defined = false;  // false for a single repeat (point estimate)
};

using ReasonerAgentFactory =
    std::function<std::unique_ptr<Agent>(const ReasonerConfig&, std::uint64_t seed)>;

// Applies each temperature jointly to the elicitation and diversification
// stages, evaluates the dataset n_repeats times, and reports 95% CIs.
std::vector<SweepPoint> temperature_sweep(
    const ReasonerConfig& base, const ReasonerAgentFactory& factory,
    const std::vector<SampleRecord>& dataset,
    const std::vector<double>& temps = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0},
    int n_repeats = 15, std::uint64_t seed = 0);

struct RunSummary {
    std::string model;
    std::string method;
    std::string game;
    std::string variant;
    int n = 0;
    double win_rate = 0.0;
};

// Pools runs with equal (model, method, game, variant) keys; episode-weighted.
std::vector<RunSummary> aggregate_runs(const std::vector<RunSummary>& runs);
std::string runs_csv(const std::vector<RunSummary>& runs);

}  // namespace arena
