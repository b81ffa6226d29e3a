#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/agents.hpp"
#include "arena/game.hpp"

namespace arena {

struct SampleRecord {
    std::string sample_id;
    GameState state;
    PlayConvention convention = PlayConvention::Normal;
    std::vector<Move> legal_actions;
    std::vector<Move> optimal_actions;  // winning moves; the fallback when losing
    bool losing_position = false;
    std::string label_method;  // "exhaustive" | "symmetry"
    ChompOrientation display_orientation = ChompOrientation::TopLeft;
};

nlohmann::json sample_to_json(const SampleRecord& sample);
SampleRecord sample_from_json(const nlohmann::json& j);

struct DatasetSpec {
    int n_nim = 20;      // single piles, cap 3
    int n_fib = 11;      // openings, remaining <= 30
    int n_kayles = 18;   // row configurations, <= 20 pins
    int n_chomp = 20;    // full squares, 2x2 .. 19x19
    bool include_losing = false;  // scores the deterministic fallback as correct
};

// Deterministic given spec + seed; losing positions are excluded unless
// include_losing is set. Exhaustive labels are minimax-verified; full squares
// beyond exhaustive reach carry the symmetric-L label.
std::vector<SampleRecord> generate_dataset(const DatasetSpec& spec,
                                           std::uint64_t seed);

// Stable content hash over the serialized samples, recorded in manifests.
std::string dataset_hash(const std::vector<SampleRecord>& dataset);

struct AccuracyReport {
    int n_repeats = 0;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation across repeats
    int failures = 0;     // per-sample errors, scored incorrect
    std::map<std::string, double> per_game_mean;
    std::vector<std::vector<bool>> per_sample;  // [repeat][sample index]
};

nlohmann::json accuracy_to_json(const AccuracyReport& report);

using AgentFactory = std::function<std::unique_ptr<Agent>(std::uint64_t seed)>;

// Poses every sample to a fresh agent per repeat (seeded seed + repeat index);
// a choice is correct iff it is one of the sample's optimal actions.
AccuracyReport evaluate(const AgentFactory& make_agent,
                        const std::vector<SampleRecord>& dataset, int n_repeats,
                        std::uint64_t seed);

}  // namespace arena
