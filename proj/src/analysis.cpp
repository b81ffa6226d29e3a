#include "arena/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace arena {

using nlohmann::json;

std::string action_key(const json& action) { return action.dump(); }

ActionDistribution distribution_of(const std::vector<std::string>& actions) {
    ActionDistribution dist;
    for (const auto& action : actions) {
        ++dist.counts[action];
        ++dist.n_total;
    }
    return dist;
}

double frequency(const ActionDistribution& dist, const std::string& action) {
    if (dist.n_total == 0) return 0.0;
    const auto it = dist.counts.find(action);
    return it == dist.counts.end()
               ? 0.0
               : static_cast<double>(it->second) / dist.n_total;
}

StrongConsistencyReport detect_strong_consistency(const ActionDistribution& dist,
                                                  double threshold) {
    if (dist.n_total < 1) throw EmptyLogs();
    StrongConsistencyReport report;
    report.threshold = threshold;
    int best = 0;
    for (const auto& [action, count] : dist.counts) {
        if (count > best) {
            best = count;
            report.mode_action = action;  // first in sort order wins ties
        } else if (count == best) {
            report.tie = true;
        }
    }
    report.mode_frequency = static_cast<double>(best) / dist.n_total;
    report.flagged = report.mode_frequency > threshold;  // strict inequality
    report.small_n = dist.n_total < 10;
    return report;
}

namespace {

double optimal_frequency(const ActionDistribution& dist,
                         const std::set<std::string>& optimal_actions) {
    if (dist.n_total == 0) return 0.0;
    int hits = 0;
    for (const auto& [action, count] : dist.counts)
        if (optimal_actions.count(action)) hits += count;
    return static_cast<double>(hits) / dist.n_total;
}

}  // namespace

BiasShiftReport measure_bias_shift(const std::vector<std::string>& pre_actions,
                                   const std::vector<std::string>& post_actions,
                                   const std::set<std::string>& optimal_actions,
                                   const std::string& pairing) {
    if (pre_actions.empty() || post_actions.empty()) throw EmptyLogs();
    BiasShiftReport report;
    report.pre = distribution_of(pre_actions);
    report.post = distribution_of(post_actions);
    report.pairing = pairing;
    report.pre_mode_action = detect_strong_consistency(report.pre, 0.5).mode_action;
    report.delta_mode = frequency(report.post, report.pre_mode_action) -
                        frequency(report.pre, report.pre_mode_action);
    report.delta_optimal = optimal_frequency(report.post, optimal_actions) -
                           optimal_frequency(report.pre, optimal_actions);
    return report;
}

std::vector<double> optimal_decline_curve(
    const std::vector<std::vector<std::string>>& per_round_actions,
    const std::set<std::string>& optimal_actions) {
    if (per_round_actions.empty()) throw EmptyLogs();
    std::vector<double> curve;
    for (const auto& round : per_round_actions) {
        if (round.empty()) throw EmptyLogs();
        curve.push_back(optimal_frequency(distribution_of(round), optimal_actions));
    }
    return curve;
}

double student_t_975(int dof) {
    static const double table[] = {0,     12.706, 4.303, 3.182, 2.776, 2.571,
                                   2.447, 2.365,  2.306, 2.262, 2.228, 2.201,
                                   2.179, 2.160,  2.145, 2.131, 2.120, 2.110,
                                   2.101, 2.093,  2.086, 2.080, 2.074, 2.069,
                                   2.064, 2.060,  2.056, 2.052, 2.048, 2.045,
                                   2.042};
    if (dof < 1) throw std::invalid_argument("degrees of freedom must be >= 1");
    if (dof <= 30) return table[dof];
    return 1.960 + 2.4 / dof;  // close asymptotic fit beyond the table
}

std::vector<SweepPoint> temperature_sweep(const ReasonerConfig& base,
                                          const ReasonerAgentFactory& factory,
                                          const std::vector<SampleRecord>& dataset,
                                          const std::vector<double>& temps,
                                          int n_repeats, std::uint64_t seed) {
    std::vector<SweepPoint> points;
    for (double temp : temps) {
        ReasonerConfig config = base;
        config.temp_spke = temp;
        config.temp_diversify = temp;
        const auto report = evaluate(
            [&](std::uint64_t s) { return factory(config, s); }, dataset, n_repeats,
            seed);
        SweepPoint point;
        point.temperature = temp;
        point.mean = report.mean;
        if (n_repeats > 1) {
            const double half =
                student_t_975(n_repeats - 1) * report.stddev / std::sqrt(n_repeats);
            point.ci_low = report.mean - half;
            point.ci_high = report.mean + half;
            point.ci_defined = true;
        }
        points.push_back(point);
    }
    return points;
}

std::vector<RunSummary> aggregate_runs(const std::vector<RunSummary>& runs) {
    std::map<std::tuple<std::string, std::string, std::string, std::string>,
             RunSummary>
        pooled;
    for (const auto& run : runs) {
        const auto key = std::make_tuple(run.model, run.method, run.game, run.variant);
        auto it = pooled.find(key);
        if (it == pooled.end()) {
            pooled.emplace(key, run);
            continue;
        }
        RunSummary& acc = it->second;
        const double wins = acc.win_rate * acc.n + run.win_rate * run.n;
        acc.n += run.n;
        acc.win_rate = acc.n > 0 ? wins / acc.n : 0.0;
    }
    std::vector<RunSummary> out;
    for (const auto& [key, run] : pooled) out.push_back(run);
    return out;
}

std::string runs_csv(const std::vector<RunSummary>& runs) {
    std::ostringstream os;
    os << "model,method,game,variant,n,win_rate\n";
    for (const auto& run : runs) {
        os << run.model << ',' << run.method << ',' << run.game << ','
           << run.variant << ',' << run.n << ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", run.win_rate);
        os << buf << '\n';
    }
    return os.str();
}

}  // namespace arena
