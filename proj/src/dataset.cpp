#include "arena/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "arena/solver.hpp"
#include "arena/store.hpp"

namespace arena {

using nlohmann::json;

json sample_to_json(const SampleRecord& sample) {
    json legal = json::array();
    for (const auto& move : sample.legal_actions) legal.push_back(move_to_json(move));
    json optimal = json::array();
    for (const auto& move : sample.optimal_actions)
        optimal.push_back(move_to_json(move));
    return json{{"sample_id", sample.sample_id},
                {"state", state_to_json(sample.state)},
                {"convention", to_string(sample.convention)},
                {"legal_actions", legal},
                {"optimal_actions", optimal},
                {"losing_position", sample.losing_position},
                {"label_method", sample.label_method},
                {"display_orientation", to_string(sample.display_orientation)}};
}

SampleRecord sample_from_json(const json& j) {
    SampleRecord s;
    j.at("sample_id").get_to(s.sample_id);
    s.state = state_from_json(j.at("state"));
    s.convention = convention_from_string(j.at("convention").get<std::string>());
    for (const auto& move : j.at("legal_actions"))
        s.legal_actions.push_back(move_from_json(move));
    for (const auto& move : j.at("optimal_actions"))
        s.optimal_actions.push_back(move_from_json(move));
    j.at("losing_position").get_to(s.losing_position);
    j.at("label_method").get_to(s.label_method);
    s.display_orientation =
        orientation_from_string(j.at("display_orientation").get<std::string>());
    return s;
}

namespace {

SampleRecord label_exhaustive(Solver& solver, const std::string& id, GameState state,
                              PlayConvention convention) {
    SampleRecord s;
    s.sample_id = id;
    s.state = std::move(state);
    s.convention = convention;
    s.legal_actions = legal_moves(s.state);
    const auto result = solver.optimal_moves(s.state, convention);
    s.losing_position = result.losing_position;
    s.optimal_actions = result.moves;
    s.label_method = "exhaustive";
    return s;
}

}  // namespace

std::vector<SampleRecord> generate_dataset(const DatasetSpec& spec,
                                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Solver solver;
    std::vector<SampleRecord> dataset;

    auto keep = [&](SampleRecord sample) {
        if (sample.losing_position && !spec.include_losing) return false;
        dataset.push_back(std::move(sample));
        return true;
    };

    // Single-pile subtraction nim, cap 3. Losing states (multiples of 4) are
    // never candidates unless explicitly included.
    {
        std::vector<int> pool;
        for (int n = 1; n <= 60; ++n)
            if (spec.include_losing || n % 4 != 0) pool.push_back(n);
        std::shuffle(pool.begin(), pool.end(), rng);
        int made = 0;
        for (int n : pool) {
            if (made == spec.n_nim) break;
            if (keep(label_exhaustive(solver, "nim-" + std::to_string(n),
                                      NimState{{n}, 3}, PlayConvention::Normal)))
                ++made;
        }
    }

    // Fibonacci openings, remaining <= 30; the opening state 20 is always
    // present. Fibonacci-numbered piles are the losing openings.
    {
        std::vector<int> pool;
        for (int n = 4; n <= 30; ++n)
            if (n != 20 && (spec.include_losing || !is_fibonacci(n))) pool.push_back(n);
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.insert(pool.begin(), 20);
        int made = 0;
        for (int n : pool) {
            if (made == spec.n_fib) break;
            if (keep(label_exhaustive(solver, "fib-" + std::to_string(n),
                                      FibState{n, n - 1}, PlayConvention::Normal)))
                ++made;
        }
    }

    // Kayles rows, <= 20 pins: full single rows plus two-row splits.
    {
        struct Rows {
            std::vector<int> lens;
        };
        std::vector<Rows> pool;
        for (int n = 1; n <= 14; ++n) pool.push_back({{n}});
        for (int a = 2; a <= 9; ++a)
            for (int b = a; b <= 20 - a && b <= 10; ++b) pool.push_back({{a, b}});
        std::shuffle(pool.begin(), pool.end(), rng);
        int made = 0;
        for (const auto& rows : pool) {
            if (made == spec.n_kayles) break;
            KaylesState state;
            std::string id = "kayles";
            for (int len : rows.lens) {
                state.rows.emplace_back(len, std::uint8_t{1});
                id += "-" + std::to_string(len);
            }
            if (keep(label_exhaustive(solver, id, GameState{state},
                                      PlayConvention::Normal)))
                ++made;
        }
    }

    // Full chomp squares 2x2 .. 19x19: 18 sizes, so counts above 18 repeat
    // sizes under fresh sample ids. Squares up to 7x7 are labeled
    // exhaustively; larger ones by the symmetric-L strategy.
    {
        std::vector<int> sizes;
        for (int n = 2; n <= 19; ++n) sizes.push_back(n);
        std::shuffle(sizes.begin(), sizes.end(), rng);
        for (int i = 0; i < spec.n_chomp; ++i) {
            const int n = sizes[static_cast<std::size_t>(i) % sizes.size()];
            const std::string id = "chomp-" + std::to_string(n) + "x" +
                                   std::to_string(n) +
                                   (i >= static_cast<int>(sizes.size()) ? "-b" : "");
            const GameState state = ChompState{std::vector<int>(n, n), n, n};
            if (n <= 7) {
                keep(label_exhaustive(solver, id, state, PlayConvention::Poison));
            } else {
                SampleRecord s;
                s.sample_id = id;
                s.state = state;
                s.convention = PlayConvention::Poison;
                s.legal_actions = legal_moves(state);
                s.optimal_actions = {Move{chomp_square_opening(n)}};
                s.label_method = "symmetry";
                dataset.push_back(std::move(s));
            }
        }
    }

    return dataset;
}

std::string dataset_hash(const std::vector<SampleRecord>& dataset) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& sample : dataset) mix(sample_to_json(sample).dump());
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

json accuracy_to_json(const AccuracyReport& report) {
    json per_game = json::object();
    for (const auto& [game, mean] : report.per_game_mean) per_game[game] = mean;
    return json{{"n_repeats", report.n_repeats},
                {"mean", report.mean},
                {"stddev", report.stddev},
                {"failures", report.failures},
                {"per_game_mean", per_game}};
}

AccuracyReport evaluate(const AgentFactory& make_agent,
                        const std::vector<SampleRecord>& dataset, int n_repeats,
                        std::uint64_t seed) {
    AccuracyReport report;
    report.n_repeats = n_repeats;
    if (dataset.empty() || n_repeats < 1) return report;

    std::map<std::string, std::pair<long long, long long>> per_game;  // correct, total
    std::vector<double> repeat_means;
    for (int r = 0; r < n_repeats; ++r) {
        auto agent = make_agent(seed + static_cast<std::uint64_t>(r));
        std::vector<bool> outcomes;
        int correct = 0;
        for (const auto& sample : dataset) {
            Observation obs;
            obs.state = sample.state;
            obs.convention = sample.convention;
            obs.orientation = sample.display_orientation;
            obs.role_name = "Player 1";
            obs.game_config_ref = sample.sample_id;
            bool ok = false;
            try {
                const Move chosen = agent->choose(obs).move;
                ok = std::find(sample.optimal_actions.begin(),
                               sample.optimal_actions.end(),
                               chosen) != sample.optimal_actions.end();
            } catch (const std::exception&) {
                ++report.failures;
            }
            outcomes.push_back(ok);
            if (ok) ++correct;
            auto& bucket = per_game[to_string(kind_of(sample.state))];
            bucket.first += ok ? 1 : 0;
            ++bucket.second;
        }
        repeat_means.push_back(static_cast<double>(correct) / dataset.size());
        report.per_sample.push_back(std::move(outcomes));
    }

    double sum = 0.0;
    for (double m : repeat_means) sum += m;
    report.mean = sum / n_repeats;
    if (n_repeats > 1) {
        double ss = 0.0;
        for (double m : repeat_means) ss += (m - report.mean) * (m - report.mean);
        report.stddev = std::sqrt(ss / (n_repeats - 1));
    }
    for (const auto& [game, bucket] : per_game)
        report.per_game_mean[game] =
            static_cast<double>(bucket.first) / bucket.second;
    return report;
}

}  // namespace arena
