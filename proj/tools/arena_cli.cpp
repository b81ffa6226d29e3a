#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "arena/analysis.hpp"
#include "arena/dataset.hpp"
#include "arena/simulator.hpp"
#include "arena/solver.hpp"
#include "arena/store.hpp"

using namespace arena;
using nlohmann::json;

namespace {

struct BackendOptions {
    std::string backend = "replay";  // replay | live
    std::string fixtures;
    std::string provider = "openai";  // openai | gemini
    std::string base_url;
    std::optional<std::string> record_dir;
    int requests_per_minute = 0;
};

void add_backend_options(CLI::App* cmd, BackendOptions& opts) {
    cmd->add_option("--backend", opts.backend, "LLM backend: replay or live")
        ->check(CLI::IsMember({"replay", "live"}));
    cmd->add_option("--fixtures", opts.fixtures, "replay fixture directory");
    cmd->add_option("--provider", opts.provider, "live provider preset")
        ->check(CLI::IsMember({"openai", "gemini"}));
    cmd->add_option("--base-url", opts.base_url, "override the provider base URL");
    cmd->add_option("--record", opts.record_dir,
                    "record fixtures into this directory");
    cmd->add_option("--rpm", opts.requests_per_minute,
                    "live rate limit, requests per minute");
}

std::shared_ptr<Gateway> make_gateway(const BackendOptions& opts) {
    std::shared_ptr<ChatBackend> backend;
    if (opts.backend == "replay") {
        if (opts.fixtures.empty())
            throw std::invalid_argument("--backend replay requires --fixtures");
        backend = std::make_shared<ReplayBackend>(opts.fixtures);
    } else {
        auto config = opts.provider == "gemini" ? LiveBackend::gemini_preset()
                                                : LiveBackend::openai_preset();
        if (!opts.base_url.empty()) config.base_url = opts.base_url;
        backend = std::make_shared<LiveBackend>(config);
    }
    GatewayOptions gateway_options;
    gateway_options.record_dir = opts.record_dir;
    gateway_options.requests_per_minute = opts.requests_per_minute;
    return std::make_shared<Gateway>(std::move(backend), gateway_options);
}

AgentSpec parse_agent_spec(const std::string& kind_name,
                           const std::string& reasoner_name,
                           const std::string& model_id) {
    AgentSpec spec;
    if (kind_name == "oracle" || kind_name == "random") {
        spec.kind = agent_kind_from_string(kind_name);
        return spec;
    }
    spec.kind = AgentKindSpec::Llm;
    spec.reasoner.kind = reasoner_kind_from_string(
        kind_name == "llm" ? reasoner_name : kind_name);
    spec.reasoner.model_id = model_id;
    return spec;
}

bool needs_gateway(const AgentSpec& spec) { return spec.kind == AgentKindSpec::Llm; }

GameState parse_cli_state(const std::string& game, const std::string& piles,
                          int max_take, int remaining, int cap,
                          const std::string& rows, const std::string& grid,
                          int square, ChompOrientation orientation) {
    switch (game_kind_from_string(game)) {
        case GameKind::Nim: return parse_nim(piles, max_take);
        case GameKind::Fibonacci:
            return FibState{remaining, cap > 0 ? cap : remaining - 1};
        case GameKind::Kayles: return parse_kayles(rows);
        case GameKind::Chomp:
            if (square > 0)
                return ChompState{std::vector<int>(square, square), square, square};
            return parse_chomp(grid, orientation);
    }
    throw std::invalid_argument("unknown game: " + game);
}

void write_run_manifest(const std::string& run_dir, const json& config,
                        const std::string& backend, std::uint64_t seed,
                        const std::string& dataset_digest = "") {
    if (run_dir.empty()) return;
    RunManifest manifest;
    manifest.run_id = "run-" + iso8601_utc_now();
    manifest.timestamp = iso8601_utc_now();
    manifest.config = config;
    manifest.template_catalog_hash = TemplateCatalog::builtin().content_hash();
    manifest.dataset_hash = dataset_digest;
    manifest.seeds = {seed};
    manifest.backend = backend;
    save_manifest(run_dir, manifest);
}

std::vector<SampleRecord> load_dataset(const std::string& path) {
    std::vector<SampleRecord> dataset;
    for (const auto& record : read_jsonl(path))
        dataset.push_back(sample_from_json(record));
    return dataset;
}

std::vector<std::string> actions_from_jsonl(const std::string& path) {
    std::vector<std::string> actions;
    for (const auto& record : read_jsonl(path))
        actions.push_back(action_key(record.at("action")));
    return actions;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Impartial-game benchmark harness for LLM reasoning pipelines"};
    app.require_subcommand(1);

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "Label a position with the exact oracle");
    std::string game = "nim", piles = "3,4,5", rows, grid, convention = "normal";
    std::string orientation_name = "top-left";
    int max_take = 3, remaining = 20, cap = 0, square = 0;
    solve->add_option("--game", game)->required();
    solve->add_option("--piles", piles, "nim piles, comma-separated");
    solve->add_option("--max-take", max_take);
    solve->add_option("--remaining", remaining, "fibonacci pile size");
    solve->add_option("--cap", cap, "fibonacci take cap (default remaining-1)");
    solve->add_option("--rows", rows, "kayles rows as binary strings");
    solve->add_option("--grid", grid, "chomp grid as a binary matrix");
    solve->add_option("--square", square, "full n x n chomp grid");
    solve->add_option("--convention", convention)
        ->check(CLI::IsMember({"normal", "misere", "poison"}));
    solve->add_option("--orientation", orientation_name);

    // ---- dataset-gen ----
    auto* gen = app.add_subcommand("dataset-gen", "Generate the labeled dataset");
    std::string out_path = "dataset.jsonl";
    std::uint64_t seed = 20250824;
    bool include_losing = false;
    DatasetSpec dataset_spec;
    gen->add_option("--out", out_path);
    gen->add_option("--seed", seed);
    gen->add_flag("--include-losing", include_losing);
    gen->add_option("--nim", dataset_spec.n_nim);
    gen->add_option("--fib", dataset_spec.n_fib);
    gen->add_option("--kayles", dataset_spec.n_kayles);
    gen->add_option("--chomp", dataset_spec.n_chomp);

    // ---- dataset-eval ----
    auto* eval_cmd = app.add_subcommand("dataset-eval", "Score an agent on a dataset");
    std::string dataset_path, agent_name = "oracle", reasoner_name = "standard";
    std::string model_id = "gpt-4o";
    int repeats = 1;
    std::string run_dir;
    BackendOptions eval_backend;
    eval_cmd->add_option("--dataset", dataset_path)->required();
    eval_cmd->add_option("--agent", agent_name,
                         "oracle, random, llm, or a reasoner kind");
    eval_cmd->add_option("--reasoner", reasoner_name);
    eval_cmd->add_option("--model", model_id);
    eval_cmd->add_option("--repeats", repeats);
    eval_cmd->add_option("--seed", seed);
    eval_cmd->add_option("--run-dir", run_dir);
    add_backend_options(eval_cmd, eval_backend);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "Run match episodes from a preset");
    std::string preset_name = "nim-normal", opponent_name = "oracle";
    std::string opponent_reasoner = "react", opponent_model = "gpt-4o";
    int episodes = 50, workers = 1;
    BackendOptions sim_backend;
    sim->add_option("--preset", preset_name)->required();
    sim->add_option("--agent", agent_name);
    sim->add_option("--reasoner", reasoner_name);
    sim->add_option("--model", model_id);
    sim->add_option("--opponent", opponent_name);
    sim->add_option("--opponent-reasoner", opponent_reasoner);
    sim->add_option("--opponent-model", opponent_model);
    sim->add_option("--episodes", episodes);
    sim->add_option("--seed", seed);
    sim->add_option("--workers", workers);
    sim->add_option("--run-dir", run_dir);
    add_backend_options(sim, sim_backend);

    // ---- bias-analyze ----
    auto* bias = app.add_subcommand("bias-analyze",
                                    "Consistency and bias-shift analysis of logs");
    std::string pre_path, post_path, pairing = "pooled";
    std::vector<std::string> optimal_actions;
    double threshold = 0.5;
    bias->add_option("--pre", pre_path, "JSONL of {\"action\": ...} records")
        ->required();
    bias->add_option("--post", post_path, "JSONL of {\"action\": ...} records");
    bias->add_option("--optimal", optimal_actions,
                     "optimal action payloads (JSON literals)");
    bias->add_option("--threshold", threshold);
    bias->add_option("--pairing", pairing)->check(CLI::IsMember({"pooled", "paired"}));
    bias->add_option("--run-dir", run_dir);

    // ---- sweep-temp ----
    auto* sweep = app.add_subcommand("sweep-temp",
                                     "Accuracy vs stage temperature for the staged "
                                     "pipelines");
    std::vector<double> temps = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    int sweep_repeats = 15;
    BackendOptions sweep_backend;
    sweep->add_option("--dataset", dataset_path)->required();
    sweep->add_option("--reasoner", reasoner_name);
    sweep->add_option("--model", model_id);
    sweep->add_option("--temps", temps);
    sweep->add_option("--repeats", sweep_repeats);
    sweep->add_option("--seed", seed);
    sweep->add_option("--run-dir", run_dir);
    add_backend_options(sweep, sweep_backend);

    // ---- report ----
    auto* report_cmd =
        app.add_subcommand("report", "Aggregate run summaries into a CSV table");
    std::vector<std::string> report_inputs;
    std::string csv_out;
    report_cmd->add_option("--in", report_inputs, "JSONL of run summaries")
        ->required();
    report_cmd->add_option("--csv", csv_out, "CSV output path");

    // ---- templates ----
    auto* templates_cmd =
        app.add_subcommand("templates", "Dump the builtin prompt catalog");
    std::string templates_dir = "templates";
    templates_cmd->add_option("--out", templates_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            const GameState state = parse_cli_state(
                game, piles, max_take, remaining, cap, rows, grid, square,
                orientation_from_string(orientation_name));
            const auto conv = convention_from_string(convention);
            Solver solver;
            const auto result = solver.optimal_moves(state, conv);
            json moves = json::array();
            for (const auto& move : result.moves)
                moves.push_back(json{{"move", move_to_json(move)},
                                     {"text", to_string(move)}});
            json summary{{"state", state_to_json(state)},
                         {"convention", convention},
                         {"losing_position", result.losing_position},
                         {"optimal_moves", moves}};
            if (conv == PlayConvention::Normal)
                summary["grundy"] = solver.grundy(state);
            std::cout << summary.dump() << "\n";
        } else if (*gen) {
            dataset_spec.include_losing = include_losing;
            const auto dataset = generate_dataset(dataset_spec, seed);
            JsonlWriter writer(out_path, /*append=*/false);
            for (const auto& sample : dataset) writer.write(sample_to_json(sample));
            std::cout << json{{"out", out_path},
                              {"count", dataset.size()},
                              {"seed", seed},
                              {"dataset_hash", dataset_hash(dataset)}}
                             .dump()
                      << "\n";
        } else if (*eval_cmd) {
            const auto dataset = load_dataset(dataset_path);
            AgentSpec spec = parse_agent_spec(agent_name, reasoner_name, model_id);
            SimulatorContext ctx;
            if (needs_gateway(spec)) {
                ctx.gateway = make_gateway(eval_backend);
                ctx.catalog =
                    std::make_shared<const TemplateCatalog>(TemplateCatalog::builtin());
            }
            const auto report = evaluate(
                [&](std::uint64_t s) { return make_agent(spec, ctx, s); }, dataset,
                repeats, seed);
            json summary = accuracy_to_json(report);
            summary["dataset"] = dataset_path;
            summary["agent"] = agent_name;
            std::cout << summary.dump() << "\n";
            write_run_manifest(run_dir, summary,
                               needs_gateway(spec) ? eval_backend.backend : "none",
                               seed, dataset_hash(dataset));
        } else if (*sim) {
            EpisodeConfig config = preset(preset_name);
            config.agent = parse_agent_spec(agent_name, reasoner_name, model_id);
            config.opponent =
                parse_agent_spec(opponent_name, opponent_reasoner, opponent_model);
            SimulatorContext ctx;
            if (needs_gateway(config.agent) || needs_gateway(config.opponent)) {
                ctx.gateway = make_gateway(sim_backend);
                ctx.catalog =
                    std::make_shared<const TemplateCatalog>(TemplateCatalog::builtin());
            }
            std::vector<EpisodeRecord> records;
            const auto report =
                run_match(config, episodes, seed, ctx, workers, &records);
            if (!run_dir.empty()) {
                JsonlWriter writer(run_dir + "/episodes.jsonl", /*append=*/false);
                for (const auto& record : records)
                    writer.write(episode_to_json(record));
            }
            std::cout << report_to_json(report).dump() << "\n";
            write_run_manifest(run_dir,
                               json{{"preset", preset_name},
                                    {"agent", agent_name},
                                    {"opponent", opponent_name},
                                    {"episodes", episodes}},
                               ctx.gateway ? sim_backend.backend : "none", seed);
        } else if (*bias) {
            const auto pre = actions_from_jsonl(pre_path);
            std::set<std::string> optimal;
            for (const auto& text : optimal_actions)
                optimal.insert(action_key(json::parse(text)));
            json summary;
            const auto consistency =
                detect_strong_consistency(distribution_of(pre), threshold);
            summary["consistency"] = json{{"mode_action", consistency.mode_action},
                                          {"mode_frequency", consistency.mode_frequency},
                                          {"flagged", consistency.flagged},
                                          {"tie", consistency.tie},
                                          {"small_n", consistency.small_n}};
            if (!post_path.empty()) {
                const auto post = actions_from_jsonl(post_path);
                const auto shift = measure_bias_shift(pre, post, optimal, pairing);
                summary["bias_shift"] =
                    json{{"pre_mode_action", shift.pre_mode_action},
                         {"delta_mode", shift.delta_mode},
                         {"delta_optimal", shift.delta_optimal},
                         {"pairing", shift.pairing}};
            }
            std::cout << summary.dump() << "\n";
        } else if (*sweep) {
            const auto dataset = load_dataset(dataset_path);
            auto gateway = make_gateway(sweep_backend);
            auto catalog =
                std::make_shared<const TemplateCatalog>(TemplateCatalog::builtin());
            ReasonerConfig base;
            base.kind = reasoner_kind_from_string(reasoner_name);
            base.model_id = model_id;
            ReasonerAgentFactory factory = [&](const ReasonerConfig& config,
                                               std::uint64_t s) {
                auto reasoner = std::make_shared<Reasoner>(config, gateway, catalog);
                return std::make_unique<LlmAgent>(std::move(reasoner), s);
            };
            const auto points =
                temperature_sweep(base, factory, dataset, temps, sweep_repeats, seed);
            json series = json::array();
            for (const auto& p : points)
                series.push_back(json{{"temperature", p.temperature},
                                      {"mean", p.mean},
                                      {"ci_low", p.ci_low},
                                      {"ci_high", p.ci_high},
                                      {"ci_defined", p.ci_defined}});
            std::cout << json{{"points", series}}.dump() << "\n";
            write_run_manifest(run_dir, json{{"temps", temps}},
                               sweep_backend.backend, seed, dataset_hash(dataset));
        } else if (*report_cmd) {
            std::vector<RunSummary> runs;
            for (const auto& path : report_inputs)
                for (const auto& record : read_jsonl(path))
                    runs.push_back(RunSummary{record.at("model"),
                                              record.at("method"),
                                              record.at("game"),
                                              record.at("variant"),
                                              record.at("n"),
                                              record.at("win_rate")});
            const auto pooled = aggregate_runs(runs);
            const std::string csv = runs_csv(pooled);
            if (!csv_out.empty()) {
                std::ofstream out(csv_out, std::ios::binary);
                out << csv;
            }
            std::cout << csv;
        } else if (*templates_cmd) {
            TemplateCatalog::builtin().save(templates_dir);
            std::cout << json{{"out", templates_dir},
                              {"catalog_hash",
                               TemplateCatalog::builtin().content_hash()}}
                             .dump()
                      << "\n";
        }
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
