#include "arena/store.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <sstream>

namespace arena {

namespace fs = std::filesystem;
using nlohmann::json;

JsonlWriter::JsonlWriter(const std::string& path, bool append) : path_(path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    out_.open(path, append ? std::ios::app | std::ios::binary
                           : std::ios::trunc | std::ios::binary);
    if (!out_) throw StoreError("cannot open for writing: " + path);
}

void JsonlWriter::write(const json& record) {
    out_ << json{{"schema_version", kSchemaVersion}, {"record", record}}.dump() << '\n';
    out_.flush();
    if (!out_) throw StoreError("write failed: " + path_);
}

std::vector<json> read_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot open for reading: " + path);
    std::vector<json> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        json entry;
        try {
            entry = json::parse(line);
        } catch (const json::parse_error& e) {
            throw CorruptRecord(path, line_number, e.what());
        }
        if (!entry.is_object() || !entry.contains("schema_version") ||
            !entry.contains("record"))
            throw CorruptRecord(path, line_number, "missing schema_version/record");
        const int version = entry.at("schema_version").get<int>();
        if (version != kSchemaVersion)
            throw SchemaVersionMismatch(kSchemaVersion, version, path, line_number);
        records.push_back(entry.at("record"));
    }
    return records;
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void csv_row(std::ostream& os, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(row[i]);
    }
    os << '\n';
}

}  // namespace

std::string csv_to_string(const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream os;
    csv_row(os, header);
    for (const auto& row : rows) csv_row(os, row);
    return os.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw StoreError("cannot open for writing: " + path);
    out << csv_to_string(header, rows);
}

void to_json(json& j, const RunManifest& m) {
    j = json{{"run_id", m.run_id},
             {"timestamp", m.timestamp},
             {"config", m.config},
             {"template_catalog_hash", m.template_catalog_hash},
             {"dataset_hash", m.dataset_hash},
             {"seeds", m.seeds},
             {"backend", m.backend},
             {"tool_version", m.tool_version}};
}

void from_json(const json& j, RunManifest& m) {
    j.at("run_id").get_to(m.run_id);
    j.at("timestamp").get_to(m.timestamp);
    m.config = j.at("config");
    j.at("template_catalog_hash").get_to(m.template_catalog_hash);
    j.at("dataset_hash").get_to(m.dataset_hash);
    j.at("seeds").get_to(m.seeds);
    j.at("backend").get_to(m.backend);
    j.at("tool_version").get_to(m.tool_version);
}

void save_manifest(const std::string& run_dir, const RunManifest& manifest) {
    fs::create_directories(run_dir);
    std::ofstream out(fs::path(run_dir) / "manifest.json", std::ios::binary);
    if (!out) throw StoreError("cannot write manifest in " + run_dir);
    out << json(manifest).dump(2) << '\n';
}

RunManifest load_manifest(const std::string& run_dir) {
    std::ifstream in(fs::path(run_dir) / "manifest.json", std::ios::binary);
    if (!in) throw StoreError("no manifest.json in " + run_dir);
    json j;
    in >> j;
    return j.get<RunManifest>();
}

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json state_to_json(const GameState& state) {
    json j{{"game", to_string(kind_of(state))}};
    if (const auto* nim = std::get_if<NimState>(&state)) {
        j["piles"] = nim->piles;
        j["max_take"] = nim->max_take;
    } else if (const auto* fib = std::get_if<FibState>(&state)) {
        j["remaining"] = fib->remaining;
        j["take_cap"] = fib->take_cap;
    } else if (const auto* kayles = std::get_if<KaylesState>(&state)) {
        json rows = json::array();
        for (const auto& row : kayles->rows) {
            std::string bits;
            for (auto b : row) bits += b ? '1' : '0';
            rows.push_back(bits);
        }
        j["rows"] = rows;
    } else {
        const auto& chomp = std::get<ChompState>(state);
        j["col_heights"] = chomp.col_heights;
        j["n_rows"] = chomp.n_rows;
        j["n_cols"] = chomp.n_cols;
    }
    return j;
}

GameState state_from_json(const json& j) {
    switch (game_kind_from_string(j.at("game").get<std::string>())) {
        case GameKind::Nim: {
            NimState s;
            j.at("piles").get_to(s.piles);
            j.at("max_take").get_to(s.max_take);
            return s;
        }
        case GameKind::Fibonacci: {
            FibState s;
            j.at("remaining").get_to(s.remaining);
            j.at("take_cap").get_to(s.take_cap);
            return s;
        }
        case GameKind::Kayles: {
            KaylesState s;
            for (const auto& bits : j.at("rows")) {
                s.rows.emplace_back();
                for (char c : bits.get<std::string>())
                    s.rows.back().push_back(c == '1' ? 1 : 0);
            }
            return s;
        }
        case GameKind::Chomp: {
            ChompState s;
            j.at("col_heights").get_to(s.col_heights);
            j.at("n_rows").get_to(s.n_rows);
            j.at("n_cols").get_to(s.n_cols);
            return s;
        }
    }
    throw StoreError("unknown game kind in state JSON");
}

json move_to_json(const Move& move) {
    json j{{"game", to_string(kind_of(move))}};
    if (const auto* m = std::get_if<NimMove>(&move)) {
        j["pile"] = m->pile_index;
        j["count"] = m->count;
    } else if (const auto* f = std::get_if<FibMove>(&move)) {
        j["count"] = f->count;
    } else if (const auto* k = std::get_if<KaylesMove>(&move)) {
        j["row"] = k->row_index;
        j["start"] = k->start_index;
        j["length"] = k->length;
    } else {
        const auto& c = std::get<ChompMove>(move);
        j["row"] = c.row;
        j["col"] = c.col;
    }
    return j;
}

Move move_from_json(const json& j) {
    switch (game_kind_from_string(j.at("game").get<std::string>())) {
        case GameKind::Nim:
            return NimMove{j.at("pile").get<int>(), j.at("count").get<int>()};
        case GameKind::Fibonacci: return FibMove{j.at("count").get<int>()};
        case GameKind::Kayles:
            return KaylesMove{j.at("row").get<int>(), j.at("start").get<int>(),
                              j.at("length").get<int>()};
        case GameKind::Chomp:
            return ChompMove{j.at("row").get<int>(), j.at("col").get<int>()};
    }
    throw StoreError("unknown game kind in move JSON");
}

}  // namespace arena
