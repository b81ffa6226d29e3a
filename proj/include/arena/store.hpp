#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/game.hpp"

namespace arena {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct StoreError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorruptRecord : StoreError {
    CorruptRecord(const std::string& file, std::size_t line, const std::string& why)
        : StoreError(file + ":" + std::to_string(line) + ": corrupt record: " + why),
          line_number(line) {}
    std::size_t line_number;
};

struct SchemaVersionMismatch : StoreError {
    SchemaVersionMismatch(int expected, int found, const std::string& file,
                          std::size_t line)
        : StoreError(file + ":" + std::to_string(line) + ": schema version " +
                     std::to_string(found) + ", expected " + std::to_string(expected)),
          expected(expected),
          found(found) {}
    int expected;
    int found;
};

// Append-only JSONL writer; every line carries the schema version.
class JsonlWriter {
  public:
    explicit JsonlWriter(const std::string& path, bool append = true);
    void write(const nlohmann::json& record);
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
};

// Reads a JSONL file back into records, validating the schema version and
// reporting the line number of any corruption.
std::vector<nlohmann::json> read_jsonl(const std::string& path);

// CSV with minimal quoting (fields containing comma/quote/newline).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::string csv_to_string(const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows);

struct RunManifest {
    std::string run_id;
    std::string timestamp;  // ISO-8601 UTC
    nlohmann::json config;
    std::string template_catalog_hash;
    std::string dataset_hash;
    std::vector<std::uint64_t> seeds;
    std::string backend;  // live | replay | scripted
    std::string tool_version = kToolVersion;
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

void save_manifest(const std::string& run_dir, const RunManifest& manifest);
RunManifest load_manifest(const std::string& run_dir);

std::string iso8601_utc_now();

// JSON codecs for the game domain (named functions; the underlying types are
// std::variant, which nlohmann does not serialize on its own).
nlohmann::json state_to_json(const GameState& state);
GameState state_from_json(const nlohmann::json& j);
nlohmann::json move_to_json(const Move& move);
Move move_from_json(const nlohmann::json& j);

}  // namespace arena
