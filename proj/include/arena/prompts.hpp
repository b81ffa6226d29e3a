#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/game.hpp"

namespace arena {

enum class PromptStyle { Standard, React, Cot, DreamadStage, Debate, Refinement };

struct PromptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnboundPlaceholder : PromptError {
    explicit UnboundPlaceholder(const std::string& name)
        : PromptError("unbound placeholder: {" + name + "}") {}
};
struct NoCodeBlock : PromptError {
    NoCodeBlock() : PromptError("no fenced code block or JSON object in response") {}
};
struct MalformedJson : PromptError {
    explicit MalformedJson(const std::string& why) : PromptError("malformed JSON: " + why) {}
};
struct MissingAction : PromptError {
    MissingAction() : PromptError("response JSON has no \"action\" field") {}
};
struct UndecodableAction : PromptError {
    explicit UndecodableAction(const std::string& why)
        : PromptError("undecodable action: " + why) {}
};
struct MissingField : PromptError {
    explicit MissingField(const std::string& name)
        : PromptError("stage response missing field: " + name) {}
};

struct PromptTemplate {
    std::string id;
    PromptStyle style = PromptStyle::Standard;
    std::string game;    // "nim", "fibonacci", "kayles", "chomp" or "any"
    std::string source;  // "published" for externally fixed wording, else "catalog"
    std::string body;
};

class TemplateCatalog {
  public:
    static TemplateCatalog builtin();
    static TemplateCatalog load(const std::string& directory);
    void save(const std::string& directory) const;

    const PromptTemplate& at(const std::string& id) const;
    bool contains(const std::string& id) const { return templates_.count(id) > 0; }
    void insert(PromptTemplate tmpl);
    const std::map<std::string, PromptTemplate>& all() const { return templates_; }

    // Stable content hash recorded in run manifests.
    std::string content_hash() const;

  private:
    std::map<std::string, PromptTemplate> templates_;
};

using Bindings = std::map<std::string, std::string>;

// Substitutes {identifier} placeholders; throws UnboundPlaceholder on any
// unbound one. Lone braces (JSON schema blocks) are left untouched.
std::string render(const PromptTemplate& tmpl, const Bindings& bindings);

struct ParsedResponse {
    nlohmann::json action_payload;
    std::optional<std::string> reasoning;
    std::string raw;
};

// Extracts the last fenced code block (with or without a "json" tag) and
// parses it; when strict is false, falls back to scanning for the last
// syntactically valid JSON object anywhere in the text.
ParsedResponse parse_response(const std::string& text, bool strict = false);

// Maps an action payload to a Move for the given state. Chomp payloads are
// in display orientation. Shape errors raise UndecodableAction; plainly
// illegal but well-formed moves (e.g. taking too many items) are returned
// as-is for the caller's repair policy.
Move decode_move(const nlohmann::json& action, const GameState& state,
                 ChompOrientation orientation = ChompOrientation::TopLeft);

// Encodes a move in the response-schema shape (the inverse of decode_move).
nlohmann::json encode_action(const Move& move, const GameState& state,
                             ChompOrientation orientation = ChompOrientation::TopLeft);

// Parses a DReaMAD stage reply and requires the given fields.
std::map<std::string, std::string> parse_stage_fields(
    const std::string& text, const std::vector<std::string>& required_fields,
    bool strict = false);

// State bindings for the game templates: remaining_items / remaining_pins /
// remaining_grid plus rule parameters.
Bindings state_bindings(const GameState& state, const std::string& agent_name,
                        ChompOrientation orientation = ChompOrientation::TopLeft);

std::string template_id_for(GameKind kind, PromptStyle style);

std::string to_string(PromptStyle style);
PromptStyle prompt_style_from_string(const std::string& name);

}  // namespace arena
