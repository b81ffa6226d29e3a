#include "arena/prompts.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace arena {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(PromptStyle style) {
    switch (style) {
        case PromptStyle::Standard: return "standard";
        case PromptStyle::React: return "react";
        case PromptStyle::Cot: return "cot";
        case PromptStyle::DreamadStage: return "dreamad_stage";
        case PromptStyle::Debate: return "debate";
        case PromptStyle::Refinement: return "refinement";
    }
    return "?";
}

PromptStyle prompt_style_from_string(const std::string& name) {
    if (name == "standard") return PromptStyle::Standard;
    if (name == "react") return PromptStyle::React;
    if (name == "cot") return PromptStyle::Cot;
    if (name == "dreamad_stage") return PromptStyle::DreamadStage;
    if (name == "debate") return PromptStyle::Debate;
    if (name == "refinement") return PromptStyle::Refinement;
    throw std::invalid_argument("unknown prompt style: " + name);
}

namespace {

struct GameText {
    std::string role;
    std::string objective;
    std::string rules;
    std::string state;
    std::string task;
    std::string action_schema;
};

GameText nim_text(bool misere) {
    GameText t;
    t.role = "You are {agent_name}, a participant in a game of Nim variants.";
    t.objective =
        misere ? "Your goal is to win the game by avoiding the last item. The person who "
                 "takes the last item loses."
               : "Your goal is to win the game by taking all remaining items on your turn, "
                 "leaving no items for your opponent. The person who takes the last item "
                 "wins.";
    t.rules =
        "There is a single pile of items. You can take between 1 and {max_take} items on "
        "your turn.";
    t.state = "There are {remaining_items} items remaining in the pile.";
    t.task =
        "Based on the current state of the game, decide how many items you will take "
        "(between 1 and {max_take}) on this turn.";
    t.action_schema =
        "action: integer // This is an action you take. Only integer between 1 and "
        "{max_take}.";
    return t;
}

GameText fib_text(bool misere) {
    GameText t;
    t.role = "You are {agent_name}, a participant in a simple Fibonacci game.";
    t.objective =
        misere ? "Your goal is to win the game by avoiding the last stone. The person who "
                 "takes the last stone loses."
               : "Your goal is to win the game by taking all remaining stones on your "
                 "turn, leaving no stones for your opponent. The person who takes the last "
                 "stones wins.";
    t.rules =
        "1. There is a single pile of stones.\n"
        "2. Players take turns one after another.\n"
        "3. The first player can take any number of stones, but not all the stones in the "
        "first move.\n"
        "4. On subsequent turns, the number of stones a player can take must be at least 1 "
        "and at most twice the number of stones the previous player took.\n" +
        std::string(misere ? "5. The player who takes the last stone loses the game."
                           : "5. The player who takes the last stone wins the game.");
    t.state = "There are {remaining_items} stones remaining in the pile.";
    t.task =
        "Based on the current state of the game, decide how many items you will take "
        "(between 1 and {take_cap}) on this turn.";
    t.action_schema =
        "action: integer // This is an action you take. Only integer between 1 and "
        "{take_cap}.";
    return t;
}

GameText kayles_text() {
    GameText t;
    t.role = "You are {agent_name}, a participant in a game of Kayles.";
    t.objective =
        "Your goal is to win the game by leaving your opponent with no valid moves. The "
        "player who takes the last pin(s) wins.";
    t.rules =
        "1. There is a single row of pins.\n"
        "2. On your turn, you can remove:\n"
        "- 1 pin,\n"
        "- 2 adjacent pins.\n"
        "3. You cannot remove non-adjacent pins or pins that have already been removed.";
    t.state =
        "The row of pins is represented as a binary string:\n"
        "-- '1' means the pin is still there.\n"
        "-- '0' means the pin has already been removed.\n"
        "Current state: {remaining_pins}";
    t.task =
        "Based on the current state of the game, decide which pin(s) you will take on "
        "this turn.";
    t.action_schema =
        "action: array // 0-based index(es) of the pin(s) you take in the binary string: "
        "[i] for one pin or [i, i+1] for two adjacent pins.";
    return t;
}

GameText chomp_text() {
    GameText t;
    t.role = "You are {agent_name}, a participant in a game of Chomp.";
    t.objective =
        "Your goal is to force your opponent to take the poisoned corner of the grid "
        "(position {poison_position}).";
    t.rules =
        "1. The game is played on a rectangular grid.\n"
        "2. On your turn, you select a position (row, col).\n"
        "3. All positions {removal_direction} the selected position are removed.\n"
        "4. The player forced to select {poison_position} loses.";
    t.state =
        "The grid is represented as a binary matrix, where '1' means the position is "
        "still available, and '0' means it is removed: {remaining_grid}";
    t.task =
        "Based on the current state of the grid, decide which position (row, col) you "
        "will select.";
    t.action_schema =
        "action: object // The position you select, as {\"row\": integer, \"col\": "
        "integer} in the displayed grid.";
    return t;
}

std::string output_block(const std::string& action_schema, bool with_reasoning) {
    std::string out =
        "Output Format:\n"
        "The output should be a Markdown code snippet with the following scheme, "
        "including leading and trailing triple backticks with \"json\" and:\n"
        "```\n"
        "{\n";
    if (with_reasoning) out += "reasoning: string // This is the reason for the action\n";
    out += action_schema + "\n}\n```";
    return out;
}

std::string assemble(const GameText& t, PromptStyle style) {
    std::string body = "#Game Role:\n" + t.role + "\n#Objective:\n" + t.objective +
                       "\n#Game Rule:\n" + t.rules + "\n#Current State:\n" + t.state +
                       "\n#Task:\n" + t.task + "\n" +
                       output_block(t.action_schema, style != PromptStyle::Standard);
    if (style == PromptStyle::Cot)
        body += "\nLet's think step-by-step. What is the best move for you?";
    return body;
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_';
}

}  // namespace

std::string template_id_for(GameKind kind, PromptStyle style) {
    return to_string(kind) + "_" + to_string(style);
}

void TemplateCatalog::insert(PromptTemplate tmpl) {
    templates_[tmpl.id] = std::move(tmpl);
}

const PromptTemplate& TemplateCatalog::at(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw PromptError("no such template: " + id);
    return it->second;
}

TemplateCatalog TemplateCatalog::builtin() {
    TemplateCatalog catalog;
    const std::vector<std::pair<std::string, GameText>> games = {
        {"nim", nim_text(false)},          {"nim_misere", nim_text(true)},
        {"fibonacci", fib_text(false)},    {"fibonacci_misere", fib_text(true)},
        {"kayles", kayles_text()},         {"chomp", chomp_text()},
    };
    for (const auto& [name, text] : games) {
        const std::string base_game = name.substr(0, name.find("_misere"));
        const bool misere_variant = name.size() != base_game.size();
        for (auto style : {PromptStyle::Standard, PromptStyle::React, PromptStyle::Cot}) {
            PromptTemplate t;
            t.id = name + "_" + to_string(style);
            t.style = style;
            t.game = base_game;
            t.source = misere_variant ? "catalog" : "published";
            t.body = assemble(text, style);
            catalog.insert(std::move(t));
        }
    }

    catalog.insert(PromptTemplate{
        "dreamad_reinterpret", PromptStyle::DreamadStage, "any", "published",
        "Below is a game description. Extract the key information.\n"
        "Game Description: {current_state}\n"
        "### Format response as:\n"
        "```\n"
        "{\n"
        "game definition: string // What is the definition of this game?\n"
        "winning condition: string // How to win the game.\n"
        "move constraints: string // What actions are allowed per turn.\n"
        "}\n"
        "```"});
    catalog.insert(PromptTemplate{
        "dreamad_strategize", PromptStyle::DreamadStage, "any", "published",
        "Based on the game information below, derive the general winning strategy in "
        "this game\n"
        "Game: {game_definition}\n"
        "Winning Condition: {winning_condition}\n"
        "Move Constraints: {move_constraints}\n"
        "Current State: {current_state_short}\n"
        "### Format response as:\n"
        "```\n"
        "{\n"
        "state evaluation: string // How to assess the game state.\n"
        "winning strategy: string // Winning strategy in this turn to win this game.\n"
        "endgame tactics: string // Best strategy in a near-win situation.\n"
        "}\n"
        "```"});
    catalog.insert(PromptTemplate{
        "dreamad_diversify", PromptStyle::DreamadStage, "any", "published",
        "Refine the initial game prompt to improve decision-making based on the Game and "
        "Strategy Information.\n"
        "Initial Prompt: {initial_prompt}\n"
        "Game and Strategy Information:\n"
        "Game: {game_definition}\n"
        "Strategy:\n"
        "- State Evaluation: {state_evaluation}\n"
        "- Winning Strategy: {winning_strategy}\n"
        "- Endgame Tactics: {endgame_tactics}\n"
        "### Format response as:\n"
        "```\n"
        "{\n"
        "optimized prompt: string // The refined prompt that clearly directs "
        "decision-making.\n"
        "}\n"
        "```"});

    catalog.insert(PromptTemplate{
        "debate_round", PromptStyle::Debate, "any", "catalog",
        "{base_prompt}\n\n"
        "Other agents gave the following answers to the same question:\n"
        "{other_answers}\n"
        "Using these answers as additional advice, reconsider your decision and provide "
        "your updated answer in the same JSON format."});
    catalog.insert(PromptTemplate{
        "refine_critique", PromptStyle::Refinement, "any", "catalog",
        "{base_prompt}\n\n"
        "Your previous answer was:\n"
        "{previous_answer}\n"
        "Write a short critique of this answer: point out any strategic mistakes or "
        "missed opportunities. Respond in plain text."});
    catalog.insert(PromptTemplate{
        "refine_revise", PromptStyle::Refinement, "any", "catalog",
        "{base_prompt}\n\n"
        "Your previous answer was:\n"
        "{previous_answer}\n"
        "A critique of that answer:\n"
        "{critique}\n"
        "Taking the critique into account, provide an improved answer in the same JSON "
        "format."});
    catalog.insert(PromptTemplate{
        "post_debate_refine", PromptStyle::Refinement, "any", "catalog",
        "{base_prompt}\n\n"
        "The debate concluded with this answer:\n"
        "{consensus_answer}\n"
        "Verify this conclusion. If it is correct, repeat it; otherwise amend it. "
        "Respond in the same JSON format."});
    return catalog;
}

std::string TemplateCatalog::content_hash() const {
    std::uint64_t h = kFnvOffset;
    for (const auto& [id, t] : templates_) {
        h = fnv1a(h, id);
        h = fnv1a(h, to_string(t.style));
        h = fnv1a(h, t.game);
        h = fnv1a(h, t.source);
        h = fnv1a(h, t.body);
    }
    return hex64(h);
}

void TemplateCatalog::save(const std::string& directory) const {
    fs::create_directories(directory);
    for (const auto& [id, t] : templates_) {
        std::ofstream out(fs::path(directory) / (id + ".txt"), std::ios::binary);
        out << "id: " << t.id << '\n'
            << "style: " << to_string(t.style) << '\n'
            << "game: " << t.game << '\n'
            << "source: " << t.source << '\n'
            << "---\n"
            << t.body;
    }
}

TemplateCatalog TemplateCatalog::load(const std::string& directory) {
    TemplateCatalog catalog;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory))
        if (entry.path().extension() == ".txt") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string content = buffer.str();
        PromptTemplate t;
        std::istringstream lines(content);
        std::string line;
        while (std::getline(lines, line)) {
            if (line == "---") break;
            const auto colon = line.find(": ");
            if (colon == std::string::npos)
                throw PromptError("bad front-matter in " + file.string());
            const std::string key = line.substr(0, colon);
            const std::string value = line.substr(colon + 2);
            if (key == "id") t.id = value;
            else if (key == "style") t.style = prompt_style_from_string(value);
            else if (key == "game") t.game = value;
            else if (key == "source") t.source = value;
            else throw PromptError("unknown front-matter key '" + key + "' in " + file.string());
        }
        const auto sep = content.find("\n---\n");
        if (t.id.empty() || sep == std::string::npos)
            throw PromptError("missing front-matter in " + file.string());
        t.body = content.substr(sep + 5);
        catalog.insert(std::move(t));
    }
    return catalog;
}

std::string render(const PromptTemplate& tmpl, const Bindings& bindings) {
    const std::string& body = tmpl.body;
    std::string out;
    out.reserve(body.size());
    for (std::size_t i = 0; i < body.size();) {
        if (body[i] != '{') {
            out += body[i++];
            continue;
        }
        std::size_t j = i + 1;
        while (j < body.size() && is_ident_char(body[j])) ++j;
        if (j > i + 1 && j < body.size() && body[j] == '}') {
            const std::string name = body.substr(i + 1, j - i - 1);
            auto it = bindings.find(name);
            if (it == bindings.end()) throw UnboundPlaceholder(name);
            out += it->second;
            i = j + 1;
        } else {
            out += body[i++];  // literal brace (schema block)
        }
    }
    return out;
}

namespace {

// Locates a balanced {...} span starting at `start`, honoring strings.
std::optional<std::string> balanced_object_at(const std::string& text, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
        } else if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return text.substr(start, i - start + 1);
        }
    }
    return std::nullopt;
}

json extract_json(const std::string& text, bool strict) {
    // Last fenced block first.
    std::vector<std::size_t> fences;
    for (std::size_t pos = text.find("```"); pos != std::string::npos;
         pos = text.find("```", pos + 3))
        fences.push_back(pos);
    for (std::size_t k = fences.size(); k >= 2; k -= 2) {
        std::size_t open = fences[k - 2] + 3;
        const std::size_t close = fences[k - 1];
        std::string block = text.substr(open, close - open);
        const auto lang_end = block.find('\n');
        if (lang_end != std::string::npos) {
            std::string lang = block.substr(0, lang_end);
            lang.erase(std::remove_if(lang.begin(), lang.end(), ::isspace), lang.end());
            if (lang == "json" || lang == "JSON" || lang.empty())
                block = block.substr(lang_end + 1);
        }
        try {
            return json::parse(block);
        } catch (const json::parse_error& e) {
            throw MalformedJson(e.what());
        }
    }
    if (strict) throw NoCodeBlock();
    // Fence-less fallback: last syntactically valid JSON object in the text.
    for (std::size_t i = text.rfind('{'); i != std::string::npos;
         i = (i == 0 ? std::string::npos : text.rfind('{', i - 1))) {
        if (auto candidate = balanced_object_at(text, i)) {
            if (json::accept(*candidate)) return json::parse(*candidate);
        }
    }
    throw NoCodeBlock();
}

std::vector<std::size_t> kayles_row_offsets(const KaylesState& state) {
    std::vector<std::size_t> offsets = {0};
    for (const auto& row : state.rows) offsets.push_back(offsets.back() + row.size());
    return offsets;
}

}  // namespace

ParsedResponse parse_response(const std::string& text, bool strict) {
    const json j = extract_json(text, strict);
    if (!j.is_object()) throw MalformedJson("top-level JSON value is not an object");
    if (!j.contains("action")) throw MissingAction();
    ParsedResponse out;
    out.raw = text;
    out.action_payload = j.at("action");
    if (j.contains("reasoning") && j.at("reasoning").is_string())
        out.reasoning = j.at("reasoning").get<std::string>();
    return out;
}

std::map<std::string, std::string> parse_stage_fields(
    const std::string& text, const std::vector<std::string>& required_fields,
    bool strict) {
    const json j = extract_json(text, strict);
    if (!j.is_object()) throw MalformedJson("stage JSON value is not an object");
    std::map<std::string, std::string> out;
    for (const auto& field : required_fields) {
        if (!j.contains(field) || !j.at(field).is_string() ||
            j.at(field).get<std::string>().empty())
            throw MissingField(field);
        out[field] = j.at(field).get<std::string>();
    }
    return out;
}

Move decode_move(const json& action, const GameState& state,
                 ChompOrientation orientation) {
    if (const auto* nim = std::get_if<NimState>(&state)) {
        if (action.is_number_integer() && nim->piles.size() == 1)
            return NimMove{0, action.get<int>()};
        if (action.is_object() && action.contains("pile") && action.contains("count"))
            return NimMove{action.at("pile").get<int>(), action.at("count").get<int>()};
        throw UndecodableAction("expected an integer count" +
                                std::string(nim->piles.size() > 1
                                                ? " or {pile, count} object"
                                                : ""));
    }
    if (std::holds_alternative<FibState>(state)) {
        if (!action.is_number_integer()) throw UndecodableAction("expected an integer count");
        return FibMove{action.get<int>()};
    }
    if (const auto* kayles = std::get_if<KaylesState>(&state)) {
        if (!action.is_array() || action.empty() || action.size() > 2)
            throw UndecodableAction("expected [pin] or [pin, pin+1]");
        std::vector<long long> pins;
        for (const auto& v : action) {
            if (!v.is_number_integer()) throw UndecodableAction("pin index is not an integer");
            pins.push_back(v.get<long long>());
        }
        const auto offsets = kayles_row_offsets(*kayles);
        const long long total = static_cast<long long>(offsets.back());
        for (long long p : pins)
            if (p < 0 || p >= total) throw UndecodableAction("pin index out of range");
        if (pins.size() == 2 && pins[1] != pins[0] + 1)
            throw UndecodableAction("two pins must be adjacent indices");
        std::size_t row = 0;
        while (static_cast<std::size_t>(pins[0]) >= offsets[row + 1]) ++row;
        const int start = static_cast<int>(pins[0] - offsets[row]);
        if (pins.size() == 2 &&
            static_cast<std::size_t>(pins[1]) >= offsets[row + 1])
            throw UndecodableAction("pin pair crosses a row boundary");
        return KaylesMove{static_cast<int>(row), start, static_cast<int>(pins.size())};
    }
    const auto& chomp = std::get<ChompState>(state);
    if (!action.is_object() || !action.contains("row") || !action.contains("col"))
        throw UndecodableAction("expected {row, col} object");
    const json& jr = action.at("row");
    const json& jc = action.at("col");
    if (!jr.is_number_integer() || !jc.is_number_integer())
        throw UndecodableAction("row/col are not integers");
    const ChompMove display{jr.get<int>(), jc.get<int>()};
    if (display.row < 0 || display.row >= chomp.n_rows || display.col < 0 ||
        display.col >= chomp.n_cols)
        throw UndecodableAction("position outside the grid");
    return chomp_from_display(chomp, display, orientation);
}

json encode_action(const Move& move, const GameState& state,
                   ChompOrientation orientation) {
    if (const auto* m = std::get_if<NimMove>(&move)) {
        const auto& nim = std::get<NimState>(state);
        if (nim.piles.size() == 1) return m->count;
        return json{{"pile", m->pile_index}, {"count", m->count}};
    }
    if (const auto* f = std::get_if<FibMove>(&move)) return f->count;
    if (const auto* k = std::get_if<KaylesMove>(&move)) {
        const auto& kayles = std::get<KaylesState>(state);
        const auto offsets = kayles_row_offsets(kayles);
        const long long base = static_cast<long long>(offsets[k->row_index]) + k->start_index;
        json arr = json::array();
        for (int i = 0; i < k->length; ++i) arr.push_back(base + i);
        return arr;
    }
    const auto& chomp = std::get<ChompState>(state);
    const auto display = chomp_to_display(chomp, std::get<ChompMove>(move), orientation);
    return json{{"row", display.row}, {"col", display.col}};
}

Bindings state_bindings(const GameState& state, const std::string& agent_name,
                        ChompOrientation orientation) {
    Bindings b;
    b["agent_name"] = agent_name;
    if (const auto* nim = std::get_if<NimState>(&state)) {
        b["max_take"] = std::to_string(nim->max_take);
        b["remaining_items"] = render_state(state);
    } else if (const auto* fib = std::get_if<FibState>(&state)) {
        b["remaining_items"] = std::to_string(fib->remaining);
        b["take_cap"] = std::to_string(std::min(fib->take_cap, fib->remaining));
    } else if (std::holds_alternative<KaylesState>(state)) {
        b["remaining_pins"] = render_state(state);
    } else {
        const auto& chomp = std::get<ChompState>(state);
        b["remaining_grid"] = render_state(state, orientation);
        const auto poison = chomp_to_display(chomp, ChompMove{0, 0}, orientation);
        b["poison_position"] =
            "(" + std::to_string(poison.row) + ", " + std::to_string(poison.col) + ")";
        switch (orientation) {
            case ChompOrientation::TopLeft: b["removal_direction"] = "to the right and below"; break;
            case ChompOrientation::TopRight: b["removal_direction"] = "to the left and below"; break;
            case ChompOrientation::BottomLeft: b["removal_direction"] = "to the right and above"; break;
            case ChompOrientation::BottomRight: b["removal_direction"] = "to the left and above"; break;
        }
    }
    return b;
}

}  // namespace arena
