#include "arena/game.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace arena {

GameKind kind_of(const GameState& state) {
    switch (state.index()) {
        case 0: return GameKind::Nim;
        case 1: return GameKind::Fibonacci;
        case 2: return GameKind::Kayles;
        default: return GameKind::Chomp;
    }
}

GameKind kind_of(const Move& move) {
    switch (move.index()) {
        case 0: return GameKind::Nim;
        case 1: return GameKind::Fibonacci;
        case 2: return GameKind::Kayles;
        default: return GameKind::Chomp;
    }
}

GameState canonicalize(const GameState& state) {
    if (const auto* chomp = std::get_if<ChompState>(&state)) {
        ChompState out = *chomp;
        int cap = out.n_rows;
        for (auto& h : out.col_heights) {
            cap = std::min(cap, std::max(h, 0));
            h = cap;
        }
        return out;
    }
    return state;
}

std::vector<Move> legal_moves(const GameState& state) {
    std::vector<Move> moves;
    if (const auto* nim = std::get_if<NimState>(&state)) {
        for (std::size_t i = 0; i < nim->piles.size(); ++i) {
            const int cap = std::min(nim->max_take, nim->piles[i]);
            for (int c = 1; c <= cap; ++c)
                moves.push_back(NimMove{static_cast<int>(i), c});
        }
    } else if (const auto* fib = std::get_if<FibState>(&state)) {
        const int cap = std::min(fib->take_cap, fib->remaining);
        for (int c = 1; c <= cap; ++c) moves.push_back(FibMove{c});
    } else if (const auto* kayles = std::get_if<KaylesState>(&state)) {
        for (std::size_t r = 0; r < kayles->rows.size(); ++r) {
            const auto& row = kayles->rows[r];
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (!row[i]) continue;
                moves.push_back(KaylesMove{static_cast<int>(r), static_cast<int>(i), 1});
                if (i + 1 < row.size() && row[i + 1])
                    moves.push_back(KaylesMove{static_cast<int>(r), static_cast<int>(i), 2});
            }
        }
    } else {
        const auto& chomp = std::get<ChompState>(state);
        for (int r = 0; r < chomp.n_rows; ++r)
            for (int c = 0; c < chomp.n_cols; ++c) {
                if (r == 0 && c == 0) continue;  // poison is never a legal bite
                if (chomp.cell_present(r, c)) moves.push_back(ChompMove{r, c});
            }
    }
    std::sort(moves.begin(), moves.end());
    return moves;
}

bool is_legal(const GameState& state, const Move& move) {
    if (kind_of(state) != kind_of(move)) return false;
    const auto all = legal_moves(state);
    return std::find(all.begin(), all.end(), move) != all.end();
}

GameState apply(const GameState& state, const Move& move) {
    if (!is_legal(state, move))
        throw IllegalMove("move " + to_string(move) + " is not legal in this state");
    if (const auto* nim = std::get_if<NimState>(&state)) {
        NimState out = *nim;
        const auto& m = std::get<NimMove>(move);
        out.piles[m.pile_index] -= m.count;
        return out;
    }
    if (const auto* fib = std::get_if<FibState>(&state)) {
        FibState out = *fib;
        const auto& m = std::get<FibMove>(move);
        out.remaining -= m.count;
        out.take_cap = std::min(2 * m.count, out.remaining);
        if (out.remaining == 0) out.take_cap = 1;
        return out;
    }
    if (const auto* kayles = std::get_if<KaylesState>(&state)) {
        KaylesState out = *kayles;
        const auto& m = std::get<KaylesMove>(move);
        for (int i = 0; i < m.length; ++i) out.rows[m.row_index][m.start_index + i] = 0;
        return out;
    }
    const auto& chomp = std::get<ChompState>(state);
    const auto& m = std::get<ChompMove>(move);
    ChompState out = chomp;
    for (int c = m.col; c < out.n_cols; ++c)
        out.col_heights[c] = std::min(out.col_heights[c], m.row);
    return out;
}

bool is_terminal(const GameState& state, PlayConvention) {
    return legal_moves(state).empty();
}

Winner outcome(const GameState& state, PlayConvention convention) {
    if (!is_terminal(state, convention))
        throw std::logic_error("outcome queried on a nonterminal state");
    // Normal: mover cannot move, last mover (opponent) wins.
    // Misere: opponent made the last move and thereby loses.
    // Poison: mover is forced to take the poison cell and loses.
    return convention == PlayConvention::Misere ? Winner::Mover : Winner::Opponent;
}

int total_material(const GameState& state) {
    if (const auto* nim = std::get_if<NimState>(&state))
        return std::accumulate(nim->piles.begin(), nim->piles.end(), 0);
    if (const auto* fib = std::get_if<FibState>(&state)) return fib->remaining;
    if (const auto* kayles = std::get_if<KaylesState>(&state)) {
        int n = 0;
        for (const auto& row : kayles->rows)
            for (auto pin : row) n += pin;
        return n;
    }
    const auto& chomp = std::get<ChompState>(state);
    return std::accumulate(chomp.col_heights.begin(), chomp.col_heights.end(), 0);
}

namespace {

std::pair<int, int> display_dims(const ChompState& s) { return {s.n_rows, s.n_cols}; }

ChompMove map_coords(const ChompState& s, int r, int c, ChompOrientation o) {
    auto [nr, nc] = display_dims(s);
    switch (o) {
        case ChompOrientation::TopLeft: return {r, c};
        case ChompOrientation::TopRight: return {r, nc - 1 - c};
        case ChompOrientation::BottomLeft: return {nr - 1 - r, c};
        case ChompOrientation::BottomRight: return {nr - 1 - r, nc - 1 - c};
    }
    return {r, c};
}

}  // namespace

ChompMove chomp_to_display(const ChompState& state, const ChompMove& move,
                           ChompOrientation orientation) {
    // The maps are involutions, so display->canonical uses the same transform.
    return map_coords(state, move.row, move.col, orientation);
}

ChompMove chomp_from_display(const ChompState& state, const ChompMove& move,
                             ChompOrientation orientation) {
    return map_coords(state, move.row, move.col, orientation);
}

std::string render_state(const GameState& state, ChompOrientation orientation) {
    std::ostringstream os;
    if (const auto* nim = std::get_if<NimState>(&state)) {
        for (std::size_t i = 0; i < nim->piles.size(); ++i) {
            if (i) os << ',';
            os << nim->piles[i];
        }
    } else if (const auto* fib = std::get_if<FibState>(&state)) {
        os << fib->remaining;
    } else if (const auto* kayles = std::get_if<KaylesState>(&state)) {
        for (std::size_t r = 0; r < kayles->rows.size(); ++r) {
            if (r) os << ',';
            for (auto pin : kayles->rows[r]) os << (pin ? '1' : '0');
        }
    } else {
        const auto& chomp = std::get<ChompState>(state);
        os << '[';
        for (int r = 0; r < chomp.n_rows; ++r) {
            if (r) os << ',';
            os << '[';
            for (int c = 0; c < chomp.n_cols; ++c) {
                if (c) os << ',';
                const auto canon = map_coords(chomp, r, c, orientation);
                os << (chomp.cell_present(canon.row, canon.col) ? '1' : '0');
            }
            os << ']';
        }
        os << ']';
    }
    return os.str();
}

namespace {

int parse_int_at(const std::string& text, std::size_t& pos) {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw ParseError("expected digit", start);
    return std::stoi(text.substr(start, pos - start));
}

}  // namespace

GameState parse_nim(const std::string& text, int max_take) {
    NimState out;
    out.max_take = max_take;
    std::size_t pos = 0;
    while (true) {
        out.piles.push_back(parse_int_at(text, pos));
        if (pos == text.size()) break;
        if (text[pos] != ',') throw ParseError("expected ','", pos);
        ++pos;
    }
    return out;
}

GameState parse_fib(const std::string& text, int take_cap) {
    std::size_t pos = 0;
    FibState out;
    out.remaining = parse_int_at(text, pos);
    if (pos != text.size()) throw ParseError("trailing characters", pos);
    out.take_cap = take_cap;
    return out;
}

GameState parse_kayles(const std::string& text) {
    KaylesState out;
    out.rows.emplace_back();
    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        const char ch = text[pos];
        if (ch == ',') {
            if (out.rows.back().empty()) throw ParseError("empty row", pos);
            out.rows.emplace_back();
        } else if (ch == '0' || ch == '1') {
            out.rows.back().push_back(ch == '1' ? 1 : 0);
        } else {
            throw ParseError("expected '0', '1' or ','", pos);
        }
    }
    if (out.rows.back().empty()) throw ParseError("empty row", text.size());
    return out;
}

GameState parse_chomp(const std::string& text, ChompOrientation orientation) {
    // Grid of 0/1 as JSON array-of-arrays; also accepts rows as bare
    // digit strings separated by newlines or commas.
    std::vector<std::vector<int>> grid;
    std::vector<int> row;
    bool saw_bracket = false;
    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        const char ch = text[pos];
        if (ch == '[') {
            saw_bracket = true;
        } else if (ch == ']' || ch == '\n') {
            if (!row.empty()) {
                grid.push_back(row);
                row.clear();
            }
        } else if (ch == '0' || ch == '1') {
            row.push_back(ch - '0');
        } else if (ch == ',' || ch == ' ' || ch == '\r' || ch == '\t') {
            if (!saw_bracket && ch == ',' && !row.empty()) {
                grid.push_back(row);
                row.clear();
            }
        } else {
            throw ParseError("unexpected character in grid", pos);
        }
    }
    if (!row.empty()) grid.push_back(row);
    if (grid.empty()) throw ParseError("empty grid", 0);
    const int n_rows = static_cast<int>(grid.size());
    const int n_cols = static_cast<int>(grid[0].size());
    for (const auto& r : grid)
        if (static_cast<int>(r.size()) != n_cols) throw ParseError("ragged grid rows", 0);

    ChompState out;
    out.n_rows = n_rows;
    out.n_cols = n_cols;
    out.col_heights.assign(n_cols, 0);
    for (int r = 0; r < n_rows; ++r)
        for (int c = 0; c < n_cols; ++c) {
            if (!grid[r][c]) continue;
            const auto canon = map_coords(out, r, c, orientation);
            out.col_heights[canon.col] = std::max(out.col_heights[canon.col], canon.row + 1);
        }
    // A legal position is downward closed; reject grids with holes.
    for (int r = 0; r < n_rows; ++r)
        for (int c = 0; c < n_cols; ++c) {
            const auto canon = map_coords(out, r, c, orientation);
            const bool present = canon.row < out.col_heights[canon.col];
            if (present != (grid[r][c] != 0))
                throw ParseError("grid is not a valid staircase position", 0);
        }
    const auto canonical = canonicalize(GameState{out});
    if (canonical != GameState{out})
        throw ParseError("grid is not a valid staircase position", 0);
    return canonical;
}

std::string to_string(GameKind kind) {
    switch (kind) {
        case GameKind::Nim: return "nim";
        case GameKind::Fibonacci: return "fibonacci";
        case GameKind::Kayles: return "kayles";
        case GameKind::Chomp: return "chomp";
    }
    return "?";
}

std::string to_string(PlayConvention convention) {
    switch (convention) {
        case PlayConvention::Normal: return "normal";
        case PlayConvention::Misere: return "misere";
        case PlayConvention::Poison: return "poison";
    }
    return "?";
}

std::string to_string(ChompOrientation orientation) {
    switch (orientation) {
        case ChompOrientation::TopLeft: return "top-left";
        case ChompOrientation::TopRight: return "top-right";
        case ChompOrientation::BottomLeft: return "bottom-left";
        case ChompOrientation::BottomRight: return "bottom-right";
    }
    return "?";
}

std::string to_string(const Move& move) {
    std::ostringstream os;
    if (const auto* m = std::get_if<NimMove>(&move)) {
        os << "nim(pile=" << m->pile_index << ",take=" << m->count << ')';
    } else if (const auto* f = std::get_if<FibMove>(&move)) {
        os << "fib(take=" << f->count << ')';
    } else if (const auto* k = std::get_if<KaylesMove>(&move)) {
        os << "kayles(row=" << k->row_index << ",start=" << k->start_index
           << ",len=" << k->length << ')';
    } else {
        const auto& c = std::get<ChompMove>(move);
        os << "chomp(row=" << c.row << ",col=" << c.col << ')';
    }
    return os.str();
}

GameKind game_kind_from_string(const std::string& name) {
    if (name == "nim") return GameKind::Nim;
    if (name == "fibonacci" || name == "fib") return GameKind::Fibonacci;
    if (name == "kayles") return GameKind::Kayles;
    if (name == "chomp") return GameKind::Chomp;
    throw std::invalid_argument("unknown game kind: " + name);
}

PlayConvention convention_from_string(const std::string& name) {
    if (name == "normal") return PlayConvention::Normal;
    if (name == "misere") return PlayConvention::Misere;
    if (name == "poison") return PlayConvention::Poison;
    throw std::invalid_argument("unknown play convention: " + name);
}

ChompOrientation orientation_from_string(const std::string& name) {
    if (name == "top-left") return ChompOrientation::TopLeft;
    if (name == "top-right") return ChompOrientation::TopRight;
    if (name == "bottom-left") return ChompOrientation::BottomLeft;
    if (name == "bottom-right") return ChompOrientation::BottomRight;
    throw std::invalid_argument("unknown orientation: " + name);
}

}  // namespace arena
