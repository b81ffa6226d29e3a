#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace arena {

enum class GameKind { Nim, Fibonacci, Kayles, Chomp };

// Normal: last mover wins. Misere: last mover loses. Poison: the player
// forced to take the origin cell loses (Chomp).
enum class PlayConvention { Normal, Misere, Poison };

// Where the poison cell appears in rendered grids. Internally poison is
// always at (0,0); these only affect prompts and external coordinates.
enum class ChompOrientation { TopLeft, TopRight, BottomLeft, BottomRight };

struct NimState {
    std::vector<int> piles;
    int max_take = 3;
    auto operator<=>(const NimState&) const = default;
};

struct FibState {
    int remaining = 0;
    int take_cap = 1;  // opening state uses cap = remaining - 1
    auto operator<=>(const FibState&) const = default;
};

struct KaylesState {
    std::vector<std::vector<std::uint8_t>> rows;  // 1 = pin standing
    auto operator<=>(const KaylesState&) const = default;
};

struct ChompState {
    std::vector<int> col_heights;  // nonincreasing, poison at (0,0)
    int n_rows = 0;
    int n_cols = 0;
    auto operator<=>(const ChompState&) const = default;

    bool cell_present(int row, int col) const {
        return col >= 0 && col < n_cols && row >= 0 && row < col_heights[col];
    }
};

using GameState = std::variant<NimState, FibState, KaylesState, ChompState>;

struct NimMove {
    int pile_index = 0;
    int count = 0;
    auto operator<=>(const NimMove&) const = default;
};

struct FibMove {
    int count = 0;
    auto operator<=>(const FibMove&) const = default;
};

struct KaylesMove {
    int row_index = 0;
    int start_index = 0;
    int length = 1;  // 1 or 2; length 2 needs adjacent standing pins
    auto operator<=>(const KaylesMove&) const = default;
};

struct ChompMove {
    int row = 0;  // canonical coordinates
    int col = 0;
    auto operator<=>(const ChompMove&) const = default;
};

using Move = std::variant<NimMove, FibMove, KaylesMove, ChompMove>;

struct IllegalMove : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
};

GameKind kind_of(const GameState& state);
GameKind kind_of(const Move& move);

// Idempotent: clamps Chomp heights to a monotone profile, leaves the
// other games untouched.
GameState canonicalize(const GameState& state);

// Total; deterministic sorted order. Empty result <=> terminal state.
// Chomp never lists the poison cell: a board with only poison left has
// no legal moves, which makes Poison structurally equal to Normal play.
std::vector<Move> legal_moves(const GameState& state);

bool is_legal(const GameState& state, const Move& move);

// Throws IllegalMove if the move does not apply. Returns the canonical
// successor; Fibonacci successor cap = min(2 * count, remaining').
GameState apply(const GameState& state, const Move& move);

bool is_terminal(const GameState& state, PlayConvention convention);

enum class Winner { Mover, Opponent };

// Winner at a terminal state, relative to the player to move.
Winner outcome(const GameState& state, PlayConvention convention);

// Total material left; strictly decreases under apply.
int total_material(const GameState& state);

// Textual forms matching the prompt conventions: integer counts for
// Nim/Fibonacci (comma-separated for multi-pile Nim), binary strings for
// Kayles (comma-separated rows), JSON array-of-arrays of 0/1 for Chomp.
std::string render_state(const GameState& state,
                         ChompOrientation orientation = ChompOrientation::TopLeft);

GameState parse_nim(const std::string& text, int max_take);
GameState parse_fib(const std::string& text, int take_cap);
GameState parse_kayles(const std::string& text);
GameState parse_chomp(const std::string& text,
                      ChompOrientation orientation = ChompOrientation::TopLeft);

// Display <-> canonical coordinate maps for Chomp grids.
ChompMove chomp_to_display(const ChompState& state, const ChompMove& move,
                           ChompOrientation orientation);
ChompMove chomp_from_display(const ChompState& state, const ChompMove& move,
                             ChompOrientation orientation);

std::string to_string(GameKind kind);
std::string to_string(PlayConvention convention);
std::string to_string(ChompOrientation orientation);
std::string to_string(const Move& move);
GameKind game_kind_from_string(const std::string& name);
PlayConvention convention_from_string(const std::string& name);
ChompOrientation orientation_from_string(const std::string& name);

}  // namespace arena
