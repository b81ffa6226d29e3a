#include "arena/solver.hpp"

#include <algorithm>
#include <sstream>

namespace arena {

int mex(const std::set<int>& values) {
    int m = 0;
    for (int v : values) {
        if (v == m)
            ++m;
        else if (v > m)
            break;
    }
    return m;
}

std::string state_key(const GameState& state) {
    std::ostringstream os;
    if (const auto* nim = std::get_if<NimState>(&state)) {
        os << "N:" << nim->max_take << ':';
        for (int p : nim->piles) os << p << ',';
    } else if (const auto* fib = std::get_if<FibState>(&state)) {
        os << "F:" << fib->remaining << ':' << fib->take_cap;
    } else if (const auto* kayles = std::get_if<KaylesState>(&state)) {
        os << "K:";
        for (const auto& row : kayles->rows) {
            for (auto pin : row) os << (pin ? '1' : '0');
            os << ',';
        }
    } else {
        const auto& chomp = std::get<ChompState>(state);
        os << "C:" << chomp.n_rows << ':';
        for (int h : chomp.col_heights) os << h << ',';
    }
    return os.str();
}

std::vector<GameState> decompose(const GameState& state) {
    std::vector<GameState> components;
    if (const auto* nim = std::get_if<NimState>(&state)) {
        for (int p : nim->piles)
            if (p > 0) components.push_back(NimState{{p}, nim->max_take});
    } else if (const auto* kayles = std::get_if<KaylesState>(&state)) {
        // Maximal runs of standing pins; a run's position is irrelevant,
        // so each becomes a single all-ones row.
        for (const auto& row : kayles->rows) {
            std::size_t i = 0;
            while (i < row.size()) {
                if (!row[i]) {
                    ++i;
                    continue;
                }
                std::size_t j = i;
                while (j < row.size() && row[j]) ++j;
                components.push_back(
                    KaylesState{{std::vector<std::uint8_t>(j - i, 1)}});
                i = j;
            }
        }
    } else {
        components.push_back(state);
    }
    return components;
}

int grundy_sum(const std::vector<int>& components) {
    int acc = 0;
    for (int g : components) acc ^= g;
    return acc;
}

void Solver::charge_node() {
    if (++nodes_ > options_.node_budget) throw StateSpaceBudgetExceeded(options_.node_budget);
}

void Solver::clear_cache() {
    grundy_cache_.clear();
    label_cache_.clear();
    nodes_ = 0;
}

int Solver::component_grundy(const GameState& component) {
    const std::string key = state_key(component);
    if (auto it = grundy_cache_.find(key); it != grundy_cache_.end()) return it->second;
    charge_node();
    std::set<int> successor_values;
    for (const auto& move : legal_moves(component))
        successor_values.insert(grundy(apply(component, move)));
    const int g = mex(successor_values);
    grundy_cache_.emplace(key, g);
    return g;
}

int Solver::grundy(const GameState& state) {
    int acc = 0;
    for (const auto& component : decompose(canonicalize(state)))
        acc ^= component_grundy(component);
    return acc;
}

PositionLabel Solver::label_minimax(const GameState& state, PlayConvention convention) {
    const GameState canon = canonicalize(state);
    const std::string key = to_string(convention) + '|' + state_key(canon);
    if (auto it = label_cache_.find(key); it != label_cache_.end()) return it->second;
    charge_node();
    const auto moves = legal_moves(canon);
    PositionLabel label;
    if (moves.empty()) {
        label = outcome(canon, convention) == Winner::Mover ? PositionLabel::Win
                                                           : PositionLabel::Loss;
    } else {
        label = PositionLabel::Loss;
        for (const auto& move : moves) {
            if (label_minimax(apply(canon, move), convention) == PositionLabel::Loss) {
                label = PositionLabel::Win;
                break;
            }
        }
    }
    label_cache_.emplace(key, label);
    return label;
}

OptimalResult Solver::optimal_moves(const GameState& state, PlayConvention convention) {
    const GameState canon = canonicalize(state);
    const auto moves = legal_moves(canon);
    if (moves.empty()) throw std::logic_error("optimal_moves queried on a terminal state");
    OptimalResult result;
    for (const auto& move : moves) {
        const GameState succ = apply(canon, move);
        const bool winning = convention == PlayConvention::Normal
                                 ? grundy(succ) == 0
                                 : label_minimax(succ, convention) == PositionLabel::Loss;
        if (winning) result.moves.push_back(move);
    }
    if (result.moves.empty()) {
        result.losing_position = true;
        result.moves.push_back(moves.front());  // minimal move in sort order
    }
    return result;
}

int nim_sum(const std::vector<int>& piles) {
    int acc = 0;
    for (int p : piles) acc ^= p;
    return acc;
}

int nim_pile_grundy(int n, int max_take) { return n % (max_take + 1); }

std::vector<long long> zeckendorf(long long n) {
    if (n < 1) throw std::invalid_argument("zeckendorf requires n >= 1");
    std::vector<long long> fibs = {1, 2};  // F1=1, F2=2
    while (fibs.back() < n) fibs.push_back(fibs[fibs.size() - 1] + fibs[fibs.size() - 2]);
    std::vector<long long> terms;
    long long rest = n;
    for (auto it = fibs.rbegin(); it != fibs.rend() && rest > 0; ++it) {
        if (*it <= rest) {
            terms.push_back(*it);
            rest -= *it;
        }
    }
    return terms;
}

bool is_fibonacci(long long n) {
    if (n < 1) return false;
    long long a = 1, b = 2;
    while (a < n) {
        const long long next = a + b;
        a = b;
        b = next;
    }
    return a == n;
}

FibOpening fibonacci_optimal_opening(int n) {
    const auto terms = zeckendorf(n);
    if (terms.size() == 1) return {true, 0};
    return {false, static_cast<int>(terms.back())};
}

std::vector<int> kayles_grundy_sequence(int n_max, Solver& solver) {
    std::vector<int> sequence;
    sequence.reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        if (n == 0) {
            sequence.push_back(0);
            continue;
        }
        sequence.push_back(
            solver.grundy(KaylesState{{std::vector<std::uint8_t>(n, 1)}}));
    }
    return sequence;
}

ChompMove chomp_square_opening(int n) {
    if (n < 2) throw std::invalid_argument("square opening requires n >= 2");
    return ChompMove{1, 1};  // leaves the symmetric L around the poison cell
}

}  // namespace arena
