#pragma once

// Exhaustive game-tree oracles. These are verification tools: the shipped
// opponent is never the perfect player.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "swarmtoe/game/board.hpp"
#include "swarmtoe/game/policy.hpp"

namespace swarmtoe::game {

namespace detail {

constexpr int kBoardCodes = 19683;  // 3^9

// Value table for every board code and side to move. Boards where both
// sides hold a line have no value.
class MinimaxTable {
 public:
  static constexpr std::int8_t kUnknown = 2;
  static constexpr std::int8_t kUndefined = 3;

  MinimaxTable() {
    table_.fill(kUnknown);
    for (int k = 0; k < kBoardCodes; ++k) {
      const Board b = Board::from_code(k);
      solve(b, Mark::X);
      solve(b, Mark::O);
    }
  }

  std::int8_t value(const Board& b, Mark to_move) const { return table_[slot(b, to_move)]; }

 private:
  static std::size_t slot(const Board& b, Mark to_move) {
    return static_cast<std::size_t>(b.code()) * 2 + (to_move == Mark::X ? 0 : 1);
  }

  std::int8_t solve(const Board& b, Mark to_move) {
    std::int8_t& v = table_[slot(b, to_move)];
    if (v != kUnknown) return v;
    const bool x_line = b.has_line(Mark::X);
    const bool o_line = b.has_line(Mark::O);
    if (x_line && o_line) return v = kUndefined;
    if (x_line) return v = 1;
    if (o_line) return v = -1;
    if (b.count(Mark::Empty) == 0) return v = 0;
    const int sign = to_move == Mark::X ? 1 : -1;
    int best = -2;
    for (Cell c : kAllCells) {
      if (!b.is_empty(c)) continue;
      Board child = b;
      child.set(c, to_move);
      best = std::max(best, sign * solve(child, opponent(to_move)));
      if (best == 1) break;
    }
    return v = static_cast<std::int8_t>(sign * best);
  }

  std::array<std::int8_t, kBoardCodes * 2> table_{};
};

inline const MinimaxTable& minimax_table() {
  static const MinimaxTable table;
  return table;
}

}  // namespace detail

// Game-theoretic value with X maximizing: +1 X wins, 0 draw, -1 O wins.
// Works on any board without lines for both sides, including positions whose
// mark counts could not arise in play.
inline int minimax_value(const Board& b, Mark to_move) {
  if (to_move == Mark::Empty) throw std::invalid_argument("minimax_value: to_move must be X or O");
  const std::int8_t v = detail::minimax_table().value(b, to_move);
  if (v == detail::MinimaxTable::kUndefined)
    throw InvalidBoard("minimax_value: both sides hold a line: " + b.str());
  return v;
}

// Moves achieving the best minimax value for `self`.
inline CellSet optimal_moves(const Board& b, Mark self) {
  if (evaluate(b) != Outcome::Ongoing) throw PolicyError("optimal_moves on a finished game");
  const int sign = self == Mark::X ? 1 : -1;
  int best = -2;
  CellSet out;
  for (Cell c : kAllCells) {
    if (!b.is_empty(c)) continue;
    Board child = b;
    child.set(c, self);
    const int v = sign * minimax_value(child, opponent(self));
    if (v > best) {
      best = v;
      out = CellSet{};
    }
    if (v == best) out.insert(c);
  }
  return out;
}

// Perfect player, uniform among value-optimal moves.
struct OptimalPolicy {
  Cell operator()(const Board& b, Mark self, PolicyRng& rng) const {
    return detail::pick(optimal_moves(b, self), rng);
  }
};

enum class OpponentModel { UniformRandom, MinimaxOptimal };

constexpr std::string_view to_string(OpponentModel m) noexcept {
  return m == OpponentModel::UniformRandom ? "random" : "optimal";
}

struct OutcomeProbabilities {
  double win = 0.0;   // swarm (X) wins
  double draw = 0.0;
  double loss = 0.0;  // opponent (O) wins
};

// Exact outcome probabilities for the swarm policy playing X against the
// given opponent model, expanding every policy draw and opponent choice.
inline OutcomeProbabilities policy_value_dp(Mark first_mover, OpponentModel opponent_model) {
  if (first_mover == Mark::Empty) throw std::invalid_argument("policy_value_dp: first_mover must be X or O");
  std::unordered_map<int, OutcomeProbabilities> memo;

  auto recurse = [&](auto& self, const Board& b, Mark to_move) -> OutcomeProbabilities {
    switch (evaluate(b)) {
      case Outcome::XWins: return {1.0, 0.0, 0.0};
      case Outcome::OWins: return {0.0, 0.0, 1.0};
      case Outcome::Draw: return {0.0, 1.0, 0.0};
      case Outcome::Ongoing: break;
    }
    const int key = b.code() * 2 + (to_move == Mark::X ? 0 : 1);
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    std::array<double, 9> p{};
    if (to_move == Mark::X) {
      p = b.count(Mark::Empty) == 9 ? opening_distribution() : move_distribution(b, Mark::X);
    } else {
      const CellSet choices =
          opponent_model == OpponentModel::UniformRandom ? b.empty_cells() : optimal_moves(b, Mark::O);
      for (Cell c : choices.members()) p[c.offset()] = 1.0 / choices.size();
    }

    OutcomeProbabilities acc;
    for (Cell c : kAllCells) {
      if (p[c.offset()] == 0.0) continue;
      Board child = b;
      child.set(c, to_move);
      const OutcomeProbabilities sub = self(self, child, opponent(to_move));
      acc.win += p[c.offset()] * sub.win;
      acc.draw += p[c.offset()] * sub.draw;
      acc.loss += p[c.offset()] * sub.loss;
    }
    memo.emplace(key, acc);
    return acc;
  };
  return recurse(recurse, Board{}, first_mover);
}

// Every non-terminal position reachable from the empty board with either
// side opening, paired with the side to move.
struct Position {
  Board board;
  Mark to_move;
};

inline std::vector<Position> reachable_positions(Mark first_mover) {
  std::vector<Position> out;
  std::vector<bool> seen(detail::kBoardCodes, false);
  auto walk = [&](auto& self, const Board& b, Mark to_move) -> void {
    if (seen[static_cast<std::size_t>(b.code())]) return;
    seen[static_cast<std::size_t>(b.code())] = true;
    if (evaluate(b) != Outcome::Ongoing) return;
    out.push_back({b, to_move});
    for (Cell c : kAllCells) {
      if (!b.is_empty(c)) continue;
      Board child = b;
      child.set(c, to_move);
      self(self, child, opponent(to_move));
    }
  };
  walk(walk, Board{}, first_mover);
  return out;
}

// Every board reachable with X opening, terminal ones included (5478 boards).
inline std::vector<Board> reachable_boards() {
  std::vector<Board> out;
  std::vector<bool> seen(detail::kBoardCodes, false);
  auto walk = [&](auto& self, const Board& b, Mark to_move) -> void {
    if (seen[static_cast<std::size_t>(b.code())]) return;
    seen[static_cast<std::size_t>(b.code())] = true;
    out.push_back(b);
    if (evaluate(b) != Outcome::Ongoing) return;
    for (Cell c : kAllCells) {
      if (!b.is_empty(c)) continue;
      Board child = b;
      child.set(c, to_move);
      self(self, child, opponent(to_move));
    }
  };
  walk(walk, Board{}, Mark::X);
  return out;
}

// Non-terminal positions with X to move, from either opening side.
inline std::vector<Board> x_to_move_positions() {
  std::vector<Board> out;
  for (Mark first : {Mark::X, Mark::O})
    for (const Position& p : reachable_positions(first))
      if (p.to_move == Mark::X) out.push_back(p.board);
  return out;
}

}  // namespace swarmtoe::game
