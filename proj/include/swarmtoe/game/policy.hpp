#pragma once

// The swarm's move policy: win if possible, otherwise block, otherwise a fair
// coin between building a two-in-line and a uniformly random empty cell.
// There is deliberately no fork lookahead.

#include <array>
#include <stdexcept>

#include "swarmtoe/game/board.hpp"
#include "swarmtoe/rng.hpp"

namespace swarmtoe::game {

using PolicyRng = SeededRng;

// Cell opened by the heuristic half of the first-move coin.
inline constexpr Cell kOpeningCell{5};

// Empty cells that complete a line of `mark`.
constexpr CellSet winning_cells(const Board& b, Mark mark) noexcept {
  CellSet out;
  for (const Line& l : lines()) {
    int own = 0;
    int empty = 0;
    Cell hole = l[0];
    for (Cell c : l) {
      if (b[c] == mark) ++own;
      else if (b.is_empty(c)) { ++empty; hole = c; }
    }
    if (own == 2 && empty == 1) out.insert(hole);
  }
  return out;
}

// Empty cells c such that, after placing `mark` at c, some line holds exactly
// two `mark` and one empty cell.
constexpr CellSet two_in_line_moves(const Board& b, Mark mark) noexcept {
  CellSet out;
  for (Cell c : kAllCells) {
    if (!b.is_empty(c)) continue;
    Board next = b;
    next.set(c, mark);
    for (const Line& l : lines()) {
      int own = 0;
      int empty = 0;
      for (Cell k : l) {
        own += next[k] == mark;
        empty += next.is_empty(k);
      }
      if (own == 2 && empty == 1) {
        out.insert(c);
        break;
      }
    }
  }
  return out;
}

class PolicyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {
inline Cell pick(CellSet s, PolicyRng& rng) {
  return s.nth(static_cast<int>(rng.index(static_cast<std::size_t>(s.size()))));
}
}  // namespace detail

// Draws: rules 1 and 2 take one index draw; rule 3 takes a coin then one
// index draw, whichever branch the coin selects.
inline Cell choose_move(const Board& b, PolicyRng& rng, Mark self = Mark::X) {
  if (evaluate(b) != Outcome::Ongoing) throw PolicyError("choose_move on a finished game: " + b.str());
  const CellSet wins = winning_cells(b, self);
  if (!wins.empty()) return detail::pick(wins, rng);
  const CellSet blocks = winning_cells(b, opponent(self));
  if (!blocks.empty()) return detail::pick(blocks, rng);

  const bool build = rng.coin();
  const CellSet builders = two_in_line_moves(b, self);
  if (build && !builders.empty()) return detail::pick(builders, rng);
  return detail::pick(b.empty_cells(), rng);
}

// Heads: center. Tails: uniform over all nine cells.
inline Cell opening_move(PolicyRng& rng) {
  if (rng.coin()) return kOpeningCell;
  return kAllCells[rng.index(9)];
}

// Exact move probabilities of choose_move, indexed by Cell::offset().
inline std::array<double, 9> move_distribution(const Board& b, Mark self = Mark::X) {
  std::array<double, 9> p{};
  auto spread = [&](CellSet s, double mass) {
    for (Cell c : s.members()) p[c.offset()] += mass / s.size();
  };
  if (evaluate(b) != Outcome::Ongoing) throw PolicyError("move_distribution on a finished game");
  if (const CellSet w = winning_cells(b, self); !w.empty()) {
    spread(w, 1.0);
  } else if (const CellSet o = winning_cells(b, opponent(self)); !o.empty()) {
    spread(o, 1.0);
  } else {
    const CellSet builders = two_in_line_moves(b, self);
    spread(builders.empty() ? b.empty_cells() : builders, 0.5);
    spread(b.empty_cells(), 0.5);
  }
  return p;
}

inline std::array<double, 9> opening_distribution() {
  std::array<double, 9> p{};
  p.fill(0.5 / 9.0);
  p[kOpeningCell.offset()] += 0.5;
  return p;
}

// The swarm player as a callable: opening step on an empty board, the
// three-rule policy otherwise.
struct ImprovedBasicPolicy {
  Cell operator()(const Board& b, Mark self, PolicyRng& rng) const {
    if (b.count(Mark::Empty) == 9) return opening_move(rng);
    return choose_move(b, rng, self);
  }
};

// Uniformly random legal move.
struct RandomPolicy {
  Cell operator()(const Board& b, Mark, PolicyRng& rng) const { return detail::pick(b.empty_cells(), rng); }
};

}  // namespace swarmtoe::game
