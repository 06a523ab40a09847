#pragma once

#include <charconv>
#include <concepts>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "swarmtoe/game/board.hpp"
#include "swarmtoe/game/policy.hpp"

namespace swarmtoe::game {

template <class P>
concept Policy = std::invocable<const P&, const Board&, Mark, PolicyRng&> &&
                 std::same_as<std::invoke_result_t<const P&, const Board&, Mark, PolicyRng&>, Cell>;

struct MoveRecord {
  int move_no = 0;
  Mark mark = Mark::Empty;
  Cell cell{1};
  double elapsed_ms = 0.0;  // since game start, at completion of this move

  friend bool operator==(const MoveRecord&, const MoveRecord&) = default;
};

struct Transcript {
  std::vector<MoveRecord> moves;
  Outcome outcome = Outcome::Ongoing;

  // Board after replaying every move; throws on an illegal record.
  Board replay() const {
    Board b;
    for (const MoveRecord& m : moves) {
      if (!b.is_empty(m.cell)) throw InvalidBoard("transcript replays onto an occupied cell");
      b.set(m.cell, m.mark);
    }
    return b;
  }

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

class IllegalMove : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-move duration in milliseconds for the move about to be applied.
struct ZeroDuration {
  double operator()(const Board&, Mark, Cell) const { return 0.0; }
};

// Alternating play from `first_mover` until the game ends. Both policies share
// the one rng so a seed fixes the whole game.
template <Policy XPolicy, Policy OPolicy, class Duration = ZeroDuration>
Transcript play_game(const XPolicy& x_policy, const OPolicy& o_policy, Mark first_mover, PolicyRng& rng,
                     Duration duration = {}) {
  Transcript t;
  Board b;
  Mark to_move = first_mover;
  double clock_ms = 0.0;
  while (evaluate(b) == Outcome::Ongoing) {
    const Cell c = to_move == Mark::X ? x_policy(b, to_move, rng) : o_policy(b, to_move, rng);
    if (!b.is_empty(c)) {
      throw IllegalMove(std::string("policy for ") + to_char(to_move) + " chose occupied cell " +
                        std::to_string(c.index()) + " on " + b.str());
    }
    clock_ms += duration(b, to_move, c);
    b.set(c, to_move);
    t.moves.push_back({static_cast<int>(t.moves.size()) + 1, to_move, c, clock_ms});
    to_move = opponent(to_move);
  }
  t.outcome = evaluate(b);
  return t;
}

// Records `move_no, mark, cell, elapsed_ms`, one per line. Lines starting
// with '#' are comments.
inline void write_transcript(std::ostream& os, const Transcript& t) {
  for (const MoveRecord& m : t.moves) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d, %c, %d, %.3f\n", m.move_no, to_char(m.mark), m.cell.index(),
                  m.elapsed_ms);
    os << buf;
  }
  os << "# outcome " << to_string(t.outcome) << '\n';
}

inline Transcript read_transcript(std::istream& is) {
  Transcript t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key, value;
      if (ss >> key >> value && key == "outcome") t.outcome = outcome_from_string(value);
      continue;
    }
    std::istringstream ss(line);
    int move_no = 0, cell = 0;
    char mark = 0, comma1 = 0, comma2 = 0, comma3 = 0;
    double elapsed = 0.0;
    if (!(ss >> move_no >> comma1 >> mark >> comma2 >> cell >> comma3 >> elapsed) || comma1 != ',' ||
        comma2 != ',' || comma3 != ',') {
      throw std::invalid_argument("malformed transcript record: " + line);
    }
    t.moves.push_back({move_no, mark_from_char(mark), Cell(cell), elapsed});
  }
  return t;
}

}  // namespace swarmtoe::game
