#pragma once

// Tic-tac-toe board model.
//
// Cells are numbered 1..9 row-major with 1 at the top-left:
//
//     1 | 2 | 3
//     4 | 5 | 6
//     7 | 8 | 9
//
// The same numbering is used by the vision crops, the swarm cell centers and
// the wire protocol. Marks are +1 for the swarm (X), -1 for the human (O).

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace swarmtoe::game {

enum class Mark : std::int8_t { O = -1, Empty = 0, X = 1 };

constexpr Mark opponent(Mark m) noexcept { return static_cast<Mark>(-static_cast<int>(m)); }

constexpr char to_char(Mark m) noexcept {
  return m == Mark::X ? 'X' : (m == Mark::O ? 'O' : '.');
}

inline Mark mark_from_char(char c) {
  switch (c) {
    case 'X': return Mark::X;
    case 'O': return Mark::O;
    case '.': return Mark::Empty;
  }
  throw std::invalid_argument(std::string("invalid mark character '") + c + "'");
}

class InvalidBoard : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Cell {
 public:
  constexpr explicit Cell(int index) : index_(index) {
    if (index < 1 || index > 9) throw std::out_of_range("cell index must be in 1..9");
  }

  static constexpr Cell at(int row, int col) { return Cell(3 * row + col + 1); }

  constexpr int index() const noexcept { return index_; }
  constexpr int row() const noexcept { return (index_ - 1) / 3; }
  constexpr int col() const noexcept { return (index_ - 1) % 3; }
  // 0-based offset into row-major storage.
  constexpr std::size_t offset() const noexcept { return static_cast<std::size_t>(index_ - 1); }

  friend constexpr auto operator<=>(Cell, Cell) = default;

 private:
  int index_;
};

inline constexpr std::array<Cell, 9> kAllCells = {Cell(1), Cell(2), Cell(3), Cell(4), Cell(5),
                                                  Cell(6), Cell(7), Cell(8), Cell(9)};

// Small set of cells as a 9-bit mask; iteration is in ascending cell order.
class CellSet {
 public:
  constexpr CellSet() noexcept = default;
  constexpr CellSet(std::initializer_list<int> cells) {
    for (int c : cells) insert(Cell(c));
  }

  constexpr void insert(Cell c) noexcept { bits_ |= bit(c); }
  constexpr bool contains(Cell c) const noexcept { return (bits_ & bit(c)) != 0; }
  constexpr int size() const noexcept { return std::popcount(bits_); }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr std::uint16_t bits() const noexcept { return bits_; }

  // k-th member in ascending order, 0 <= k < size().
  constexpr Cell nth(int k) const {
    for (Cell c : kAllCells) {
      if (contains(c) && k-- == 0) return c;
    }
    throw std::out_of_range("CellSet::nth");
  }

  std::vector<Cell> members() const {
    std::vector<Cell> out;
    for (Cell c : kAllCells)
      if (contains(c)) out.push_back(c);
    return out;
  }

  friend constexpr bool operator==(CellSet, CellSet) = default;

 private:
  static constexpr std::uint16_t bit(Cell c) noexcept {
    return static_cast<std::uint16_t>(1u << c.offset());
  }
  std::uint16_t bits_ = 0;
};

using Line = std::array<Cell, 3>;

// 3 rows, 3 columns, 2 diagonals; each triple ascending.
inline constexpr std::array<Line, 8> kLines = {{
    {Cell(1), Cell(2), Cell(3)},
    {Cell(4), Cell(5), Cell(6)},
    {Cell(7), Cell(8), Cell(9)},
    {Cell(1), Cell(4), Cell(7)},
    {Cell(2), Cell(5), Cell(8)},
    {Cell(3), Cell(6), Cell(9)},
    {Cell(1), Cell(5), Cell(9)},
    {Cell(3), Cell(5), Cell(7)},
}};

constexpr const std::array<Line, 8>& lines() noexcept { return kLines; }

class Board {
 public:
  constexpr Board() noexcept { cells_.fill(Mark::Empty); }

  // 9 characters, row-major, 'X' / 'O' / '.'.
  static Board parse(std::string_view s) {
    if (s.size() != 9) throw std::invalid_argument("board string must have 9 characters");
    Board b;
    for (std::size_t i = 0; i < 9; ++i) b.cells_[i] = mark_from_char(s[i]);
    return b;
  }

  // Board with the given cells filled; convenience for tests and fixtures.
  static Board with(std::initializer_list<int> xs, std::initializer_list<int> os) {
    Board b;
    for (int c : xs) b.set(Cell(c), Mark::X);
    for (int c : os) b.set(Cell(c), Mark::O);
    return b;
  }

  std::string str() const {
    std::string s(9, '.');
    for (std::size_t i = 0; i < 9; ++i) s[i] = to_char(cells_[i]);
    return s;
  }

  constexpr Mark operator[](Cell c) const noexcept { return cells_[c.offset()]; }
  constexpr void set(Cell c, Mark m) noexcept { cells_[c.offset()] = m; }
  constexpr bool is_empty(Cell c) const noexcept { return (*this)[c] == Mark::Empty; }

  constexpr int count(Mark m) const noexcept {
    int n = 0;
    for (Mark v : cells_) n += (v == m);
    return n;
  }

  constexpr CellSet empty_cells() const noexcept {
    CellSet s;
    for (Cell c : kAllCells)
      if (is_empty(c)) s.insert(c);
    return s;
  }

  constexpr CellSet cells_of(Mark m) const noexcept {
    CellSet s;
    for (Cell c : kAllCells)
      if ((*this)[c] == m) s.insert(c);
    return s;
  }

  constexpr bool has_line(Mark m) const noexcept {
    for (const Line& l : kLines)
      if ((*this)[l[0]] == m && (*this)[l[1]] == m && (*this)[l[2]] == m) return true;
    return false;
  }

  // Base-3 code in [0, 3^9): digit i is 0 empty, 1 X, 2 O, cell 1 least significant.
  constexpr int code() const noexcept {
    int k = 0;
    for (int i = 8; i >= 0; --i) {
      const Mark m = cells_[static_cast<std::size_t>(i)];
      k = 3 * k + (m == Mark::Empty ? 0 : (m == Mark::X ? 1 : 2));
    }
    return k;
  }

  static constexpr Board from_code(int k) noexcept {
    Board b;
    for (std::size_t i = 0; i < 9; ++i) {
      const int d = k % 3;
      b.cells_[i] = d == 0 ? Mark::Empty : (d == 1 ? Mark::X : Mark::O);
      k /= 3;
    }
    return b;
  }

  // X and O swapped.
  constexpr Board swapped() const noexcept {
    Board b;
    for (std::size_t i = 0; i < 9; ++i) b.cells_[i] = opponent(cells_[i]);
    return b;
  }

  constexpr const std::array<Mark, 9>& cells() const noexcept { return cells_; }

  friend constexpr bool operator==(const Board&, const Board&) = default;

 private:
  std::array<Mark, 9> cells_{};
};

enum class Outcome { XWins, OWins, Draw, Ongoing };

constexpr std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::XWins: return "XWins";
    case Outcome::OWins: return "OWins";
    case Outcome::Draw: return "Draw";
    case Outcome::Ongoing: return "Ongoing";
  }
  return "?";
}

inline Outcome outcome_from_string(std::string_view s) {
  for (Outcome o : {Outcome::XWins, Outcome::OWins, Outcome::Draw, Outcome::Ongoing})
    if (to_string(o) == s) return o;
  throw std::invalid_argument("unknown outcome '" + std::string(s) + "'");
}

// Mark-count and line invariants that hold for any position reachable with
// either player moving first: |#X - #O| <= 1 and at most one side has a line.
constexpr bool is_valid(const Board& b) noexcept {
  const int diff = b.count(Mark::X) - b.count(Mark::O);
  if (diff < -1 || diff > 1) return false;
  return !(b.has_line(Mark::X) && b.has_line(Mark::O));
}

// Stricter check when the first mover is known.
constexpr bool is_valid(const Board& b, Mark first_mover) noexcept {
  const int diff = b.count(Mark::X) - b.count(Mark::O);
  const bool counts_ok = first_mover == Mark::X ? (diff == 0 || diff == 1) : (diff == -1 || diff == 0);
  return counts_ok && is_valid(b);
}

// Outcome by line scan. Only boards where both sides hold a line are
// rejected; mark counts are checked by is_valid() at the session boundary so
// fixtures like "XXX......" still evaluate.
inline Outcome evaluate(const Board& b) {
  if (b.has_line(Mark::X) && b.has_line(Mark::O))
    throw InvalidBoard("both sides hold a line: " + b.str());
  if (b.has_line(Mark::X)) return Outcome::XWins;
  if (b.has_line(Mark::O)) return Outcome::OWins;
  if (b.count(Mark::Empty) == 0) return Outcome::Draw;
  return Outcome::Ongoing;
}

// Whose turn it is given who opened; ties go to the first mover.
constexpr Mark side_to_move(const Board& b, Mark first_mover) noexcept {
  const int placed = 9 - b.count(Mark::Empty);
  return placed % 2 == 0 ? first_mover : opponent(first_mover);
}

// Multi-line text rendering for terminals.
inline std::string pretty(const Board& b) {
  std::string out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const Cell cell = Cell::at(r, c);
      const char ch = to_char(b[cell]);
      out += ' ';
      out += ch == '.' ? static_cast<char>('0' + cell.index()) : ch;
      out += ' ';
      if (c < 2) out += '|';
    }
    out += '\n';
    if (r < 2) out += "---+---+---\n";
  }
  return out;
}

}  // namespace swarmtoe::game
