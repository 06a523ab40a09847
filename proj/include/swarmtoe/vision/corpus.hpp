#pragma once

// Seeded frame corpora for accuracy measurements.
//
// Manifest: one `frame_id, board_string, seed, sigma` record per line. The
// illumination gradient is corpus-wide and carried in a `# illumination <g>`
// comment line.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "swarmtoe/game/oracle.hpp"
#include "swarmtoe/rng.hpp"
#include "swarmtoe/vision/render.hpp"

namespace swarmtoe::vision {

struct CorpusEntry {
  int frame_id = 0;
  game::Board board;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

struct Corpus {
  double illumination = 0.0;
  std::vector<CorpusEntry> frames;
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// `n` frames over boards drawn uniformly from the reachable positions.
inline Corpus generate_corpus(int n, std::uint64_t seed, double sigma, double illumination) {
  static const std::vector<game::Board> boards = game::reachable_boards();
  SeededRng rng(seed);
  Corpus c{illumination, {}};
  c.frames.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const game::Board& b = boards[rng.index(boards.size())];
    c.frames.push_back({i, b, rng.next(), sigma});
  }
  return c;
}

inline RgbImage render_entry(const Corpus& c, const CorpusEntry& e, const BoardGeometry& geom = {}) {
  return render_board(e.board, geom, {e.sigma, c.illumination, e.seed});
}

inline void write_manifest(std::ostream& os, const Corpus& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# illumination %.17g\n", c.illumination);
  os << buf;
  for (const CorpusEntry& e : c.frames) {
    std::snprintf(buf, sizeof buf, "%d, %s, %llu, %.17g\n", e.frame_id, e.board.str().c_str(),
                  static_cast<unsigned long long>(e.seed), e.sigma);
    os << buf;
  }
}

inline Corpus read_manifest(std::istream& is) {
  Corpus c;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      double v = 0.0;
      if (ss >> key >> v && key == "illumination") c.illumination = v;
      continue;
    }
    std::istringstream ss(line);
    CorpusEntry e;
    std::string board;
    char comma = 0;
    if (!(ss >> e.frame_id >> comma) || comma != ',' || !(ss >> board) || board.size() != 10 || board.back() != ',' ||
        !(ss >> e.seed >> comma) || comma != ',' || !(ss >> e.sigma))
      throw std::invalid_argument("malformed manifest record: " + line);
    board.pop_back();
    e.board = game::Board::parse(board);
    c.frames.push_back(e);
  }
  return c;
}

}  // namespace swarmtoe::vision
