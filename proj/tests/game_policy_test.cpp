#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "support/reference.hpp"
#include "swarmtoe/game/oracle.hpp"
#include "swarmtoe/game/policy.hpp"

using namespace swarmtoe;
using namespace swarmtoe::game;

namespace {

reference::Raw to_raw(const Board& b) {
  reference::Raw r{};
  for (Cell c : kAllCells) r[c.offset()] = static_cast<int>(b[c]);
  return r;
}

std::set<int> as_set(CellSet s) {
  std::set<int> out;
  for (Cell c : s.members()) out.insert(c.index());
  return out;
}

}  // namespace

TEST(WinningCells, Examples) {
  EXPECT_EQ(as_set(winning_cells(Board::with({1, 2}, {}), Mark::X)), (std::set<int>{3}));
  EXPECT_TRUE(winning_cells(Board{}, Mark::X).empty());
  const Board b = Board::with({1, 5}, {2});
  EXPECT_EQ(as_set(winning_cells(b, Mark::X)), reference::winning_cells(to_raw(b), 1));
  EXPECT_EQ(as_set(winning_cells(b, Mark::X)), (std::set<int>{9}));
}

TEST(TwoInLine, Examples) {
  const Board center = Board::with({5}, {});
  EXPECT_EQ(as_set(two_in_line_moves(center, Mark::X)), reference::two_in_line(to_raw(center), 1));
  EXPECT_EQ(two_in_line_moves(center, Mark::X).size(), 8);
  EXPECT_TRUE(two_in_line_moves(Board{}, Mark::X).empty());

  // O at 1 kills the 1-5-9 diagonal, so 9 builds nothing.
  const Board blocked = Board::with({5}, {1});
  EXPECT_EQ(as_set(two_in_line_moves(blocked, Mark::X)), reference::two_in_line(to_raw(blocked), 1));
  EXPECT_FALSE(two_in_line_moves(blocked, Mark::X).contains(Cell(9)));

  const Board nearly_full = Board::parse("XOXOXOO.X");
  EXPECT_EQ(as_set(two_in_line_moves(nearly_full, Mark::O)), reference::two_in_line(to_raw(nearly_full), -1));
}

TEST(RuleHelpers, AgreeWithBruteForceOnAllOngoingBoards) {
  int checked = 0;
  for (int k = 0; k < 19683; ++k) {
    const Board b = Board::from_code(k);
    if (!is_valid(b) || evaluate(b) != Outcome::Ongoing) continue;
    const auto raw = to_raw(b);
    for (Mark m : {Mark::X, Mark::O}) {
      const int v = static_cast<int>(m);
      ASSERT_EQ(as_set(winning_cells(b, m)), reference::winning_cells(raw, v)) << b.str();
      ASSERT_EQ(as_set(two_in_line_moves(b, m)), reference::two_in_line(raw, v)) << b.str();
    }
    ++checked;
  }
  EXPECT_GT(checked, 4000);
}

TEST(ChooseMove, ForcedWin) {
  const Board b = Board::with({1, 2}, {4, 5});
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    PolicyRng rng(seed);
    EXPECT_EQ(choose_move(b, rng), Cell(3));
  }
}

TEST(ChooseMove, ForcedBlock) {
  const Board b = Board::with({5}, {1, 2});
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    PolicyRng rng(seed);
    EXPECT_EQ(choose_move(b, rng), Cell(3));
  }
}

TEST(ChooseMove, ForkBlocksOneThreatAtRandom) {
  // O threatens 3 (1-2-3) and 7 (1-4-7); no lookahead, so either block.
  const Board fork = Board::with({5, 8}, {1, 2, 4});
  ASSERT_TRUE(winning_cells(fork, Mark::X).empty());
  ASSERT_EQ(winning_cells(fork, Mark::O).size(), 2);
  std::set<int> blocks;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    PolicyRng rng(seed);
    blocks.insert(choose_move(fork, rng).index());
  }
  EXPECT_EQ(blocks, (std::set<int>{3, 7}));
}

TEST(ChooseMove, DrawConsumption) {
  PolicyRng win_rng(7);
  choose_move(Board::with({1, 2}, {4, 5}), win_rng);
  EXPECT_EQ(win_rng.position(), 1u);

  PolicyRng block_rng(7);
  choose_move(Board::with({5}, {1, 2}), block_rng);
  EXPECT_EQ(block_rng.position(), 1u);

  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    PolicyRng rng(seed);
    choose_move(Board::with({1}, {9}), rng);
    EXPECT_EQ(rng.position(), 2u);
  }
}

TEST(ChooseMove, BranchFromCoin) {
  const Board b = Board::with({1}, {9});
  const CellSet builders = two_in_line_moves(b, Mark::X);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    PolicyRng probe(seed);
    const bool heads = probe.coin();
    const std::size_t k = static_cast<std::size_t>(probe.next());
    PolicyRng rng(seed);
    const Cell c = choose_move(b, rng);
    const CellSet pool = heads ? builders : b.empty_cells();
    EXPECT_EQ(c, pool.nth(static_cast<int>(k % static_cast<std::size_t>(pool.size()))));
  }
}

TEST(ChooseMove, EmpiricalMixtureMatchesEnumeration) {
  const Board b = Board::with({1}, {9});
  const auto expected = reference::policy_mixture(to_raw(b));
  constexpr int kSeeds = 20000;
  std::array<int, 10> hits{};
  for (int seed = 0; seed < kSeeds; ++seed) {
    PolicyRng rng(static_cast<std::uint64_t>(seed));
    const Cell c = choose_move(b, rng);
    ASSERT_TRUE(b.is_empty(c));
    ++hits[static_cast<std::size_t>(c.index())];
  }
  for (int c = 1; c <= 9; ++c) {
    const double p = expected[static_cast<std::size_t>(c)];
    const double sigma = std::sqrt(kSeeds * p * (1 - p));
    EXPECT_LE(std::abs(hits[static_cast<std::size_t>(c)] - kSeeds * p), 3 * sigma + 1e-9) << "cell " << c;
  }
}

TEST(MoveDistribution, MatchesReferenceMixtureEverywhere) {
  for (const Board& b : x_to_move_positions()) {
    const auto got = move_distribution(b);
    const auto want = reference::policy_mixture(to_raw(b));
    for (Cell c : kAllCells) ASSERT_NEAR(got[c.offset()], want[static_cast<std::size_t>(c.index())], 1e-15);
  }
}

TEST(ChooseMove, RejectsFinishedGames) {
  PolicyRng rng(1);
  EXPECT_THROW(choose_move(Board::parse("XXXOO...."), rng), PolicyError);
  EXPECT_THROW(choose_move(Board::parse("XOXXOOOXX"), rng), PolicyError);
}

TEST(OpeningMove, HeadsOpensCenter) {
  int heads_seeds = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    PolicyRng probe(seed);
    if (!probe.coin()) continue;
    ++heads_seeds;
    PolicyRng rng(seed);
    EXPECT_EQ(opening_move(rng), Cell(5));
  }
  EXPECT_GT(heads_seeds, 0);
}

TEST(OpeningMove, CenterFrequencyMatchesMixture) {
  constexpr int kSeeds = 10000;
  int center = 0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    PolicyRng rng(static_cast<std::uint64_t>(seed));
    const Cell c = opening_move(rng);
    ASSERT_GE(c.index(), 1);
    ASSERT_LE(c.index(), 9);
    center += c == Cell(5);
  }
  const double p = 0.5 + 0.5 / 9.0;
  EXPECT_LE(std::abs(center - kSeeds * p), 3 * std::sqrt(kSeeds * p * (1 - p)));
}

TEST(PolicyRng, SameSeedAndPositionSameStream) {
  PolicyRng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  PolicyRng c(42, 50);
  PolicyRng d(42);
  for (int i = 0; i < 50; ++i) d.next();
  EXPECT_EQ(c.next(), d.next());
  EXPECT_NE(PolicyRng(42).split(1).next(), PolicyRng(42).split(2).next());
}
