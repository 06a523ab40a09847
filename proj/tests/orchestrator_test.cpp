#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "swarmtoe/game/oracle.hpp"
#include "swarmtoe/game/play.hpp"
#include "swarmtoe/orchestrator/selfplay.hpp"

using namespace swarmtoe;
using namespace swarmtoe::orchestrator;
using game::OpponentModel;

namespace {

std::set<std::pair<GamePhase, GamePhase>> declared_edges() {
  using P = GamePhase;
  return {{P::AwaitConfig, P::HumanTurn}, {P::AwaitConfig, P::Deciding}, {P::HumanTurn, P::Deciding},
          {P::Deciding, P::SwarmFlying},  {P::Deciding, P::GameOver},    {P::SwarmFlying, P::CheckEnd},
          {P::SwarmFlying, P::Faulted},   {P::CheckEnd, P::HumanTurn},   {P::CheckEnd, P::GameOver}};
}

constexpr GamePhase kPhases[] = {GamePhase::AwaitConfig, GamePhase::HumanTurn, GamePhase::Deciding,
                                 GamePhase::SwarmFlying, GamePhase::CheckEnd,  GamePhase::GameOver,
                                 GamePhase::Faulted};

std::vector<WireMessage> of_kind(const std::vector<WireMessage>& out, std::string_view kind) {
  std::vector<WireMessage> r;
  for (const auto& m : out)
    if (m.kind() == kind) r.push_back(m);
  return r;
}

int count_marks(const Board& b, Mark m) {
  int n = 0;
  for (Cell c : game::kAllCells) n += b[c] == m;
  return n;
}

bool marks_consistent(const Board& b, Mark first) {
  const int x = count_marks(b, Mark::X), o = count_marks(b, Mark::O);
  return first == Mark::X ? (x == o || x == o + 1) : (o == x || o == x + 1);
}

std::uint64_t seed_with_first_coin(bool heads) {
  for (std::uint64_t s = 0;; ++s)
    if (SeededRng(s).coin() == heads) return s;
}

// First cell holding neither mark, scanning from `from`.
Cell some_empty(const Board& b, int from = 1) {
  for (int k = 0; k < 9; ++k) {
    const Cell c(1 + (from - 1 + k) % 9);
    if (b.is_empty(c)) return c;
  }
  throw std::logic_error("full board");
}

}  // namespace

TEST(Phase, TransitionTableMatchesDeclaredEdges) {
  const auto edges = declared_edges();
  for (GamePhase a : kPhases)
    for (GamePhase b : kPhases)
      EXPECT_EQ(transition_allowed(a, b), edges.count({a, b}) == 1) << to_string(a) << " -> " << to_string(b);
}

TEST(StartGame, HumanFirstWaitsOnEmptyBoard) {
  GameService svc;
  const GameSession& s = svc.start_game(Mark::O, 1);
  EXPECT_EQ(s.phase, GamePhase::HumanTurn);
  EXPECT_EQ(s.board, Board{});
  EXPECT_FALSE(svc.world().busy());
}

TEST(StartGame, SwarmFirstHeadsSeedFliesToCenter) {
  GameService svc;
  svc.start_game(Mark::X, seed_with_first_coin(true));
  EXPECT_EQ(svc.session().phase, GamePhase::SwarmFlying);
  const auto moves = of_kind(svc.drain_outbox(), "SwarmMove");
  ASSERT_EQ(moves.size(), 1u);
  EXPECT_EQ(moves[0].as<msg::SwarmMove>().cell, 5);
  ASSERT_TRUE(svc.world().active_mission());
  EXPECT_EQ(svc.world().active_mission()->cell, Cell(5));
}

TEST(StartGame, SwarmFirstTailsSeedOpensUniformly) {
  std::array<int, 9> hits{};
  int tails = 0;
  for (std::uint64_t s = 0; tails < 900; ++s) {
    if (SeededRng(s).coin()) continue;
    ++tails;
    GameService svc;
    svc.start_game(Mark::X, s);
    ++hits[svc.world().active_mission()->cell.offset()];
  }
  for (int h : hits) EXPECT_NEAR(h, 100, 3 * std::sqrt(900 * (1.0 / 9) * (8.0 / 9)));
}

TEST(StartGame, RefusedWhileDronesFly) {
  GameService svc;
  svc.start_game(Mark::X, 3);
  svc.drain_outbox();
  EXPECT_THROW(svc.start_game(Mark::O, 4), SessionError);
  const auto errs = of_kind(svc.drain_outbox(), "Error");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].as<msg::Error>().code, "drones-active");
  EXPECT_EQ(svc.session().phase, GamePhase::SwarmFlying);
  svc.settle();
  EXPECT_NO_THROW(svc.start_game(Mark::O, 4));
  for (const auto& d : svc.world().fleet()) EXPECT_EQ(d.status, swarm::DroneStatus::Idle);
}

TEST(StartGame, SameSeedSameInputsSamePlay) {
  auto play = [](std::uint64_t seed) {
    GameService svc;
    svc.start_game(Mark::O, seed);
    std::vector<int> log;
    while (svc.session().phase == GamePhase::HumanTurn) {
      svc.on_human_move(some_empty(svc.session().board, 2), MoveSource::Ui);
      svc.settle();
    }
    for (const auto& m : svc.session().moves) log.push_back(m.cell.index() * (m.mark == Mark::X ? 1 : -1));
    return std::make_pair(log, svc.session().duration());
  };
  EXPECT_EQ(play(77), play(77));
}

TEST(HumanMove, CenterOpeningGetsLegalReply) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GameService svc;
    svc.start_game(Mark::O, seed);
    EXPECT_EQ(svc.on_human_move(Cell(5), MoveSource::Ui), MoveResult::Accepted);
    EXPECT_EQ(svc.session().phase, GamePhase::SwarmFlying);
    ASSERT_TRUE(svc.world().active_mission());
    EXPECT_NE(svc.world().active_mission()->cell, Cell(5));
    svc.settle();
    EXPECT_EQ(svc.session().phase, GamePhase::HumanTurn);
    EXPECT_EQ(count_marks(svc.session().board, Mark::X), 1);
  }
}

TEST(HumanMove, CompletingALineEndsGameWithoutDispatch) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 20 && seed < 2000; ++seed) {
    GameService svc;
    game::PolicyRng opp(seed + 1000);
    const GameSession s = drive_game(svc, Mark::O, seed, OpponentModel::MinimaxOptimal, opp);
    if (s.result != Outcome::OWins) continue;
    ++checked;
    EXPECT_EQ(s.moves.back().mark, Mark::O);
    EXPECT_FALSE(svc.world().busy());
    EXPECT_EQ(svc.landed_cells(), s.board.cells_of(Mark::X));
    EXPECT_EQ(svc.transitions().back().from, GamePhase::Deciding);
    EXPECT_EQ(svc.transitions().back().to, GamePhase::GameOver);
  }
  EXPECT_EQ(checked, 20);
}

TEST(HumanMove, RejectionsLeaveStateUnchanged) {
  GameService svc;
  EXPECT_EQ(svc.on_human_move(Cell(1), MoveSource::Ui), MoveResult::Rejected);
  svc.start_game(Mark::X, 9);
  svc.drain_outbox();
  const Board before = svc.session().board;
  EXPECT_EQ(svc.on_human_move(Cell(1), MoveSource::Ui), MoveResult::Rejected);  // swarm still flying
  EXPECT_EQ(svc.session().board, before);
  EXPECT_EQ(svc.session().phase, GamePhase::SwarmFlying);
  svc.settle();
  const Cell x = svc.session().moves.back().cell;
  svc.drain_outbox();
  EXPECT_EQ(svc.on_human_move(x, MoveSource::Ui), MoveResult::Rejected);  // occupied by a drone
  EXPECT_EQ(svc.session().phase, GamePhase::HumanTurn);
  const auto errs = of_kind(svc.drain_outbox(), "Error");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].as<msg::Error>().code, "occupied");
}

TEST(HumanMove, VisionThenUiDuplicateIsIgnored) {
  GameService svc;
  svc.start_game(Mark::O, 5);
  const Board physical = Board::parse("....O....");
  EXPECT_EQ(svc.on_frame(vision::render_board(physical)), MoveResult::Accepted);
  svc.drain_outbox();
  const auto moves = svc.session().moves.size();
  EXPECT_EQ(svc.on_human_move(Cell(5), MoveSource::Ui), MoveResult::Duplicate);
  EXPECT_EQ(svc.session().moves.size(), moves);
  EXPECT_TRUE(svc.drain_outbox().empty());
  // The camera keeps seeing the same card: no new move.
  EXPECT_FALSE(svc.on_frame(vision::render_board(physical)).has_value());
}

TEST(HumanMove, UiContradictingVisionIsReported) {
  GameService svc;
  svc.start_game(Mark::O, 5);
  EXPECT_EQ(svc.on_frame(vision::render_board(Board::parse("O........"))), MoveResult::Accepted);
  svc.drain_outbox();
  Cell other = some_empty(svc.session().board, 2);
  if (svc.world().active_mission()->cell == other) other = some_empty(svc.session().board, other.index() + 1);
  EXPECT_EQ(svc.on_human_move(other, MoveSource::Ui), MoveResult::Rejected);
  const auto errs = of_kind(svc.drain_outbox(), "Error");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].as<msg::Error>().code, "vision-conflict");
  EXPECT_EQ(svc.session().board[Cell(1)], Mark::O);
  EXPECT_EQ(svc.session().board[other], Mark::Empty);
}

TEST(HumanMove, InconsistentFrameIsRetried) {
  GameService svc;
  svc.start_game(Mark::X, seed_with_first_coin(true));
  svc.settle();
  ASSERT_EQ(svc.session().board[Cell(5)], Mark::X);
  svc.drain_outbox();
  // A circle where the drone sits.
  EXPECT_EQ(svc.on_frame(vision::render_board(Board::parse("....O...."))), MoveResult::Rejected);
  EXPECT_EQ(of_kind(svc.drain_outbox(), "Error")[0].as<msg::Error>().code, "inconsistent-frame");
  EXPECT_EQ(svc.session().phase, GamePhase::HumanTurn);
  // Two new circles at once.
  EXPECT_EQ(svc.on_frame(vision::render_board(Board::parse("O...X...O"))), MoveResult::Rejected);
  EXPECT_EQ(svc.session().phase, GamePhase::HumanTurn);
  // The next good frame is taken.
  EXPECT_EQ(svc.on_frame(vision::render_board(Board::parse("O...X...."))), MoveResult::Accepted);
  EXPECT_EQ(svc.session().board[Cell(1)], Mark::O);
}

TEST(MissionComplete, EndingsFollowTheBoard) {
  int x_wins = 0, draws = 0, continues = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    GameService svc;
    svc.start_game(seed % 2 ? Mark::X : Mark::O, seed);
    game::PolicyRng opp(seed ^ 0xabc);
    while (svc.session().phase != GamePhase::GameOver) {
      if (svc.session().phase == GamePhase::HumanTurn)
        svc.on_human_move(opponent_move(OpponentModel::UniformRandom, svc.session().board, opp), MoveSource::Ui);
      if (svc.session().phase != GamePhase::SwarmFlying) continue;
      svc.settle();
      const Board& b = svc.session().board;
      EXPECT_EQ(svc.landed_cells(), b.cells_of(Mark::X));
      const Outcome o = game::evaluate(b);
      if (o == Outcome::XWins) {
        ++x_wins;
        EXPECT_EQ(svc.session().phase, GamePhase::GameOver);
        EXPECT_EQ(svc.session().result, Outcome::XWins);
      } else if (o == Outcome::Draw) {
        ++draws;
        EXPECT_EQ(count_marks(b, Mark::Empty), 0);
        EXPECT_EQ(svc.session().result, Outcome::Draw);
      } else {
        ++continues;
        EXPECT_EQ(svc.session().phase, GamePhase::HumanTurn);
      }
    }
  }
  EXPECT_GT(x_wins, 0);
  EXPECT_GT(draws, 0);
  EXPECT_GT(continues, 0);
}

TEST(MissionComplete, FailedMissionFaultsTheSession) {
  swarm::SwarmConfig cfg;
  cfg.mission_timeout = 0.5;
  GameService svc(cfg);
  svc.start_game(Mark::X, 1);
  svc.drain_outbox();
  svc.settle();
  EXPECT_EQ(svc.session().phase, GamePhase::Faulted);
  const auto errs = of_kind(svc.drain_outbox(), "Error");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].as<msg::Error>().code, "mission-failed");
  EXPECT_FALSE(svc.session().result.has_value());
  EXPECT_NO_THROW(svc.start_game(Mark::O, 2));
}

TEST(Durations, GameDurationIsSumOfMoveDurations) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    GameService svc;
    game::PolicyRng opp(seed);
    svc.start_game(seed % 2 ? Mark::X : Mark::O, seed);
    while (svc.session().phase != GamePhase::GameOver) {
      if (svc.session().phase == GamePhase::HumanTurn) {
        svc.advance(0.37 * static_cast<double>(seed % 5));  // human think time
        svc.on_human_move(opponent_move(OpponentModel::UniformRandom, svc.session().board, opp), MoveSource::Ui);
      }
      svc.settle();
    }
    const GameSession& s = svc.session();
    double sum = 0;
    for (const SessionMove& m : s.moves) {
      EXPECT_GE(m.duration(), 0.0);
      sum += m.duration();
    }
    EXPECT_NEAR(s.duration(), sum, svc.world().config().dt);
    EXPECT_GT(s.duration(), 0.0);
  }
}

TEST(Fuzz, RandomEventsNeverLeaveDeclaredEdges) {
  const auto edges = declared_edges();
  std::mt19937_64 gen(2024);
  GameService svc;
  Mark first = Mark::O;
  std::size_t seen = 0;
  int accepted = 0, duplicates = 0, frames = 0;
  for (int event = 0; event < 100000; ++event) {
    const int kind = static_cast<int>(gen() % 100);
    if (kind < 3) {
      const Mark m = gen() % 2 ? Mark::X : Mark::O;
      try {
        svc.start_game(m, gen());
        first = m;
        seen = 0;
      } catch (const SessionError&) {
        EXPECT_TRUE(svc.world().busy());
      }
    } else if (kind < 45) {
      const Cell c(1 + static_cast<int>(gen() % 9));
      const Board before = svc.session().board;
      const auto moves_before = svc.session().moves.size();
      const MoveResult r = svc.on_human_move(c, gen() % 4 ? MoveSource::Ui : MoveSource::Vision);
      if (r == MoveResult::Accepted) {
        ++accepted;
        // Replaying an accepted move changes nothing.
        const Board after = svc.session().board;
        const auto phase = svc.session().phase;
        EXPECT_EQ(svc.on_human_move(c, MoveSource::Ui), MoveResult::Duplicate);
        EXPECT_EQ(svc.session().board, after);
        EXPECT_EQ(svc.session().phase, phase);
      } else {
        duplicates += r == MoveResult::Duplicate;
        EXPECT_EQ(svc.session().board, before);
        EXPECT_EQ(svc.session().moves.size(), moves_before);
      }
    } else if (kind < 46 && svc.session().phase == GamePhase::HumanTurn) {
      Board physical = svc.session().board;
      physical.set(some_empty(physical, 1 + static_cast<int>(gen() % 9)), Mark::O);
      svc.on_frame(vision::render_board(physical));
      ++frames;
    } else if (kind < 95) {
      const int n = 1 + static_cast<int>(gen() % 200);
      for (int i = 0; i < n; ++i) svc.tick();
    } else {
      svc.settle();
    }
    svc.drain_outbox();
    const auto& tr = svc.transitions();
    for (; seen < tr.size(); ++seen) ASSERT_EQ(edges.count({tr[seen].from, tr[seen].to}), 1u);
    if (svc.session().phase != GamePhase::AwaitConfig) {
      ASSERT_TRUE(marks_consistent(svc.session().board, first)) << svc.session().board.str();
    }
    if (svc.session().phase == GamePhase::HumanTurn || svc.session().phase == GamePhase::GameOver) {
      ASSERT_EQ(svc.landed_cells(), svc.session().board.cells_of(Mark::X));
    }
  }
  EXPECT_GT(accepted, 1000);
  EXPECT_GT(duplicates, 100);
  EXPECT_GT(frames, 50);
}

TEST(VisionLoop, FramesAndDirectMovesGiveIdenticalLogs) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Mark first = seed % 2 ? Mark::X : Mark::O;
    GameService direct_svc, vision_svc;
    game::PolicyRng a(seed * 7 + 1), b(seed * 7 + 1);
    const GameSession d = drive_game(direct_svc, first, seed, OpponentModel::UniformRandom, a);
    DriveOptions opt;
    opt.ingestion = Ingestion::Vision;
    opt.frame_sigma = 8.0;
    opt.frame_illumination = 0.1;
    const GameSession v = drive_game(vision_svc, first, seed, OpponentModel::UniformRandom, b, opt);
    ASSERT_EQ(d.moves.size(), v.moves.size());
    for (std::size_t i = 0; i < d.moves.size(); ++i) {
      EXPECT_EQ(d.moves[i].cell, v.moves[i].cell);
      EXPECT_EQ(d.moves[i].mark, v.moves[i].mark);
      EXPECT_EQ(d.moves[i].finished_at, v.moves[i].finished_at);
      if (v.moves[i].mark == Mark::O) {
        EXPECT_EQ(v.moves[i].source, MoveSource::Vision);
      }
    }
    EXPECT_EQ(d.result, v.result);
  }
}

TEST(Transcript, AppendOnlyAndParseable) {
  std::ostringstream log;
  GameService svc;
  svc.set_transcript(&log);
  game::PolicyRng opp(1);
  const GameSession g1 = drive_game(svc, Mark::X, 10, OpponentModel::UniformRandom, opp);
  const std::string after_first = log.str();
  const GameSession g2 = drive_game(svc, Mark::O, 11, OpponentModel::UniformRandom, opp);
  ASSERT_EQ(log.str().compare(0, after_first.size(), after_first), 0);

  std::istringstream first_game(after_first);
  const game::Transcript t = game::read_transcript(first_game);
  ASSERT_EQ(t.moves.size(), g1.moves.size());
  for (std::size_t i = 0; i < t.moves.size(); ++i) {
    EXPECT_EQ(t.moves[i].cell, g1.moves[i].cell);
    EXPECT_NEAR(t.moves[i].elapsed_ms, (g1.moves[i].finished_at - g1.started_at) * 1000, 0.001);
  }
  EXPECT_EQ(t.outcome, *g1.result);
  EXPECT_EQ(t.replay(), g1.board);
  EXPECT_NE(log.str().find("# session 2 seed 11 first O"), std::string::npos);
  EXPECT_TRUE(g2.result.has_value());
}

TEST(Selfplay, OptimalOpponentNeverLoses) {
  const SelfplayStats s = selfplay_batch(300, FirstMoverPolicy::Alternate, OpponentModel::MinimaxOptimal, 3);
  EXPECT_EQ(s.swarm_first.swarm_won + s.human_first.swarm_won, 0);
  EXPECT_EQ(s.swarm_first.games() + s.human_first.games(), 300);
  EXPECT_EQ(s.swarm_first.faulted + s.human_first.faulted, 0);
}

TEST(Selfplay, RandomOpponentMatchesExactValues) {
  const int n = 20000;
  for (FirstMoverPolicy f : {FirstMoverPolicy::Swarm, FirstMoverPolicy::Human}) {
    const SelfplayStats s = selfplay_batch(n, f, OpponentModel::UniformRandom, 20000);
    const ResultColumn& col = f == FirstMoverPolicy::Swarm ? s.swarm_first : s.human_first;
    ASSERT_EQ(col.games(), n);
    const auto exact = game::policy_value_dp(f == FirstMoverPolicy::Swarm ? Mark::X : Mark::O,
                                             OpponentModel::UniformRandom);
    auto within = [&](int hits, double p) {
      const double sigma = std::sqrt(n * p * (1 - p));
      EXPECT_NEAR(hits, n * p, 3 * sigma + 1e-9) << to_string(f);
    };
    within(col.swarm_won, exact.win);
    within(col.draw, exact.draw);
    within(col.human_won, exact.loss);
    EXPECT_GT(col.average_duration(), 0.0);
  }
}

TEST(Selfplay, SwarmFirstWinsMoreOften) {
  const SelfplayStats s = selfplay_batch(4000, FirstMoverPolicy::Alternate, OpponentModel::UniformRandom, 8);
  EXPECT_EQ(s.swarm_first.games(), 2000);
  EXPECT_EQ(s.human_first.games(), 2000);
  EXPECT_GT(s.swarm_first.swarm_won, s.human_first.swarm_won);
}

TEST(Selfplay, ReproducibleBySeedAndFormatsTable) {
  const auto a = selfplay_batch(50, FirstMoverPolicy::Alternate, OpponentModel::UniformRandom, 5);
  const auto b = selfplay_batch(50, FirstMoverPolicy::Alternate, OpponentModel::UniformRandom, 5);
  EXPECT_EQ(format_table(a), format_table(b));
  const std::string t = format_table(a);
  for (const char* row : {"Swarm won", "Draw", "Human won", "Games in total", "Swarm first", "Human first"})
    EXPECT_NE(t.find(row), std::string::npos) << row;
  EXPECT_THROW(selfplay_batch(0, FirstMoverPolicy::Swarm, OpponentModel::UniformRandom, 1), std::invalid_argument);
  EXPECT_EQ(first_mover_from_string("alternate"), FirstMoverPolicy::Alternate);
  EXPECT_THROW(first_mover_from_string("drones"), std::invalid_argument);
  EXPECT_EQ(opponent_from_string("optimal"), OpponentModel::MinimaxOptimal);
}
