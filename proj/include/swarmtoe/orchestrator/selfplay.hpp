#pragma once

// Scripted opponents driving full sessions (flights included), and batch
// statistics split by first mover.

#include <cstdio>
#include <stdexcept>
#include <string>

#include "swarmtoe/game/oracle.hpp"
#include "swarmtoe/game/policy.hpp"
#include "swarmtoe/orchestrator/session.hpp"
#include "swarmtoe/vision/render.hpp"

namespace swarmtoe::orchestrator {

enum class FirstMoverPolicy { Swarm, Human, Alternate };

constexpr std::string_view to_string(FirstMoverPolicy f) noexcept {
  switch (f) {
    case FirstMoverPolicy::Swarm: return "swarm";
    case FirstMoverPolicy::Human: return "human";
    case FirstMoverPolicy::Alternate: return "alternate";
  }
  return "?";
}

inline FirstMoverPolicy first_mover_from_string(std::string_view s) {
  for (FirstMoverPolicy f : {FirstMoverPolicy::Swarm, FirstMoverPolicy::Human, FirstMoverPolicy::Alternate})
    if (to_string(f) == s) return f;
  throw std::invalid_argument("first mover must be swarm, human or alternate");
}

inline game::OpponentModel opponent_from_string(std::string_view s) {
  if (s == "random") return game::OpponentModel::UniformRandom;
  if (s == "optimal") return game::OpponentModel::MinimaxOptimal;
  throw std::invalid_argument("opponent must be random or optimal");
}

// How the scripted human's moves reach the service.
enum class Ingestion { Direct, Vision };

struct DriveOptions {
  Ingestion ingestion = Ingestion::Direct;
  double frame_sigma = 0.0;         // pixel noise of rendered frames
  double frame_illumination = 0.0;  // illumination gradient of rendered frames
  int max_frame_retries = 20;
};

inline Cell opponent_move(game::OpponentModel model, const Board& b, game::PolicyRng& rng) {
  if (model == game::OpponentModel::MinimaxOptimal) return game::OptimalPolicy{}(b, Mark::O, rng);
  return game::RandomPolicy{}(b, Mark::O, rng);
}

// Plays one game to the end. With vision ingestion each human move is shown to
// the service as a rendered camera frame of the physical board; a misread
// frame is retried with fresh sensor noise.
inline GameSession drive_game(GameService& svc, Mark first, std::uint64_t seed, game::OpponentModel opponent,
                              game::PolicyRng& opponent_rng, const DriveOptions& opt = {}) {
  svc.start_game(first, seed);
  SeededRng frame_noise = SeededRng(seed).split(0x6672616d65);
  while (svc.session().phase != GamePhase::GameOver && svc.session().phase != GamePhase::Faulted) {
    if (svc.session().phase == GamePhase::SwarmFlying) {
      svc.settle();
      continue;
    }
    if (svc.session().phase != GamePhase::HumanTurn)
      throw std::logic_error("drive_game: stuck in phase " + std::string(to_string(svc.session().phase)));
    const Cell cell = opponent_move(opponent, svc.session().board, opponent_rng);
    if (opt.ingestion == Ingestion::Direct) {
      svc.on_human_move(cell, MoveSource::Ui);
      continue;
    }
    Board physical = svc.session().board;
    physical.set(cell, Mark::O);
    bool accepted = false;
    for (int attempt = 0; attempt <= opt.max_frame_retries && !accepted; ++attempt) {
      const vision::NoiseSpec noise{opt.frame_sigma, opt.frame_illumination, frame_noise.next()};
      const auto r = svc.on_frame(vision::render_board(physical, svc.vision_config().geometry, noise));
      accepted = r == MoveResult::Accepted && svc.session().board[cell] == Mark::O;
      if (r == MoveResult::Accepted && !accepted)
        throw std::runtime_error("drive_game: vision accepted the wrong cell");
    }
    if (!accepted) throw std::runtime_error("drive_game: vision never recognised the move");
  }
  svc.drain_outbox();
  return svc.session();
}

struct ResultColumn {
  int swarm_won = 0;
  int draw = 0;
  int human_won = 0;
  int faulted = 0;
  double total_duration = 0.0;  // s

  int games() const noexcept { return swarm_won + draw + human_won + faulted; }
  double average_duration() const noexcept { return games() ? total_duration / games() : 0.0; }
};

struct SelfplayStats {
  ResultColumn swarm_first;
  ResultColumn human_first;
};

// `n` full games against a scripted opponent. Game i uses seeds derived from
// `seed` and i, so a batch is reproducible.
inline SelfplayStats selfplay_batch(int n, FirstMoverPolicy first, game::OpponentModel opponent, std::uint64_t seed,
                                    const swarm::SwarmConfig& cfg = {}) {
  if (n < 1) throw std::invalid_argument("selfplay_batch: need at least one game");
  GameService svc(cfg);
  const SeededRng base(seed);
  SelfplayStats stats;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::uint64_t>(i);
    const Mark m = first == FirstMoverPolicy::Swarm   ? Mark::X
                   : first == FirstMoverPolicy::Human ? Mark::O
                                                      : (i % 2 == 0 ? Mark::X : Mark::O);
    game::PolicyRng opponent_rng = base.split(2 * k + 1);
    const GameSession s = drive_game(svc, m, base.split(2 * k).next(), opponent, opponent_rng);
    ResultColumn& col = m == Mark::X ? stats.swarm_first : stats.human_first;
    if (!s.result) ++col.faulted;
    else if (*s.result == Outcome::XWins) ++col.swarm_won;
    else if (*s.result == Outcome::OWins) ++col.human_won;
    else ++col.draw;
    col.total_duration += s.result ? s.duration() : 0.0;
  }
  return stats;
}

inline std::string format_table(const SelfplayStats& st) {
  const ResultColumn& a = st.swarm_first;
  const ResultColumn& b = st.human_first;
  std::string out;
  char buf[128];
  auto row = [&](const char* label, int x, int y) {
    std::snprintf(buf, sizeof buf, "%-18s %12d %12d %8d\n", label, x, y, x + y);
    out += buf;
  };
  std::snprintf(buf, sizeof buf, "%-18s %12s %12s %8s\n", "", "Swarm first", "Human first", "Total");
  out += buf;
  row("Swarm won", a.swarm_won, b.swarm_won);
  row("Draw", a.draw, b.draw);
  row("Human won", a.human_won, b.human_won);
  if (a.faulted + b.faulted) row("Faulted", a.faulted, b.faulted);
  row("Games in total", a.games(), b.games());
  const int all = a.games() + b.games();
  std::snprintf(buf, sizeof buf, "%-18s %12.1f %12.1f %8.1f\n", "Average time, s", a.average_duration(),
                b.average_duration(), all ? (a.total_duration + b.total_duration) / all : 0.0);
  out += buf;
  return out;
}

}  // namespace swarmtoe::orchestrator
