#pragma once

// One live game between a human (O) and the swarm (X).
//
// Phases:
//   AwaitConfig -> HumanTurn | Deciding
//   HumanTurn   -> Deciding
//   Deciding    -> SwarmFlying | GameOver
//   SwarmFlying -> CheckEnd | Faulted
//   CheckEnd    -> HumanTurn | GameOver
//
// The session clock is the simulator clock. A move's duration runs from the
// end of the previous move (or game start) to the O being placed or the drone
// landing, so the game duration is the sum of move durations.
//
// Human moves arrive from the UI or from camera frames. A move already on the
// board is ignored, so the same move delivered by both paths counts once. A
// UI move that contradicts a vision move in the same turn is reported as an
// Error; the vision move stands because its drone is already flying.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swarmtoe/game/board.hpp"
#include "swarmtoe/game/policy.hpp"
#include "swarmtoe/orchestrator/wire.hpp"
#include "swarmtoe/swarm/world.hpp"
#include "swarmtoe/vision/pipeline.hpp"

namespace swarmtoe::orchestrator {

using game::Board;
using game::Cell;
using game::Mark;
using game::Outcome;

inline constexpr bool transition_allowed(GamePhase from, GamePhase to) noexcept {
  using P = GamePhase;
  switch (from) {
    case P::AwaitConfig: return to == P::HumanTurn || to == P::Deciding;
    case P::HumanTurn: return to == P::Deciding;
    case P::Deciding: return to == P::SwarmFlying || to == P::GameOver;
    case P::SwarmFlying: return to == P::CheckEnd || to == P::Faulted;
    case P::CheckEnd: return to == P::HumanTurn || to == P::GameOver;
    case P::GameOver:
    case P::Faulted: return false;
  }
  return false;
}

class SessionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MoveSource { Ui, Vision, Swarm };

constexpr std::string_view to_string(MoveSource s) noexcept {
  switch (s) {
    case MoveSource::Ui: return "ui";
    case MoveSource::Vision: return "vision";
    case MoveSource::Swarm: return "swarm";
  }
  return "?";
}

struct SessionMove {
  int move_no = 0;
  Mark mark = Mark::Empty;
  Cell cell{1};
  MoveSource source = MoveSource::Ui;
  double started_at = 0.0;   // s, session clock
  double finished_at = 0.0;  // s, session clock

  double duration() const noexcept { return finished_at - started_at; }
};

struct GameSession {
  std::uint64_t id = 0;
  Board board;
  GamePhase phase = GamePhase::AwaitConfig;
  Mark first_mover = Mark::O;
  std::vector<SessionMove> moves;
  std::uint64_t seed = 0;
  std::optional<Outcome> result;
  double started_at = 0.0;
  double ended_at = 0.0;

  double duration() const noexcept { return ended_at - started_at; }
};

enum class MoveResult { Accepted, Duplicate, Rejected };

struct PhaseTransition {
  GamePhase from;
  GamePhase to;
};

class GameService {
 public:
  explicit GameService(swarm::SwarmConfig swarm_cfg = {}, vision::PipelineConfig vision_cfg = {})
      : world_(swarm_cfg), vision_cfg_(vision_cfg) {}

  const GameSession& session() const noexcept { return session_; }
  const swarm::World& world() const noexcept { return world_; }
  const vision::PipelineConfig& vision_config() const noexcept { return vision_cfg_; }
  double clock() const noexcept { return world_.clock(); }
  const std::vector<PhaseTransition>& transitions() const noexcept { return transitions_; }

  // Session transcripts are appended here as moves happen.
  void set_transcript(std::ostream* os) { transcript_ = os; }

  // Starts a new game; landed drones go back to their pads. Throws while a
  // mission is in flight.
  const GameSession& start_game(Mark first_mover, std::uint64_t seed) {
    if (first_mover != Mark::X && first_mover != Mark::O) throw SessionError("first mover must be X or O");
    if (world_.busy()) {
      emit(msg::Error{"drones-active", "drones are still flying from the previous game"});
      throw SessionError("start_game: drones still active");
    }
    world_.reset_fleet();
    world_.take_events();
    session_ = GameSession{};
    session_.id = ++session_counter_;
    session_.first_mover = first_mover;
    session_.seed = seed;
    session_.started_at = world_.clock();
    turn_started_ = session_.started_at;
    rng_ = game::PolicyRng(seed);
    transitions_.clear();
    last_vision_move_.reset();
    if (transcript_) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "# session %llu seed %llu first %c\n",
                    static_cast<unsigned long long>(session_.id), static_cast<unsigned long long>(seed),
                    game::to_char(first_mover));
      *transcript_ << buf << std::flush;
    }
    publish_state();
    if (first_mover == Mark::O) {
      enter(GamePhase::HumanTurn);
    } else {
      enter(GamePhase::Deciding);
      decide();
    }
    return session_;
  }

  MoveResult on_human_move(Cell cell, MoveSource source) {
    if (source == MoveSource::Swarm) throw SessionError("human move with swarm source");
    if (session_.phase == GamePhase::AwaitConfig) return reject("no-game", "no game in progress");
    if (session_.board[cell] == Mark::O) return MoveResult::Duplicate;
    if (session_.phase != GamePhase::HumanTurn) {
      if (source == MoveSource::Ui && last_vision_move_ && *last_vision_move_ != cell &&
          (session_.phase == GamePhase::Deciding || session_.phase == GamePhase::SwarmFlying))
        return reject("vision-conflict", "camera saw O on cell " + std::to_string(last_vision_move_->index()) +
                                             ", UI reported cell " + std::to_string(cell.index()) +
                                             "; re-checking the board");
      return reject("wrong-phase", "not the human's turn (phase " + std::string(to_string(session_.phase)) + ")");
    }
    if (!session_.board.is_empty(cell))
      return reject("occupied", "cell " + std::to_string(cell.index()) + " is occupied");

    session_.board.set(cell, Mark::O);
    record(Mark::O, cell, source);
    last_vision_move_ = source == MoveSource::Vision ? std::optional<Cell>(cell) : std::nullopt;
    enter(GamePhase::Deciding);
    if (!finish_if_over()) decide();
    return MoveResult::Accepted;
  }

  // Runs the vision pipeline on a camera frame. Returns nothing when the
  // frame shows no new circle.
  std::optional<MoveResult> on_frame(const vision::RgbImage& frame) {
    if (session_.phase == GamePhase::AwaitConfig) return std::nullopt;
    std::optional<Cell> cell;
    try {
      cell = vision::detect_human_move(session_.board, vision::observe_cells(frame, vision_cfg_));
    } catch (const vision::InconsistentFrame& e) {
      return reject("inconsistent-frame", std::string(e.what()) + "; waiting for the next frame");
    }
    if (!cell) return std::nullopt;
    return on_human_move(*cell, MoveSource::Vision);
  }

  // One simulator step; mission events drive the session.
  void tick() {
    world_.tick();
    for (const swarm::SwarmEvent& ev : world_.take_events()) {
      if (session_.phase != GamePhase::SwarmFlying || !pending_ || ev.drone != pending_->drone) continue;
      if (ev.kind == swarm::SwarmEventKind::MissionComplete) {
        on_mission_complete();
      } else {
        emit(msg::Error{"mission-failed", "drone " + std::to_string(ev.drone) + ": " + ev.detail});
        pending_.reset();
        enter(GamePhase::Faulted);
      }
    }
  }

  // Ticks until the swarm's move is finished (or `limit` seconds pass).
  void settle(double limit = 120.0) {
    const double stop = world_.clock() + limit;
    while (session_.phase == GamePhase::SwarmFlying && world_.clock() < stop) tick();
  }

  void advance(double seconds) {
    const auto n = static_cast<std::uint64_t>(std::llround(seconds / world_.config().dt));
    for (std::uint64_t i = 0; i < n; ++i) tick();
  }

  void publish_poses() {
    for (const swarm::MocapSample& s : world_.mocap_sample())
      emit(msg::DronePose{s.id, s.pose.x, s.pose.y, s.pose.z, world_.drone(s.id).status, s.timestamp});
  }

  void publish_state() {
    emit(msg::StateUpdate{session_.board, session_.phase, session_.result.value_or(Outcome::Ongoing)});
  }

  // Reports an error to the UI without changing state.
  void report_error(std::string code, std::string message) { emit(msg::Error{std::move(code), std::move(message)}); }

  std::vector<WireMessage> drain_outbox() { return std::exchange(outbox_, {}); }
  const std::vector<WireMessage>& outbox() const noexcept { return outbox_; }

  // Board cells covered by landed drones; equals the X marks after every
  // completed swarm turn.
  game::CellSet landed_cells() const {
    game::CellSet out;
    for (const swarm::DroneState& d : world_.fleet())
      if (d.status == swarm::DroneStatus::Landed && d.assigned_cell) out.insert(*d.assigned_cell);
    return out;
  }

 private:
  struct PendingSwarmMove {
    Cell cell;
    int drone;
  };

  void on_mission_complete() {
    session_.board.set(pending_->cell, Mark::X);
    record(Mark::X, pending_->cell, MoveSource::Swarm);
    pending_.reset();
    enter(GamePhase::CheckEnd);
    if (!finish_if_over()) {
      last_vision_move_.reset();
      enter(GamePhase::HumanTurn);
    }
  }

  void decide() {
    const Cell cell = game::ImprovedBasicPolicy{}(session_.board, Mark::X, rng_);
    const int drone = world_.assign_drone(cell);
    pending_ = PendingSwarmMove{cell, drone};
    emit(msg::SwarmMove{cell.index(), drone});
    enter(GamePhase::SwarmFlying);
  }

  bool finish_if_over() {
    const Outcome o = game::evaluate(session_.board);
    if (o == Outcome::Ongoing) return false;
    session_.result = o;
    session_.ended_at = world_.clock();
    enter(GamePhase::GameOver);
    emit(msg::GameOver{o, session_.duration()});
    if (transcript_) *transcript_ << "# outcome " << game::to_string(o) << '\n' << std::flush;
    return true;
  }

  void record(Mark mark, Cell cell, MoveSource source) {
    const double now = world_.clock();
    SessionMove m{static_cast<int>(session_.moves.size()) + 1, mark, cell, source, turn_started_, now};
    session_.moves.push_back(m);
    turn_started_ = now;
    if (transcript_) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%d, %c, %d, %.3f\n", m.move_no, game::to_char(mark), cell.index(),
                    (now - session_.started_at) * 1000.0);
      *transcript_ << buf << std::flush;
    }
  }

  void enter(GamePhase next) {
    if (!transition_allowed(session_.phase, next))
      throw std::logic_error(std::string("illegal phase transition ") + std::string(to_string(session_.phase)) +
                             " -> " + std::string(to_string(next)));
    transitions_.push_back({session_.phase, next});
    session_.phase = next;
    publish_state();
  }

  MoveResult reject(std::string code, std::string message) {
    emit(msg::Error{std::move(code), std::move(message)});
    return MoveResult::Rejected;
  }

  void emit(Payload p) { outbox_.push_back(seq_.stamp(session_.id, std::move(p))); }

  swarm::World world_;
  vision::PipelineConfig vision_cfg_;
  GameSession session_;
  game::PolicyRng rng_{0};
  std::optional<PendingSwarmMove> pending_;
  std::optional<Cell> last_vision_move_;
  double turn_started_ = 0.0;
  std::uint64_t session_counter_ = 0;
  std::ostream* transcript_ = nullptr;
  std::vector<PhaseTransition> transitions_;
  std::vector<WireMessage> outbox_;
  Sequencer seq_;
};

}  // namespace swarmtoe::orchestrator
