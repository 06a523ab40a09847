#pragma once

// Service <-> UI messages.
//
// Frame:   <decimal payload length>\n<payload>
// Payload: one `key:type=value` field per line, type one of i (signed
//          integer), u (unsigned integer), f (double), s (string). Every
//          payload starts with proto, kind, session and seq; the rest
//          depends on the kind. Strings escape '\\' and newline as "\\\\"
//          and "\\n".
//
// Example:
//   proto:s=swarmtoe/1
//   kind:s=SwarmMove
//   session:u=3
//   seq:u=12
//   cell:i=5
//   drone:i=2

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "swarmtoe/game/board.hpp"
#include "swarmtoe/swarm/types.hpp"

namespace swarmtoe::orchestrator {

inline constexpr std::string_view kProtocol = "swarmtoe/1";
inline constexpr std::size_t kMaxFrame = 1 << 16;

enum class GamePhase { AwaitConfig, HumanTurn, Deciding, SwarmFlying, CheckEnd, GameOver, Faulted };

constexpr std::string_view to_string(GamePhase p) noexcept {
  switch (p) {
    case GamePhase::AwaitConfig: return "AwaitConfig";
    case GamePhase::HumanTurn: return "HumanTurn";
    case GamePhase::Deciding: return "Deciding";
    case GamePhase::SwarmFlying: return "SwarmFlying";
    case GamePhase::CheckEnd: return "CheckEnd";
    case GamePhase::GameOver: return "GameOver";
    case GamePhase::Faulted: return "Faulted";
  }
  return "?";
}

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline GamePhase phase_from_string(std::string_view s) {
  for (GamePhase p : {GamePhase::AwaitConfig, GamePhase::HumanTurn, GamePhase::Deciding, GamePhase::SwarmFlying,
                      GamePhase::CheckEnd, GamePhase::GameOver, GamePhase::Faulted})
    if (to_string(p) == s) return p;
  throw WireError("unknown phase '" + std::string(s) + "'");
}

inline swarm::DroneStatus drone_status_from_string(std::string_view s) {
  using swarm::DroneStatus;
  for (DroneStatus d : {DroneStatus::Idle, DroneStatus::Flying, DroneStatus::Landing, DroneStatus::Landed,
                        DroneStatus::Failed})
    if (swarm::to_string(d) == s) return d;
  throw WireError("unknown drone status '" + std::string(s) + "'");
}

namespace msg {

struct NewGame {
  game::Mark first = game::Mark::O;  // O: human first, X: swarm first
  std::uint64_t seed = 0;
  friend bool operator==(const NewGame&, const NewGame&) = default;
};

struct StateUpdate {
  game::Board board;
  GamePhase phase = GamePhase::AwaitConfig;
  game::Outcome result = game::Outcome::Ongoing;
  friend bool operator==(const StateUpdate&, const StateUpdate&) = default;
};

struct HumanMove {
  int cell = 1;
  friend bool operator==(const HumanMove&, const HumanMove&) = default;
};

struct SwarmMove {
  int cell = 1;
  int drone = 0;
  friend bool operator==(const SwarmMove&, const SwarmMove&) = default;
};

struct DronePose {
  int drone = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  swarm::DroneStatus status = swarm::DroneStatus::Idle;
  double t = 0.0;
  friend bool operator==(const DronePose&, const DronePose&) = default;
};

struct GameOver {
  game::Outcome result = game::Outcome::Draw;
  double duration = 0.0;  // seconds
  friend bool operator==(const GameOver&, const GameOver&) = default;
};

struct Error {
  std::string code;
  std::string message;
  friend bool operator==(const Error&, const Error&) = default;
};

}  // namespace msg

using Payload = std::variant<msg::NewGame, msg::StateUpdate, msg::HumanMove, msg::SwarmMove, msg::DronePose,
                             msg::GameOver, msg::Error>;

inline constexpr std::string_view kKindNames[] = {"NewGame",   "StateUpdate", "HumanMove", "SwarmMove",
                                                  "DronePose", "GameOver",    "Error"};

struct WireMessage {
  std::uint64_t session = 0;
  std::uint64_t seq = 0;
  Payload payload;

  std::string_view kind() const noexcept { return kKindNames[payload.index()]; }
  template <class T>
  bool is() const noexcept {
    return std::holds_alternative<T>(payload);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(payload);
  }

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

namespace detail {

class FieldWriter {
 public:
  void s(std::string_view key, std::string_view v) {
    out_.append(key).append(":s=");
    for (char c : v) {
      if (c == '\\') out_ += "\\\\";
      else if (c == '\n') out_ += "\\n";
      else out_ += c;
    }
    out_ += '\n';
  }
  void i(std::string_view key, std::int64_t v) { num(key, 'i', v); }
  void u(std::string_view key, std::uint64_t v) { num(key, 'u', v); }
  void f(std::string_view key, double v) { num(key, 'f', v); }
  std::string take() { return std::move(out_); }

 private:
  template <class T>
  void num(std::string_view key, char type, T v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    out_.append(key).append(1, ':').append(1, type).append(1, '=').append(buf, r.ptr);
    out_ += '\n';
  }
  std::string out_;
};

class FieldReader {
 public:
  explicit FieldReader(std::string_view payload) {
    std::size_t pos = 0;
    while (pos < payload.size()) {
      const std::size_t nl = payload.find('\n', pos);
      if (nl == std::string_view::npos) throw WireError("payload line not newline-terminated");
      const std::string_view line = payload.substr(pos, nl - pos);
      pos = nl + 1;
      const std::size_t colon = line.find(':');
      if (colon == std::string_view::npos || colon == 0 || line.size() < colon + 3 || line[colon + 2] != '=')
        throw WireError("malformed field '" + std::string(line) + "'");
      const std::string key(line.substr(0, colon));
      const char type = line[colon + 1];
      if (type != 'i' && type != 'u' && type != 'f' && type != 's')
        throw WireError("field '" + key + "' has unknown type '" + std::string(1, type) + "'");
      if (!fields_.emplace(key, Field{type, std::string(line.substr(colon + 3))}).second)
        throw WireError("duplicate field '" + key + "'");
    }
  }

  std::string s(const std::string& key) {
    const std::string raw = take(key, 's');
    std::string out;
    for (std::size_t k = 0; k < raw.size(); ++k) {
      if (raw[k] != '\\') {
        out += raw[k];
        continue;
      }
      if (++k == raw.size()) throw WireError("field '" + key + "': dangling escape");
      if (raw[k] == '\\') out += '\\';
      else if (raw[k] == 'n') out += '\n';
      else throw WireError("field '" + key + "': bad escape");
    }
    return out;
  }
  std::int64_t i(const std::string& key) { return num<std::int64_t>(key, 'i'); }
  std::uint64_t u(const std::string& key) { return num<std::uint64_t>(key, 'u'); }
  double f(const std::string& key) { return num<double>(key, 'f'); }

  void expect_consumed() const {
    if (!fields_.empty()) throw WireError("unexpected field '" + fields_.begin()->first + "'");
  }

 private:
  struct Field {
    char type;
    std::string value;
  };

  std::string take(const std::string& key, char type) {
    const auto it = fields_.find(key);
    if (it == fields_.end()) throw WireError("missing field '" + key + "'");
    if (it->second.type != type)
      throw WireError("field '" + key + "' has type " + it->second.type + ", expected " + type);
    std::string value = std::move(it->second.value);
    fields_.erase(it);
    return value;
  }

  template <class T>
  T num(const std::string& key, char type) {
    const std::string raw = take(key, type);
    T v{};
    const auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc{} || p != raw.data() + raw.size() || raw.empty())
      throw WireError("field '" + key + "': bad value '" + raw + "'");
    return v;
  }

  std::map<std::string, Field> fields_;
};

inline int cell_field(FieldReader& r, const std::string& key) {
  const std::int64_t v = r.i(key);
  if (v < 1 || v > 9) throw WireError("field '" + key + "' out of range 1..9");
  return static_cast<int>(v);
}

inline int drone_field(FieldReader& r) {
  const std::int64_t v = r.i("drone");
  if (v < 0 || v >= swarm::kFleetSize) throw WireError("field 'drone' out of range");
  return static_cast<int>(v);
}

inline game::Outcome outcome_field(FieldReader& r) {
  try {
    return game::outcome_from_string(r.s("result"));
  } catch (const std::invalid_argument& e) {
    throw WireError(e.what());
  }
}

}  // namespace detail

// Payload text for one message (without the length prefix).
inline std::string encode_payload(const WireMessage& m) {
  detail::FieldWriter w;
  w.s("proto", kProtocol);
  w.s("kind", m.kind());
  w.u("session", m.session);
  w.u("seq", m.seq);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, msg::NewGame>) {
          w.s("first", std::string(1, game::to_char(p.first)));
          w.u("seed", p.seed);
        } else if constexpr (std::is_same_v<T, msg::StateUpdate>) {
          w.s("board", p.board.str());
          w.s("phase", to_string(p.phase));
          w.s("result", game::to_string(p.result));
        } else if constexpr (std::is_same_v<T, msg::HumanMove>) {
          w.i("cell", p.cell);
        } else if constexpr (std::is_same_v<T, msg::SwarmMove>) {
          w.i("cell", p.cell);
          w.i("drone", p.drone);
        } else if constexpr (std::is_same_v<T, msg::DronePose>) {
          w.i("drone", p.drone);
          w.f("x", p.x);
          w.f("y", p.y);
          w.f("z", p.z);
          w.s("status", swarm::to_string(p.status));
          w.f("t", p.t);
        } else if constexpr (std::is_same_v<T, msg::GameOver>) {
          w.s("result", game::to_string(p.result));
          w.f("duration", p.duration);
        } else {
          w.s("code", p.code);
          w.s("message", p.message);
        }
      },
      m.payload);
  return w.take();
}

inline std::string encode(const WireMessage& m) {
  const std::string payload = encode_payload(m);
  return std::to_string(payload.size()) + '\n' + payload;
}

inline WireMessage decode_payload(std::string_view payload) {
  detail::FieldReader r(payload);
  if (r.s("proto") != kProtocol) throw WireError("unsupported protocol");
  const std::string kind = r.s("kind");
  WireMessage m;
  m.session = r.u("session");
  m.seq = r.u("seq");
  if (kind == "NewGame") {
    const std::string first = r.s("first");
    if (first != "X" && first != "O") throw WireError("field 'first' must be X or O");
    m.payload = msg::NewGame{game::mark_from_char(first[0]), r.u("seed")};
  } else if (kind == "StateUpdate") {
    msg::StateUpdate p;
    try {
      p.board = game::Board::parse(r.s("board"));
    } catch (const std::invalid_argument& e) {
      throw WireError(e.what());
    }
    p.phase = phase_from_string(r.s("phase"));
    p.result = detail::outcome_field(r);
    m.payload = p;
  } else if (kind == "HumanMove") {
    m.payload = msg::HumanMove{detail::cell_field(r, "cell")};
  } else if (kind == "SwarmMove") {
    const int cell = detail::cell_field(r, "cell");
    m.payload = msg::SwarmMove{cell, detail::drone_field(r)};
  } else if (kind == "DronePose") {
    msg::DronePose p;
    p.drone = detail::drone_field(r);
    p.x = r.f("x");
    p.y = r.f("y");
    p.z = r.f("z");
    p.status = drone_status_from_string(r.s("status"));
    p.t = r.f("t");
    m.payload = p;
  } else if (kind == "GameOver") {
    const game::Outcome result = detail::outcome_field(r);
    m.payload = msg::GameOver{result, r.f("duration")};
  } else if (kind == "Error") {
    const std::string code = r.s("code");
    m.payload = msg::Error{code, r.s("message")};
  } else {
    throw WireError("unknown message kind '" + kind + "'");
  }
  r.expect_consumed();
  return m;
}

// Decodes exactly one complete frame.
inline WireMessage decode(std::string_view frame) {
  const std::size_t nl = frame.find('\n');
  if (nl == std::string_view::npos || nl == 0 || nl > 7) throw WireError("bad frame header");
  std::size_t len = 0;
  const auto [p, ec] = std::from_chars(frame.data(), frame.data() + nl, len);
  if (ec != std::errc{} || p != frame.data() + nl) throw WireError("bad frame length");
  if (frame.size() - nl - 1 < len) throw WireError("truncated frame");
  if (frame.size() - nl - 1 > len) throw WireError("trailing bytes after frame");
  return decode_payload(frame.substr(nl + 1));
}

// Incremental decoder for a byte stream. Bad payloads and sequence
// regressions are reported and skipped; the stream stays usable. A corrupt
// length header cannot be resynchronised and throws.
class FrameReader {
 public:
  struct Item {
    std::optional<WireMessage> message;
    std::string error;  // set when the frame was dropped
  };

  void feed(std::string_view bytes) { buf_.append(bytes); }

  std::optional<Item> next() {
    const std::size_t nl = buf_.find('\n');
    if (nl == std::string::npos) {
      if (buf_.size() > 7) throw WireError("bad frame header");
      return std::nullopt;
    }
    std::size_t len = 0;
    const auto [p, ec] = std::from_chars(buf_.data(), buf_.data() + nl, len);
    if (nl == 0 || nl > 7 || ec != std::errc{} || p != buf_.data() + nl || len > kMaxFrame)
      throw WireError("bad frame header");
    if (buf_.size() - nl - 1 < len) return std::nullopt;
    const std::string payload = buf_.substr(nl + 1, len);
    buf_.erase(0, nl + 1 + len);
    Item item;
    try {
      WireMessage m = decode_payload(payload);
      if (last_seq_ && m.seq <= *last_seq_) {
        item.error = "sequence regression: " + std::to_string(m.seq) + " after " + std::to_string(*last_seq_);
        ++dropped_;
        return item;
      }
      last_seq_ = m.seq;
      item.message = std::move(m);
    } catch (const WireError& e) {
      item.error = e.what();
      ++dropped_;
    }
    return item;
  }

  // Bytes of an incomplete frame still buffered.
  std::size_t pending() const noexcept { return buf_.size(); }
  std::size_t dropped() const noexcept { return dropped_; }
  void reset_sequence() noexcept { last_seq_.reset(); }

 private:
  std::string buf_;
  std::optional<std::uint64_t> last_seq_;
  std::size_t dropped_ = 0;
};

// Stamps outgoing messages with a session id and a strictly increasing
// sequence number.
class Sequencer {
 public:
  WireMessage stamp(std::uint64_t session, Payload p) { return {session, ++seq_, std::move(p)}; }
  std::uint64_t last() const noexcept { return seq_; }

 private:
  std::uint64_t seq_ = 0;
};

}  // namespace swarmtoe::orchestrator
