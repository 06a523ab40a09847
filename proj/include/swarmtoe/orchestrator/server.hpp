#pragma once

// TCP endpoint for the UI. One client at a time; the simulator advances in
// (optionally scaled) real time on the serving thread and drone poses are
// broadcast at a fixed rate.
//
// Client -> server: NewGame, HumanMove. Everything else is answered with an
// Error. Server -> client: StateUpdate, SwarmMove, DronePose, GameOver, Error.

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <utility>

#include "swarmtoe/orchestrator/session.hpp"
#include "swarmtoe/orchestrator/wire.hpp"

namespace swarmtoe::orchestrator {

inline constexpr const char* kPortEnv = "SWARMTOE_PORT";
inline constexpr int kDefaultPort = 7450;

// --port wins over the environment; 0 asks the kernel for a free port.
inline int resolve_port(std::optional<int> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kPortEnv); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0 || v > 65535) throw std::invalid_argument(std::string(kPortEnv) + " is not a port");
    return static_cast<int>(v);
  }
  return kDefaultPort;
}

namespace detail {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    reset();
    fd_ = std::exchange(o.fd_, -1);
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }

  int get() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

[[noreturn]] inline void throw_errno(const char* what) { throw std::system_error(errno, std::generic_category(), what); }

inline bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        pollfd p{fd, POLLOUT, 0};
        ::poll(&p, 1, 100);
        continue;
      }
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace detail

struct ServerOptions {
  int port = kDefaultPort;
  std::string bind_address = "127.0.0.1";
  double time_scale = 1.0;  // simulated seconds per wall second
  double pose_rate = 10.0;  // DronePose broadcasts per simulated second
  std::ostream* log = nullptr;
};

class Server {
 public:
  Server(GameService& svc, ServerOptions opt) : svc_(svc), opt_(std::move(opt)) {
    listen_ = detail::Fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!listen_) detail::throw_errno("socket");
    const int one = 1;
    ::setsockopt(listen_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(opt_.port));
    if (::inet_pton(AF_INET, opt_.bind_address.c_str(), &addr.sin_addr) != 1)
      throw std::invalid_argument("bad bind address " + opt_.bind_address);
    if (::bind(listen_.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) detail::throw_errno("bind");
    if (::listen(listen_.get(), 4) != 0) detail::throw_errno("listen");
    socklen_t len = sizeof addr;
    ::getsockname(listen_.get(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }

  int port() const noexcept { return port_; }
  void stop() noexcept { stop_.store(true); }

  // Serves until stop() is called.
  void run() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const double sim0 = svc_.clock();
    const double pose_period = 1.0 / opt_.pose_rate;
    double next_pose = sim0;
    while (!stop_.load()) {
      pollfd fds[2] = {{listen_.get(), POLLIN, 0}, {client_.get(), POLLIN, 0}};
      const nfds_t n = client_ ? 2 : 1;
      ::poll(fds, n, 5);
      if (fds[0].revents & POLLIN) accept_client();
      if (client_ && (fds[1].revents & (POLLIN | POLLHUP | POLLERR))) read_client();

      const double wall = std::chrono::duration<double>(clock::now() - t0).count();
      const double target = sim0 + wall * opt_.time_scale;
      while (svc_.clock() + 1e-9 < target) {
        svc_.tick();
        if (svc_.clock() + 1e-9 >= next_pose) {
          if (client_) svc_.publish_poses();
          next_pose += pose_period;
        }
      }
      flush();
    }
  }

 private:
  void log(const std::string& line) {
    if (opt_.log) *opt_.log << line << '\n' << std::flush;
  }

  void accept_client() {
    detail::Fd fd(::accept4(listen_.get(), nullptr, nullptr, SOCK_CLOEXEC | SOCK_NONBLOCK));
    if (!fd) return;
    if (client_) {
      // Busy: tell the newcomer and hang up.
      WireMessage busy{0, 0, msg::Error{"busy", "another client is connected"}};
      detail::send_all(fd.get(), encode(busy));
      return;
    }
    const int one = 1;
    ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    client_ = std::move(fd);
    reader_ = FrameReader{};
    svc_.drain_outbox();
    svc_.publish_state();
    log("client connected");
  }

  void drop_client(const std::string& why) {
    log("client dropped: " + why);
    client_.reset();
  }

  void read_client() {
    char buf[4096];
    for (;;) {
      const ssize_t n = ::recv(client_.get(), buf, sizeof buf, 0);
      if (n == 0) return drop_client("closed");
      if (n < 0) {
        if (errno == EINTR) continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK) break;
        return drop_client(std::strerror(errno));
      }
      reader_.feed(std::string_view(buf, static_cast<std::size_t>(n)));
    }
    try {
      while (auto item = reader_.next()) {
        if (!item->message) {
          svc_.report_error("bad-message", item->error);
          continue;
        }
        handle(*item->message);
      }
    } catch (const WireError& e) {
      svc_.report_error("bad-frame", e.what());
      flush();
      drop_client(e.what());
    }
  }

  void handle(const WireMessage& m) {
    if (const auto* ng = std::get_if<msg::NewGame>(&m.payload)) {
      try {
        svc_.start_game(ng->first, ng->seed);
      } catch (const SessionError&) {
        // already reported on the outbox
      }
      return;
    }
    if (const auto* hm = std::get_if<msg::HumanMove>(&m.payload)) {
      if (m.session != svc_.session().id) {
        svc_.report_error("stale-session", "move for session " + std::to_string(m.session) + ", current is " +
                                               std::to_string(svc_.session().id));
        return;
      }
      svc_.on_human_move(Cell(hm->cell), MoveSource::Ui);
      return;
    }
    svc_.report_error("unexpected-kind", std::string(m.kind()) + " is not accepted from clients");
  }

  void flush() {
    std::vector<WireMessage> out = svc_.drain_outbox();
    if (!client_) return;
    std::string bytes;
    for (const WireMessage& m : out) bytes += encode(m);
    if (!bytes.empty() && !detail::send_all(client_.get(), bytes)) drop_client("send failed");
  }

  GameService& svc_;
  ServerOptions opt_;
  detail::Fd listen_;
  detail::Fd client_;
  FrameReader reader_;
  int port_ = 0;
  std::atomic<bool> stop_{false};
};

// Blocking client used by the terminal tools and tests.
class Client {
 public:
  Client(const std::string& host, int port) {
    fd_ = detail::Fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!fd_) detail::throw_errno("socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw std::invalid_argument("bad host " + host);
    if (::connect(fd_.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) detail::throw_errno("connect");
    const int one = 1;
    ::setsockopt(fd_.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }

  void send(std::uint64_t session, Payload p) { send_raw(encode({session, ++seq_, std::move(p)})); }

  void send_raw(std::string_view bytes) {
    if (!detail::send_all(fd_.get(), bytes)) detail::throw_errno("send");
  }

  // Next message, or nothing once `timeout` passes. Dropped frames are
  // counted in errors().
  std::optional<WireMessage> receive(std::chrono::milliseconds timeout = std::chrono::milliseconds(2000)) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      while (auto item = reader_.next()) {
        if (item->message) return std::move(item->message);
        ++errors_;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return std::nullopt;
      pollfd p{fd_.get(), POLLIN, 0};
      if (::poll(&p, 1, static_cast<int>(left.count())) <= 0) continue;
      char buf[4096];
      const ssize_t n = ::recv(fd_.get(), buf, sizeof buf, 0);
      if (n <= 0) return std::nullopt;
      reader_.feed(std::string_view(buf, static_cast<std::size_t>(n)));
    }
  }

  std::size_t errors() const noexcept { return errors_; }

 private:
  detail::Fd fd_;
  FrameReader reader_;
  std::uint64_t seq_ = 0;
  std::size_t errors_ = 0;
};

}  // namespace swarmtoe::orchestrator
