#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "swarmtoe/game/analysis.hpp"
#include "swarmtoe/orchestrator/selfplay.hpp"
#include "swarmtoe/orchestrator/server.hpp"
#include "swarmtoe/vision/pipeline.hpp"
#include "swarmtoe/vision/pnm.hpp"
#include "swarmtoe/vision/render.hpp"

using namespace swarmtoe;
using namespace swarmtoe::orchestrator;

namespace {

Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

swarm::SwarmConfig load_config(const std::string& path, std::uint64_t seed) {
  swarm::SwarmConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    cfg = swarm::read_config(in);
  }
  cfg.seed = seed;
  return cfg;
}

std::unique_ptr<std::ofstream> open_transcript(const std::string& path) {
  if (path.empty()) return nullptr;
  auto out = std::make_unique<std::ofstream>(path, std::ios::app);
  if (!*out) throw std::runtime_error("cannot open transcript " + path);
  return out;
}

void print_board(const game::Board& b) {
  std::cout << game::pretty(b) << '\n';
}

int cmd_serve(std::optional<int> port, std::uint64_t seed, double time_scale, const std::string& config,
              const std::string& transcript) {
  GameService svc(load_config(config, seed));
  auto log = open_transcript(transcript);
  svc.set_transcript(log.get());
  ServerOptions opt;
  opt.port = resolve_port(port);
  opt.time_scale = time_scale;
  opt.log = &std::cerr;
  Server server(svc, opt);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on 127.0.0.1:" << server.port() << std::endl;
  server.run();
  g_server = nullptr;
  return 0;
}

int cmd_play(const std::string& first, std::uint64_t seed, const std::string& transcript) {
  GameService svc;
  auto log = open_transcript(transcript);
  svc.set_transcript(log.get());
  svc.start_game(first == "swarm" ? game::Mark::X : game::Mark::O, seed);
  std::cout << "You play O. Cells are numbered 1..9 row by row from the top left.\n";
  while (svc.session().phase != GamePhase::GameOver && svc.session().phase != GamePhase::Faulted) {
    if (svc.session().phase == GamePhase::SwarmFlying) {
      const double t0 = svc.clock();
      const Cell target = svc.world().active_mission()->cell;
      svc.settle();
      std::printf("drone landed on cell %d after %.2f s of flight\n", target.index(), svc.clock() - t0);
      continue;
    }
    print_board(svc.session().board);
    std::cout << "your move> " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) return 1;
    int cell = 0;
    try {
      cell = std::stoi(line);
    } catch (const std::exception&) {
    }
    if (cell < 1 || cell > 9) {
      std::cout << "enter a number from 1 to 9\n";
      continue;
    }
    svc.drain_outbox();
    if (svc.on_human_move(Cell(cell), MoveSource::Ui) == MoveResult::Rejected) {
      for (const WireMessage& m : svc.drain_outbox())
        if (m.is<msg::Error>()) std::cout << m.as<msg::Error>().message << '\n';
    }
  }
  print_board(svc.session().board);
  if (svc.session().result) {
    std::printf("result: %s after %.1f s\n", std::string(game::to_string(*svc.session().result)).c_str(),
                svc.session().duration());
  } else {
    std::cout << "game aborted: a drone mission failed\n";
  }
  return 0;
}

int cmd_selfplay(int games, std::uint64_t seed, const std::string& first, const std::string& opponent,
                 const std::string& config) {
  const SelfplayStats st =
      selfplay_batch(games, first_mover_from_string(first), opponent_from_string(opponent), seed, load_config(config, seed));
  std::cout << format_table(st);
  return 0;
}

int cmd_vision(const std::string& image) {
  const vision::RgbImage frame = vision::read_image_file(image);
  const vision::Observations obs = vision::observe_cells(frame);
  std::cout << vision::board_from_observations(obs).str() << '\n';
  return 0;
}

int cmd_render(const std::string& board, const std::string& out, double sigma, double illumination,
               std::uint64_t seed) {
  const auto img = vision::render_board(game::Board::parse(board), {}, {sigma, illumination, seed});
  vision::write_ppm_file(out, img);
  return 0;
}

int cmd_analyze(int seeds) {
  const game::RuleComplianceReport r = game::rule_compliance(seeds);
  std::printf("positions with X to move : %d\n", r.positions);
  std::printf("seeds per position       : %d\n", r.seeds);
  std::printf("decisions                : %ld\n", r.decisions);
  std::printf("win available / taken    : %ld / %ld\n", r.win_available, r.win_taken);
  std::printf("threat only / blocked    : %ld / %ld\n", r.threat_only, r.threat_blocked);
  for (const std::string& v : r.violations) std::printf("violation: %s\n", v.c_str());
  std::printf("%s\n", r.compliant() ? "compliant" : "NOT compliant");
  return r.compliant() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tic-tac-toe against a simulated drone swarm"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "Run the game service for a UI client");
  std::optional<int> port;
  std::uint64_t serve_seed = 0;
  double time_scale = 1.0;
  std::string serve_config, serve_transcript;
  serve->add_option("--port", port, "TCP port (default $SWARMTOE_PORT or 7450; 0 picks a free port)");
  serve->add_option("--seed", serve_seed, "Simulator seed (motion-capture noise)");
  serve->add_option("--time-scale", time_scale, "Simulated seconds per wall second")->check(CLI::PositiveNumber);
  serve->add_option("--config", serve_config, "Swarm config file (key = value)")->check(CLI::ExistingFile);
  serve->add_option("--transcript", serve_transcript, "Append game transcripts to this file");

  auto* play = app.add_subcommand("play", "Play in the terminal against the swarm");
  std::string play_first = "human", play_transcript;
  std::uint64_t play_seed = 1;
  play->add_option("--first", play_first, "Who moves first")->check(CLI::IsMember({"human", "swarm"}));
  play->add_option("--seed", play_seed, "Swarm policy seed");
  play->add_option("--transcript", play_transcript, "Append the game transcript to this file");

  auto* selfplay = app.add_subcommand("selfplay", "Play a batch against a scripted opponent");
  int games = 100;
  std::uint64_t sp_seed = 1;
  std::string sp_first = "alternate", sp_opponent = "random", sp_config;
  selfplay->add_option("--games", games, "Number of games")->check(CLI::PositiveNumber);
  selfplay->add_option("--seed", sp_seed, "Batch seed");
  selfplay->add_option("--first", sp_first, "Who moves first")->check(CLI::IsMember({"swarm", "human", "alternate"}));
  selfplay->add_option("--opponent", sp_opponent, "Scripted opponent")->check(CLI::IsMember({"random", "optimal"}));
  selfplay->add_option("--config", sp_config, "Swarm config file (key = value)")->check(CLI::ExistingFile);

  auto* vis = app.add_subcommand("vision", "Read a board from a PPM/PGM image");
  std::string image;
  vis->add_option("--image", image, "Image path")->required()->check(CLI::ExistingFile);

  auto* render = app.add_subcommand("render", "Render a synthetic camera frame of a board");
  std::string board, out;
  double sigma = 0.0, illumination = 0.0;
  std::uint64_t render_seed = 0;
  render->add_option("--board", board, "Nine characters of X, O and .")->required();
  render->add_option("--out", out, "Output PPM path")->required();
  render->add_option("--sigma", sigma, "Pixel noise standard deviation");
  render->add_option("--illumination", illumination, "Illumination gradient");
  render->add_option("--seed", render_seed, "Noise seed");

  auto* analyze = app.add_subcommand("analyze", "Exhaustive rule-compliance scan of the swarm policy");
  int seeds = 64;
  analyze->add_option("--seeds", seeds, "Policy seeds per position")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return cmd_serve(port, serve_seed, time_scale, serve_config, serve_transcript);
    if (*play) return cmd_play(play_first, play_seed, play_transcript);
    if (*selfplay) return cmd_selfplay(games, sp_seed, sp_first, sp_opponent, sp_config);
    if (*vis) return cmd_vision(image);
    if (*render) return cmd_render(board, out, sigma, illumination, render_seed);
    if (*analyze) return cmd_analyze(seeds);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
