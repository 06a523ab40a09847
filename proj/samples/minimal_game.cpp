// Plays one seeded game of the swarm policy against a random opponent and
// prints the transcript.

#include <iostream>

#include "swarmtoe/game/play.hpp"

int main() {
  using namespace swarmtoe::game;
  PolicyRng rng(7);
  const Transcript t = play_game(ImprovedBasicPolicy{}, RandomPolicy{}, Mark::X, rng);
  write_transcript(std::cout, t);
  std::cout << pretty(t.replay());
}
