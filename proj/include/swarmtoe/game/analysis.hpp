#pragma once

// Exhaustive check that the swarm policy never misses an immediate win and
// never leaves an immediate threat unblocked.

#include <cstdint>
#include <string>
#include <vector>

#include "swarmtoe/game/oracle.hpp"
#include "swarmtoe/game/policy.hpp"

namespace swarmtoe::game {

struct RuleComplianceReport {
  int positions = 0;       // distinct X-to-move positions scanned
  int seeds = 0;           // policy seeds per position
  long decisions = 0;      // positions x seeds
  long win_available = 0;  // decisions where X could win at once
  long win_taken = 0;
  long threat_only = 0;    // O threatens, X has no win
  long threat_blocked = 0;
  std::vector<std::string> violations;  // "board seed cell" of the first failures

  bool compliant() const noexcept { return win_taken == win_available && threat_blocked == threat_only; }
};

inline RuleComplianceReport rule_compliance(int seeds, std::uint64_t base_seed = 0, std::size_t max_violations = 20) {
  RuleComplianceReport r;
  r.seeds = seeds;
  const std::vector<Board> boards = x_to_move_positions();
  r.positions = static_cast<int>(boards.size());
  for (const Board& b : boards) {
    const CellSet wins = winning_cells(b, Mark::X);
    const CellSet threats = winning_cells(b, Mark::O);
    for (int s = 0; s < seeds; ++s) {
      PolicyRng rng(base_seed + static_cast<std::uint64_t>(s));
      const Cell c = choose_move(b, rng, Mark::X);
      ++r.decisions;
      bool ok = true;
      if (!wins.empty()) {
        ++r.win_available;
        ok = wins.contains(c);
        r.win_taken += ok;
      } else if (!threats.empty()) {
        ++r.threat_only;
        ok = threats.contains(c);
        r.threat_blocked += ok;
      }
      if (!ok && r.violations.size() < max_violations)
        r.violations.push_back(b.str() + " seed " + std::to_string(base_seed + s) + " chose " +
                               std::to_string(c.index()));
    }
  }
  return r;
}

}  // namespace swarmtoe::game
