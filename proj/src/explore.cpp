#include "qlock/explore.hpp"

#include <algorithm>

namespace qlock {

RoundRobinResult run_round_robin(const System& root, std::size_t max_steps) {
  RoundRobinResult result{{root, root.make_history(), {}, false}, 0, false};
  Run& run = result.run;
  const int n = root.num_procs();
  std::vector<int> started(static_cast<std::size_t>(n), -1);
  int round = 0;
  while (run.schedule.size() < max_steps) {
    bool moved = false;
    for (ProcessId p = 0; p < n && run.schedule.size() < max_steps; ++p) {
      if (!run.system.enabled(p)) continue;
      const StepInfo info = run.system.step(p, run.history);
      run.schedule.push_back(p);
      moved = true;
      auto& start = started[static_cast<std::size_t>(p)];
      if (info.effect.passage_started) start = round;
      if (info.effect.entered_cs && start >= 0) {
        result.max_wait_rounds = std::max(result.max_wait_rounds, round - start);
        start = -1;
      }
    }
    if (!moved) break;
    ++round;
  }
  result.stuck = !run.system.finished() && run.system.enabled_procs().empty();
  return result;
}

}  // namespace qlock
