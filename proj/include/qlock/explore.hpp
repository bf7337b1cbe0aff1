#pragma once

// Schedulers over a System: exhaustive depth-first enumeration of
// interleavings, seeded random runs, replay of a fixed schedule and a
// round-robin run.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <boost/functional/hash.hpp>

#include "qlock/system.hpp"

namespace qlock {

using Schedule = std::vector<ProcessId>;

enum class Visit { Continue, Stop };

struct ExploreLimits {
  /// Longest schedule explored; a longer one is reported as overflow.
  std::size_t max_steps = 4096;
  /// Skip subtrees rooted at an already visited state. Prefix callbacks
  /// still see every reachable state, but not every history.
  bool cache_states = false;
};

struct ExploreStats {
  std::uint64_t histories = 0;
  std::uint64_t prefixes = 0;
  std::uint64_t cache_hits = 0;
  bool stopped = false;
  /// First schedule that hit max_steps.
  std::optional<Schedule> overflow;
};

/// 128-bit digest of a state encoding.
struct StateDigest {
  std::uint64_t a = 0;
  std::uint64_t b = 0;

  bool operator==(const StateDigest&) const = default;
};

inline StateDigest digest(const std::vector<std::int64_t>& words) {
  std::uint64_t fnv = 14695981039346656037ull;
  for (std::int64_t w : words) {
    auto u = static_cast<std::uint64_t>(w);
    for (int k = 0; k < 8; ++k) {
      fnv ^= (u >> (8 * k)) & 0xff;
      fnv *= 1099511628211ull;
    }
  }
  return {fnv, static_cast<std::uint64_t>(boost::hash_range(words.begin(), words.end()))};
}

struct StateDigestHash {
  std::size_t operator()(const StateDigest& d) const { return static_cast<std::size_t>(d.a ^ (d.b * 0x9e3779b97f4a7c15ull)); }
};

namespace detail {

template <class OnPrefix, class OnMaximal>
class Explorer {
 public:
  Explorer(const ExploreLimits& limits, OnPrefix& on_prefix, OnMaximal& on_maximal)
      : limits_(limits), on_prefix_(on_prefix), on_maximal_(on_maximal) {}

  ExploreStats run(const System& root) {
    History history = root.make_history();
    Schedule schedule;
    ++stats_.prefixes;
    if (on_prefix_(root, history, schedule, StepInfo{}) == Visit::Stop) {
      stats_.stopped = true;
      return stats_;
    }
    if (limits_.cache_states) seen_.insert(digest(root.encode()));
    visit(root, history, schedule);
    return stats_;
  }

 private:
  // Returns false when the search must stop.
  bool visit(const System& sys, History& history, Schedule& schedule) {
    bool any = false;
    for (ProcessId p = 0; p < sys.num_procs(); ++p) {
      if (!sys.enabled(p)) continue;
      any = true;
      if (schedule.size() >= limits_.max_steps) {
        if (!stats_.overflow) stats_.overflow = schedule;
        return true;
      }
      System next = sys;
      const std::size_t mark = history.size();
      const StepInfo info = next.step(p, history);
      schedule.push_back(p);
      bool keep_going = true;
      bool fresh = true;
      if (limits_.cache_states) {
        fresh = seen_.insert(digest(next.encode())).second;
        if (!fresh) ++stats_.cache_hits;
      }
      if (fresh) {
        ++stats_.prefixes;
        if (on_prefix_(next, history, schedule, info) == Visit::Stop) {
          stats_.stopped = true;
          keep_going = false;
        } else {
          keep_going = visit(next, history, schedule);
        }
      }
      schedule.pop_back();
      history.truncate(mark);
      if (!keep_going) return false;
    }
    if (!any) {
      ++stats_.histories;
      if (on_maximal_(sys, history, schedule) == Visit::Stop) {
        stats_.stopped = true;
        return false;
      }
    }
    return true;
  }

  const ExploreLimits& limits_;
  OnPrefix& on_prefix_;
  OnMaximal& on_maximal_;
  ExploreStats stats_;
  std::unordered_set<StateDigest, StateDigestHash> seen_;
};

}  // namespace detail

/// Depth-first enumeration of every interleaving of enabled steps.
///
/// on_prefix(const System&, const History&, const Schedule&, const StepInfo&)
/// runs on the empty prefix and after every step; on_maximal(const System&,
/// const History&, const Schedule&) runs once per maximal history, i.e. when
/// no process is enabled. Either may return Visit::Stop to end the search.
template <class OnPrefix, class OnMaximal>
ExploreStats explore(const System& root, const ExploreLimits& limits, OnPrefix&& on_prefix, OnMaximal&& on_maximal) {
  detail::Explorer<std::remove_reference_t<OnPrefix>, std::remove_reference_t<OnMaximal>> explorer(limits, on_prefix,
                                                                                                  on_maximal);
  return explorer.run(root);
}

/// Name of the generator behind run_random, recorded in reports.
inline constexpr const char* kRngName = "mt19937_64";

struct Run {
  System system;
  History history;
  Schedule schedule;
  /// Stopped by the callback before the run ended.
  bool stopped = false;
};

/// Runs a schedule step by step; throws std::invalid_argument if it names a
/// process that is not enabled. on_step(const System&, const History&,
/// const Schedule&, const StepInfo&) may return Visit::Stop.
template <class OnStep>
Run replay(const System& root, const Schedule& schedule, OnStep&& on_step) {
  Run run{root, root.make_history(), {}, false};
  if (on_step(run.system, run.history, run.schedule, StepInfo{}) == Visit::Stop) {
    run.stopped = true;
    return run;
  }
  for (ProcessId p : schedule) {
    if (p < 0 || p >= root.num_procs() || !run.system.enabled(p)) {
      throw std::invalid_argument("schedule step " + std::to_string(run.schedule.size()) + ": process " +
                                  std::to_string(p) + " is not enabled");
    }
    const StepInfo info = run.system.step(p, run.history);
    run.schedule.push_back(p);
    if (on_step(run.system, run.history, run.schedule, info) == Visit::Stop) {
      run.stopped = true;
      break;
    }
  }
  return run;
}

inline Run replay(const System& root, const Schedule& schedule) {
  return replay(root, schedule, [](const auto&...) { return Visit::Continue; });
}

/// Picks uniformly among enabled processes at each step (generator output
/// reduced modulo the number of choices) until none is enabled or
/// max_steps steps were taken.
template <class OnStep>
Run run_random(const System& root, std::uint64_t seed, std::size_t max_steps, OnStep&& on_step) {
  std::mt19937_64 rng(seed);
  Run run{root, root.make_history(), {}, false};
  if (on_step(run.system, run.history, run.schedule, StepInfo{}) == Visit::Stop) {
    run.stopped = true;
    return run;
  }
  while (run.schedule.size() < max_steps) {
    const std::vector<ProcessId> choices = run.system.enabled_procs();
    if (choices.empty()) break;
    const ProcessId p = choices[static_cast<std::size_t>(rng() % choices.size())];
    const StepInfo info = run.system.step(p, run.history);
    run.schedule.push_back(p);
    if (on_step(run.system, run.history, run.schedule, info) == Visit::Stop) {
      run.stopped = true;
      break;
    }
  }
  return run;
}

inline Run run_random(const System& root, std::uint64_t seed, std::size_t max_steps) {
  return run_random(root, seed, max_steps, [](const auto&...) { return Visit::Continue; });
}

struct RoundRobinResult {
  Run run;
  /// Most scheduler rounds any process spent between starting a passage and
  /// entering the CS.
  int max_wait_rounds = 0;
  /// Some process was left unable to move before halting.
  bool stuck = false;
};

/// Lets processes 0..N-1 take one step each in turn, skipping disabled
/// ones; one pass is a round.
RoundRobinResult run_round_robin(const System& root, std::size_t max_steps);

}  // namespace qlock
