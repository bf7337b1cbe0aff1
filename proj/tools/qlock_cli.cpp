// qlock: model checking, random testing, native stress and counterexample
// replay for the queue lock.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlock/checker.hpp"
#include "qlock/explore.hpp"
#include "qlock/native_lock.hpp"
#include "qlock/report.hpp"

namespace {

using namespace qlock;
using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string impl = "atomic";
  std::string model = "cc";
  int n = 2;
  int passages = 1;
  int stress_passages = 10000;
  std::uint64_t seed = 1;
  int counter_bits = 0;
  std::size_t oracle_cap = 12;
  std::string mutation = "none";
  int jobs = 1;
  int runs = 100;
  std::size_t max_steps = 4096;
  int threads = 8;
  double watchdog = 10.0;
  bool json = false;
  /// JSON destination; stdout when empty.
  std::string json_path;
  bool force = false;
  bool dump = false;
  bool cache = false;
  int rmr_bound = -1;
  std::string token;
};

RunConfig run_config(const Options& o, const std::string& command) {
  RunConfig c;
  c.command = command;
  auto impl = parse_impl(o.impl);
  if (!impl) throw UsageError("unknown implementation: " + o.impl);
  auto model = parse_model(o.model);
  if (!model) throw UsageError("unknown memory model: " + o.model);
  auto mutation = parse_mutation(o.mutation);
  if (!mutation) throw UsageError("unknown mutation: " + o.mutation);
  c.impl = *impl;
  c.model = *model;
  c.n = o.n;
  c.passages = o.passages;
  c.seed = o.seed;
  if (o.counter_bits > 0) c.counter_bits = o.counter_bits;
  c.oracle_cap = o.oracle_cap;
  c.mutation = *mutation;
  c.jobs = o.jobs;
  try {
    c.system().validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return c;
}

CheckOptions check_options(const Options& o) {
  CheckOptions opts;
  opts.oracle_cap = o.oracle_cap;
  if (o.rmr_bound >= 0) opts.rmr_bound = o.rmr_bound;
  return opts;
}

void print_text(const JsonReport& r, std::ostream& os) {
  const RunConfig& c = r.config;
  os << c.command << ": impl=" << to_string(c.impl) << " model=" << to_string(c.model) << " n=" << c.n
     << " passages=" << c.passages;
  if (c.counter_bits) os << " counter-bits=" << *c.counter_bits;
  if (c.mutation != Mutation::None) os << " mutation=" << to_string(c.mutation);
  os << "\n";
  const Metrics& m = r.totals;
  if (c.command != "stress") {
    os << "  histories " << m.histories << ", prefixes " << m.prefixes << "\n";
    os << "  max RMRs/passage " << m.max_rmr_per_passage << " (spin " << m.max_spin_rmr_per_passage << ")\n";
    os << "  max steps enqueue/isHead/dequeue " << m.max_steps_per_op[0] << "/" << m.max_steps_per_op[1] << "/"
       << m.max_steps_per_op[2] << ", exit " << m.max_exit_steps << "\n";
    os << "  oracle checked " << m.oracle_checked << ", over cap " << m.oracle_skipped << "\n";
  }
  for (const auto& [k, v] : r.extra) os << "  " << k << " " << v << "\n";
  for (const auto& [name, v] : r.verdicts) {
    if (v.status == Status::NotApplicable) continue;
    os << "  " << std::left << std::setw(26) << name << to_string(v.status);
    if (!v.detail.empty()) os << "  " << v.detail;
    os << "\n";
  }
  for (const auto& [name, t] : r.tokens) os << "  token " << name << " " << t << "\n";
}

int emit(const JsonReport& r, const Options& o) {
  if (o.json && o.json_path.empty()) {
    std::cout << json(r).dump(2) << "\n";
  } else {
    if (o.json) {
      std::ofstream out(o.json_path);
      if (!out) throw UsageError("cannot write " + o.json_path);
      out << json(r).dump(2) << "\n";
    }
    print_text(r, std::cout);
    std::cout << (r.pass() ? "PASS" : "FAIL") << "\n";
  }
  return r.pass() ? kExitPass : kExitFail;
}

int cmd_explore(const Options& o) {
  if (!o.force && (o.n > 4 || o.passages > 3)) {
    throw UsageError("explore is limited to --n <= 4 and --passages <= 3; pass --force to go further");
  }
  const RunConfig c = run_config(o, "explore");
  ExploreLimits limits;
  limits.max_steps = o.max_steps;
  limits.cache_states = o.cache;
  CheckOptions opts = check_options(o);
  // One counterexample is enough.
  opts.stop_on_failure = true;
  const PropertyReport report = check_exhaustive(c.system(), opts, limits);
  return emit(JsonReport::from(c, report), o);
}

int cmd_random(const Options& o) {
  if (o.runs < 1) throw UsageError("--runs must be positive");
  if (o.jobs < 1) throw UsageError("--jobs must be positive");
  const RunConfig c = run_config(o, "random");
  const SystemConfig sys = c.system();
  const CheckOptions opts = check_options(o);

  // Each run is independent; results are merged in seed order so the
  // report does not depend on --jobs.
  std::vector<PropertyReport> results(static_cast<std::size_t>(o.runs));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next.fetch_add(1); k < o.runs; k = next.fetch_add(1)) {
      results[static_cast<std::size_t>(k)] = check_random(sys, o.seed + static_cast<std::uint64_t>(k), o.max_steps, opts);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min(o.jobs, o.runs); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  PropertyReport merged;
  std::optional<std::uint64_t> failing_seed;
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (!failing_seed && !results[k].all_pass()) failing_seed = o.seed + k;
    merge_into(merged, results[k]);
  }
  JsonReport r = JsonReport::from(c, merged);
  r.rng = kRngName;
  r.extra["runs"] = o.runs;
  if (failing_seed) r.extra["failing_seed"] = static_cast<double>(*failing_seed);
  return emit(r, o);
}

int cmd_stress(const Options& o) {
  auto impl = parse_native_impl(o.impl);
  if (!impl) throw UsageError("stress needs --impl mqfi or mqfs");
  auto mutation = parse_mutation(o.mutation);
  if (!mutation || (*mutation != Mutation::None && *mutation != Mutation::SkipWaitReset)) {
    throw UsageError("stress supports only --mutation none or skip-wait-reset");
  }
  if (o.threads < 1 || o.threads > 64) throw UsageError("--threads must be in [1, 64]");
  if (o.stress_passages < 0) throw UsageError("--passages must be non-negative");

  StressConfig s;
  s.impl = *impl;
  s.threads = o.threads;
  s.passages = o.stress_passages;
  if (o.counter_bits > 0) s.counter = CounterMode::wrap(o.counter_bits);
  s.faults.skip_wait_reset = *mutation == Mutation::SkipWaitReset;
  s.watchdog_seconds = o.watchdog;
  StressReport sr;
  try {
    sr = stress(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  RunConfig c;
  c.command = "stress";
  c.impl = *impl == NativeImpl::Mqfi ? ImplKind::Mqfi : ImplKind::Mqfs;
  c.n = o.threads;
  c.passages = o.stress_passages;
  c.seed = 0;
  if (o.counter_bits > 0) c.counter_bits = o.counter_bits;
  c.mutation = *mutation;
  JsonReport r;
  r.config = c;
  auto verdict = [](bool ok, std::string detail) {
    return Verdict{ok ? Status::Pass : Status::Fail, ok ? std::string() : std::move(detail), std::nullopt};
  };
  r.verdicts["counter"] = verdict(sr.observed == sr.expected, "counter " + std::to_string(sr.observed) +
                                                                  ", expected " + std::to_string(sr.expected));
  r.verdicts[prop::kMutualExclusion] = verdict(sr.me_violations == 0, std::to_string(sr.me_violations) + " overlaps");
  r.verdicts[prop::kFcfs] = verdict(sr.fcfs_violations == 0, std::to_string(sr.fcfs_violations) + " inversions");
  r.verdicts["watchdog"] = verdict(!sr.hang, "no progress within the watchdog interval");
  r.extra["expected"] = static_cast<double>(sr.expected);
  r.extra["observed"] = static_cast<double>(sr.observed);
  r.extra["fcfs_violations"] = static_cast<double>(sr.fcfs_violations);
  r.extra["max_spin_iterations"] = static_cast<double>(sr.max_spin_iterations);
  r.extra["wall_seconds"] = sr.wall_seconds;
  return emit(r, o);
}

int cmd_replay(const Options& o) {
  if (o.token.empty()) throw UsageError("replay needs --token");
  ReplayToken t;
  try {
    t = decode_token(o.token);
  } catch (const TokenError& e) {
    throw UsageError(e.what());
  }
  History h = System(t.config).make_history();
  PropertyReport report;
  try {
    report = check_schedule(t.config, t.schedule, check_options(o), &h);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("token does not replay: ") + e.what());
  }
  if (o.dump) {
    h.dump(std::cout);
    if (!o.json || !o.json_path.empty()) std::cout << "\n";
  }
  RunConfig c;
  c.command = "replay";
  c.impl = t.config.impl;
  c.model = t.config.model;
  c.n = t.config.n;
  c.passages = t.config.passages;
  c.counter_bits = t.config.counter.wrap_bits;
  c.mutation = t.config.mutation;
  c.scripts = t.config.scripts;
  c.oracle_cap = o.oracle_cap;
  JsonReport r = JsonReport::from(c, report);
  r.extra["schedule_length"] = static_cast<double>(t.schedule.size());
  return emit(r, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model checker and stress harness for the queue lock"};
  app.require_subcommand(1);
  Options o;

  std::vector<CLI::Option*> json_opts;
  auto add_json = [&](CLI::App* sub) {
    json_opts.push_back(
        sub->add_option("--json", o.json_path, "Write a JSON report to the file, or to stdout without one")
            ->expected(0, 1));
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--impl", o.impl, "MutexQueue implementation: atomic, mqfi or mqfs")->capture_default_str();
    sub->add_option("--model", o.model, "RMR cost model: cc or dsm")->capture_default_str();
    sub->add_option("--n", o.n, "Number of processes")->capture_default_str();
    sub->add_option("--passages", o.passages, "Passages per process")->capture_default_str();
    sub->add_option("--counter-bits", o.counter_bits, "MQFI counter width; 0 for unbounded")->capture_default_str();
    sub->add_option("--oracle-cap", o.oracle_cap, "Largest history the brute-force oracle examines")
        ->capture_default_str();
    sub->add_option("--mutation", o.mutation,
                    "Seeded fault: none, skip-stat-reset, flip-is-head, skip-queue-write, skip-wait-reset")
        ->capture_default_str();
    sub->add_option("--rmr-bound", o.rmr_bound, "Fail when a passage exceeds this many RMRs");
    sub->add_option("--max-steps", o.max_steps, "Longest schedule")->capture_default_str();
    add_json(sub);
  };

  CLI::App* explore_cmd = app.add_subcommand("explore", "Check every interleaving");
  common(explore_cmd);
  explore_cmd->add_flag("--force", o.force, "Allow configurations beyond n=4, passages=3");
  explore_cmd->add_flag("--cache", o.cache, "Skip revisited states (checks states, not every history)");

  CLI::App* random_cmd = app.add_subcommand("random", "Check seeded random interleavings");
  common(random_cmd);
  random_cmd->add_option("--seed", o.seed, "First seed")->capture_default_str();
  random_cmd->add_option("--runs", o.runs, "Number of runs, seeds seed..seed+runs-1")->capture_default_str();
  random_cmd->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str();

  CLI::App* stress_cmd = app.add_subcommand("stress", "Run the lock on native threads");
  stress_cmd->add_option("--impl", o.impl, "mqfi or mqfs")->required();
  stress_cmd->add_option("--threads", o.threads, "Threads")->capture_default_str();
  stress_cmd->add_option("--passages", o.stress_passages, "Passages per thread")->capture_default_str();
  stress_cmd->add_option("--counter-bits", o.counter_bits, "MQFI counter width; 0 for 64 bits")->capture_default_str();
  stress_cmd->add_option("--mutation", o.mutation, "none or skip-wait-reset")->capture_default_str();
  stress_cmd->add_option("--watchdog", o.watchdog, "Seconds without progress before aborting")->capture_default_str();
  add_json(stress_cmd);

  CLI::App* replay_cmd = app.add_subcommand("replay", "Re-run a counterexample token");
  replay_cmd->add_option("--token", o.token, "Token printed by explore or random")->required();
  replay_cmd->add_option("--oracle-cap", o.oracle_cap, "Largest history the brute-force oracle examines")
      ->capture_default_str();
  replay_cmd->add_flag("--dump", o.dump, "Print the replayed history");
  add_json(replay_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }
  for (CLI::Option* opt : json_opts) o.json = o.json || opt->count() > 0;

  try {
    if (explore_cmd->parsed()) return cmd_explore(o);
    if (random_cmd->parsed()) return cmd_random(o);
    if (stress_cmd->parsed()) return cmd_stress(o);
    return cmd_replay(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
