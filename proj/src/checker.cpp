#include "qlock/checker.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>
#include <variant>

#include "qlock/detail/overloaded.hpp"

namespace qlock {

namespace {

std::string pname(ProcessId p) { return "process " + std::to_string(p); }

std::string opt_pid(const std::optional<ProcessId>& p) { return p ? std::to_string(*p) : "none"; }

}  // namespace

SeqHistory build_candidate(const History& h) {
  SeqHistory out;
  std::vector<int> lin_points;
  auto slot = [&](ProcessId p) -> int& {
    if (static_cast<std::size_t>(p) >= lin_points.size()) lin_points.resize(static_cast<std::size_t>(p) + 1, 0);
    return lin_points[static_cast<std::size_t>(p)];
  };
  for (const Step& s : h.steps()) {
    std::visit(detail::overloaded{
                   [&](const InvStep&) { slot(s.proc) = 0; },
                   [&](const ResStep&) {},
                   [&](const ObjectStep& o) { out.push_back({s.proc, o.op, o.ret}); },
                   [&](const BaseStep& b) {
                     if (!b.lin_point) return;
                     if (++slot(s.proc) > 1) {
                       throw ClassificationError(pname(s.proc) + ": two linearization points in one operation");
                     }
                     out.push_back({s.proc, b.lin_point->op, b.lin_point->response});
                   },
               },
               s.event);
  }
  return out;
}

bool conforms(const SeqHistory& seq) {
  MutexQueueState state;
  for (const SeqOp& op : seq) {
    const MqTransition t = apply(state, op.proc, op.op);
    if (!t.response.matches(op.response)) return false;
    state = t.state;
  }
  return true;
}

std::vector<OpExec> operations(const History& h) {
  std::vector<OpExec> ops;
  std::vector<int> open;
  auto slot = [&](ProcessId p) -> int& {
    if (static_cast<std::size_t>(p) >= open.size()) open.resize(static_cast<std::size_t>(p) + 1, -1);
    return open[static_cast<std::size_t>(p)];
  };
  for (std::size_t k = 0; k < h.size(); ++k) {
    const Step& s = h[k];
    std::visit(detail::overloaded{
                   [&](const InvStep& inv) {
                     slot(s.proc) = static_cast<int>(ops.size());
                     ops.push_back({s.proc, inv.op, std::nullopt, k, 0});
                   },
                   [&](const ResStep& res) {
                     int& i = slot(s.proc);
                     if (i < 0) return;
                     ops[static_cast<std::size_t>(i)].response = res.ret;
                     ops[static_cast<std::size_t>(i)].responded_at = k;
                     i = -1;
                   },
                   [&](const ObjectStep& o) { ops.push_back({s.proc, o.op, o.ret, k, k}); },
                   [&](const BaseStep&) {},
               },
               s.event);
  }
  return ops;
}

Linearization linearize(const History& h, int nprocs) {
  const std::vector<OpExec> ops = operations(h);
  Linearization result;
  LinearizationTracker tracker(nprocs);
  std::vector<int> current(static_cast<std::size_t>(nprocs), -1);
  std::vector<bool> placed(ops.size(), false);
  std::size_t next_op = 0;

  for (std::size_t k = 0; k < h.size(); ++k) {
    const Step& s = h[k];
    const auto p = static_cast<std::size_t>(s.proc);
    std::visit(detail::overloaded{
                   [&](const InvStep& inv) {
                     current[p] = static_cast<int>(next_op++);
                     tracker.invoke(s.proc, inv.op);
                   },
                   [&](const ResStep& res) {
                     tracker.respond(s.proc, res.ret);
                     current[p] = -1;
                   },
                   [&](const ObjectStep& o) {
                     const std::size_t i = next_op++;
                     current[p] = static_cast<int>(i);
                     tracker.invoke(s.proc, o.op);
                     if (!tracker.bad_op_seen()) {
                       result.seq.push_back({s.proc, o.op, o.ret});
                       placed[i] = true;
                     }
                     tracker.lin_point(s.proc, {o.op, o.ret});
                     tracker.respond(s.proc, o.ret);
                     current[p] = -1;
                   },
                   [&](const BaseStep& b) {
                     if (!b.lin_point) return;
                     const bool was_bad = tracker.bad_op_seen();
                     tracker.lin_point(s.proc, *b.lin_point);
                     if (!was_bad && current[p] >= 0) {
                       result.seq.push_back({s.proc, b.lin_point->op, b.lin_point->response});
                       placed[static_cast<std::size_t>(current[p])] = true;
                     }
                   },
               },
               s.event);
    if (tracker.bad_op_seen() && !result.bad_op) {
      // Locate the bad operation: the pending execution of the offending
      // process, or the atomic step just taken.
      const ProcessId bad = tracker.bad_process();
      std::size_t bad_index = ops.size();
      for (std::size_t i = ops.size(); i-- > 0;) {
        if (ops[i].proc == bad && ops[i].invoked_at <= k && !placed[i]) {
          bad_index = i;
          break;
        }
      }
      if (bad_index == ops.size()) throw std::logic_error("bad operation not found");
      result.bad_op = result.seq.size();
      result.seq.push_back({bad, ops[bad_index].op, MqResponse::arbitrary()});
      placed[bad_index] = true;
    }
  }

  if (result.bad_op) {
    for (std::size_t i = 0; i < ops.size(); ++i) {
      if (!placed[i]) result.seq.push_back({ops[i].proc, ops[i].op, MqResponse::arbitrary()});
    }
    result.conforms = conforms(result.seq);
  } else {
    result.conforms = tracker.ok() && conforms(result.seq);
  }
  return result;
}

const char* to_string(OracleResult r) {
  switch (r) {
    case OracleResult::Linearizable:
      return "linearizable";
    case OracleResult::NotLinearizable:
      return "not-linearizable";
    case OracleResult::Skipped:
      return "skipped";
  }
  return "?";
}

namespace {

class Oracle {
 public:
  explicit Oracle(const std::vector<OpExec>& ops) : ops_(ops), before_(ops.size(), 0) {
    for (std::size_t a = 0; a < ops.size(); ++a) {
      if (ops[a].response) complete_ |= bit(a);
      for (std::size_t b = 0; b < ops.size(); ++b) {
        if (ops[b].response && ops[b].responded_at < ops[a].invoked_at) before_[a] |= bit(b);
      }
    }
  }

  bool search(const MutexQueueState& state, std::uint32_t done) {
    if ((done & complete_) == complete_) return true;
    if (!failed_.insert({done, state.str()}).second) return false;
    for (std::size_t a = 0; a < ops_.size(); ++a) {
      if (done & bit(a)) continue;
      if ((before_[a] & ~done) != 0) continue;
      const MqTransition t = apply(state, ops_[a].proc, ops_[a].op);
      if (ops_[a].response && !t.response.matches(*ops_[a].response)) continue;
      if (search(t.state, done | bit(a))) return true;
    }
    return false;
  }

 private:
  static std::uint32_t bit(std::size_t i) { return std::uint32_t{1} << i; }

  const std::vector<OpExec>& ops_;
  std::vector<std::uint32_t> before_;
  std::uint32_t complete_ = 0;
  std::set<std::pair<std::uint32_t, std::string>> failed_;
};

}  // namespace

OracleResult brute_force_linearizable(const std::vector<OpExec>& ops, std::size_t cap) {
  if (ops.size() > cap || ops.size() > 31) return OracleResult::Skipped;
  Oracle oracle(ops);
  return oracle.search(MutexQueueState{}, 0) ? OracleResult::Linearizable : OracleResult::NotLinearizable;
}

OracleResult brute_force_linearizable(const History& h, std::size_t cap) {
  return brute_force_linearizable(operations(h), cap);
}

std::optional<std::string> check_invariant1(const System& sys) {
  const MutexQueueState& m = sys.queue_state();
  if (m.broken()) return "M is broken";
  const std::optional<ProcessId> hd = head(m);
  const ProcSet queued = qprocs(m);
  const ProcSet visible = visprocs(m);
  for (ProcessId p = 0; p < sys.num_procs(); ++p) {
    const GqmeProc& proc = sys.gqme_procs()[static_cast<std::size_t>(p)];
    const PhaseInfo ph = phase_of(proc);
    const bool wait = sys.memory().peek(sys.gqme_shared().wait[static_cast<std::size_t>(p)]).first != 0;
    const std::string who = pname(p) + " in " + to_string(ph.phase) + ": ";
    if (hd == p) {
      switch (ph.phase) {
        case Phase::NearNcs:
          return who + "head of the queue while near the NCS";
        case Phase::Doorway:
        case Phase::DoneWait:
        case Phase::NoWait:
          if (!wait) return who + "head with Wait[p] = false";
          break;
        case Phase::Wait: {
          const int lp = sys.track(p).last_pred;
          const bool expected = lp >= 0 && phase_of(sys.gqme_procs()[static_cast<std::size_t>(lp)]).exit;
          if (wait != expected) {
            return who + "head with Wait[p] = " + (wait ? "true" : "false") + ", last predecessor " +
                   (lp >= 0 ? std::to_string(lp) : std::string("none"));
          }
          break;
        }
      }
    } else if (contains(queued, p)) {
      const bool vis = contains(visible, p);
      if ((ph.phase == Phase::Doorway) != !vis) return who + "queued behind the head, doorway phase disagrees with V";
      if ((ph.phase == Phase::Wait) != vis) return who + "queued behind the head, wait phase disagrees with V";
      if (!wait) return who + "queued behind the head with Wait[p] = false";
    } else {
      if (ph.phase != Phase::NearNcs) return who + "not queued but not near the NCS";
      if (!wait) return who + "not queued with Wait[p] = false";
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_mqfi_indices(const System& sys) {
  const MutexQueueState& m = sys.queue_state();
  std::vector<int> owner(static_cast<std::size_t>(sys.num_procs()), -1);
  for (ProcessId p : m.queue()) {
    const int i = sys.mqfi_procs()[static_cast<std::size_t>(p)].index;
    int& o = owner[static_cast<std::size_t>(i)];
    if (o >= 0) return "processes " + std::to_string(o) + " and " + std::to_string(p) + " share index " + std::to_string(i);
    o = p;
  }
  return std::nullopt;
}

int expected_stat(const System& sys, int i) {
  const MutexQueueState& m = sys.queue_state();
  const MqfiShared& shared = *sys.mqfi_shared();
  const std::optional<ProcessId> hd = head(m);
  const ProcSet visible = visprocs(m);
  for (ProcessId p : m.queue()) {
    const MqfiProc& proc = sys.mqfi_procs()[static_cast<std::size_t>(p)];
    if (proc.index != i) continue;
    const bool vis = contains(visible, p);
    if (hd == p) {
      if (!vis) return 1;
      if (!proc.stat_reset_written) return 2;
    } else if (vis) {
      const std::optional<ProcessId> pr = pred(m, p);
      if (pr && sys.mqfi_procs()[static_cast<std::size_t>(*pr)].between_fai_and_proc_read()) return 2;
      return 1;
    }
  }
  if (m.queue().empty() && i == ctr_index(sys.memory().peek(shared.ctr).first, shared.mode, shared.n)) return 1;
  return 0;
}

std::optional<std::string> check_mqfi_stat(const System& sys) {
  const MqfiShared& shared = *sys.mqfi_shared();
  for (int i = 0; i < shared.n; ++i) {
    const std::int64_t actual = sys.memory().peek(shared.stat[static_cast<std::size_t>(i)]).first;
    const int expected = expected_stat(sys, i);
    if (actual != expected) {
      return "Stat[" + std::to_string(i) + "] = " + std::to_string(actual) + ", expected " + std::to_string(expected) +
             " with M = " + sys.queue_state().str();
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_mqfs_ownership(const System& sys) {
  const MutexQueueState& m = sys.queue_state();
  const auto& procs = sys.mqfs_procs();
  const int n = sys.num_procs();
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      if (procs[static_cast<std::size_t>(x)].my_idx == procs[static_cast<std::size_t>(y)].my_idx) {
        return "processes " + std::to_string(x) + " and " + std::to_string(y) + " share myIdx " +
               std::to_string(procs[static_cast<std::size_t>(x)].my_idx);
      }
    }
  }
  for (ProcessId x : m.queue()) {
    for (ProcessId y : m.queue()) {
      if (x < y && procs[static_cast<std::size_t>(x)].prev_idx == procs[static_cast<std::size_t>(y)].prev_idx) {
        return "queued processes " + std::to_string(x) + " and " + std::to_string(y) + " share prevIdx";
      }
    }
  }
  for (ProcessId x = 0; x < n; ++x) {
    for (ProcessId y : m.queue()) {
      if (procs[static_cast<std::size_t>(x)].my_idx == procs[static_cast<std::size_t>(y)].prev_idx && succ(m, x) != y) {
        return "myIdx of " + std::to_string(x) + " equals prevIdx of " + std::to_string(y) +
               " but its successor is " + opt_pid(succ(m, x));
      }
    }
  }
  for (ProcessId x : m.queue()) {
    if (procs[static_cast<std::size_t>(x)].my_idx == procs[static_cast<std::size_t>(x)].prev_idx) {
      return pname(x) + " is queued with myIdx = prevIdx";
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_mqfs_queue(const System& sys) {
  const MutexQueueState& m = sys.queue_state();
  const MqfsShared& shared = *sys.mqfs_shared();
  const auto& procs = sys.mqfs_procs();
  for (int i = 0; i <= shared.n; ++i) {
    const Word actual = sys.memory().peek(shared.queue[static_cast<std::size_t>(i)]);
    std::optional<ProcessId> owner;
    try {
      owner = owner_of(i, procs);
    } catch (const DuplicateOwner& e) {
      return e.what();
    }
    const std::string where = "Queue[" + std::to_string(i) + "] = (" + std::to_string(actual.first) + "," +
                              std::to_string(actual.second) + ")";
    if (owner && procs[static_cast<std::size_t>(*owner)].entry_published) {
      const ProcessId p = *owner;
      const std::optional<ProcessId> s = succ(m, p);
      Word expected{i, p};
      if (s && contains(visprocs(m), *s)) expected = {procs[static_cast<std::size_t>(*s)].my_idx, *s};
      if (!(actual == expected)) {
        return where + ", expected (" + std::to_string(expected.first) + "," + std::to_string(expected.second) + ")";
      }
    } else if (actual.first == i) {
      return where + " names its own slot";
    }
  }
  return std::nullopt;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Fail:
      return "fail";
    case Status::NotApplicable:
      return "n/a";
    case Status::Skipped:
      return "skipped";
  }
  return "?";
}

std::optional<Status> parse_status(const std::string& text) {
  for (Status s : {Status::Pass, Status::Fail, Status::NotApplicable, Status::Skipped}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

bool PropertyReport::all_pass() const { return !first_failure(); }

std::optional<std::string> PropertyReport::first_failure() const {
  for (const auto& [name, v] : verdicts) {
    if (v.status == Status::Fail) return name;
  }
  return std::nullopt;
}

int step_bound(ImplKind impl, MqOp op) {
  switch (impl) {
    case ImplKind::Atomic:
      return 1;
    case ImplKind::Mqfi:
      return op == MqOp::Enqueue ? 1 : op == MqOp::IsHead ? 2 : 3;
    case ImplKind::Mqfs:
      return op == MqOp::Enqueue ? 2 : 1;
  }
  return 0;
}

PropertyChecker::PropertyChecker(const SystemConfig& config, CheckOptions options)
    : config_(config), options_(options) {
  applicable(prop::kWellFormed);
  applicable(prop::kLinearizable);
  applicable(prop::kStepBounds);
  if (options_.brute_force) applicable(prop::kOracleAgreement);
  if (!config.script_mode()) {
    for (const char* name : {prop::kMutualExclusion, prop::kMutualExclusionLiteral, prop::kCsPredicatesAgree,
                             prop::kFcfs, prop::kBoundedExit, prop::kSpinRmr, prop::kProgress}) {
      applicable(name);
    }
    if (options_.rmr_bound) applicable(prop::kRmrBound);
    if (config.impl == ImplKind::Atomic) applicable(prop::kInvariant1);
  }
  if (config.impl == ImplKind::Mqfi) {
    applicable(prop::kStatValues);
    applicable(prop::kDistinctIndices);
  }
  if (config.impl == ImplKind::Mqfs) {
    applicable(prop::kQueueValues);
    applicable(prop::kOwnership);
    applicable(prop::kTraceProperties);
  }
}

void PropertyChecker::applicable(const char* name) { report_.verdicts[name].status = Status::Pass; }

void PropertyChecker::fail(const char* name, const std::string& detail, const Schedule& schedule) {
  Verdict& v = report_.verdicts[name];
  if (v.status == Status::Fail) return;
  v.status = Status::Fail;
  v.detail = detail;
  v.counterexample = schedule;
  new_failure_ = true;
}

bool PropertyChecker::failed_since_last_check() {
  const bool f = new_failure_;
  new_failure_ = false;
  return f;
}

Visit PropertyChecker::on_prefix(const System& sys, const History&, const Schedule& schedule, const StepInfo& info) {
  Metrics& m = report_.metrics;
  const int n = sys.num_procs();
  const bool lock = !config_.script_mode();

  ProcSet by_pc = 0;
  ProcSet literal = 0;
  for (ProcessId p = 0; p < n; ++p) {
    const ProcTrack& t = sys.track(p);
    m.max_rmr_per_passage = std::max(m.max_rmr_per_passage, t.rmr);
    m.max_spin_rmr_per_passage = std::max(m.max_spin_rmr_per_passage, t.spin_rmr);
    m.max_exit_steps = std::max(m.max_exit_steps, t.exit_steps);
    int& steps = m.max_steps_per_op[static_cast<std::size_t>(t.op)];
    steps = std::max(steps, t.op_steps);
    if (t.op_steps > step_bound(config_.impl, t.op)) {
      fail(prop::kStepBounds,
           pname(p) + ": " + to_string(t.op) + " took " + std::to_string(t.op_steps) + " steps", schedule);
    }
    if (!lock) continue;
    if (in_cs_by_pc(sys.gqme_procs()[static_cast<std::size_t>(p)])) by_pc |= proc_bit(p);
    if (t.last_step_enters_cs) literal |= proc_bit(p);
    if (t.exit_steps > 2) {
      fail(prop::kBoundedExit, pname(p) + ": " + std::to_string(t.exit_steps) + " steps after dequeue", schedule);
    }
    const int spin_limit = config_.model == MemoryModel::Cc ? 2 : 0;
    if (t.spin_rmr > spin_limit) {
      fail(prop::kSpinRmr, pname(p) + ": " + std::to_string(t.spin_rmr) + " RMRs spinning in one passage", schedule);
    }
    if (options_.rmr_bound && t.rmr > *options_.rmr_bound) {
      fail(prop::kRmrBound, pname(p) + ": " + std::to_string(t.rmr) + " RMRs in one passage", schedule);
    }
  }
  if (lock) {
    if (std::popcount(by_pc) > 1) fail(prop::kMutualExclusion, "two processes in the CS", schedule);
    if (std::popcount(literal) > 1) fail(prop::kMutualExclusionLiteral, "two processes in the CS", schedule);
    if (by_pc != literal) {
      fail(prop::kCsPredicatesAgree, "CS by last step and CS by control position disagree", schedule);
    }
    if (info.fcfs_violation) {
      fail(prop::kFcfs, pname(schedule.back()) + " entered the CS ahead of an earlier doorway", schedule);
    }
    if (config_.impl == ImplKind::Atomic) {
      if (auto e = check_invariant1(sys)) fail(prop::kInvariant1, *e, schedule);
    }
  }

  const LinearizationTracker& tracker = sys.tracker();
  if (!tracker.ok()) fail(prop::kLinearizable, tracker.describe_failure(), schedule);
  if (config_.impl == ImplKind::Mqfs && sys.trace_violation()) {
    fail(prop::kTraceProperties, *sys.trace_violation(), schedule);
  }
  if (!tracker.bad_op_seen()) {
    if (config_.impl == ImplKind::Mqfi) {
      if (auto e = check_mqfi_indices(sys)) fail(prop::kDistinctIndices, *e, schedule);
      if (auto e = check_mqfi_stat(sys)) fail(prop::kStatValues, *e, schedule);
    }
    if (config_.impl == ImplKind::Mqfs) {
      if (auto e = check_mqfs_ownership(sys)) fail(prop::kOwnership, *e, schedule);
      if (auto e = check_mqfs_queue(sys)) fail(prop::kQueueValues, *e, schedule);
    }
  }
  return options_.stop_on_failure && failed_since_last_check() ? Visit::Stop : Visit::Continue;
}

namespace {

/// H|M as text, the key under which oracle results are shared.
std::string object_projection(const History& h) {
  std::ostringstream os;
  for (const Step& s : h.steps()) {
    std::visit(detail::overloaded{
                   [&](const InvStep& inv) { os << 'I' << s.proc << to_string(inv.op) << ';'; },
                   [&](const ResStep& res) { os << 'R' << s.proc << res.ret.str() << ';'; },
                   [&](const ObjectStep& o) { os << 'A' << s.proc << to_string(o.op) << o.ret.str() << ';'; },
                   [&](const BaseStep&) {},
               },
               s.event);
  }
  return os.str();
}

}  // namespace

Visit PropertyChecker::on_maximal(const System& sys, const History& h, const Schedule& schedule) {
  if (auto e = check_well_formed(h, sys.num_procs())) fail(prop::kWellFormed, *e, schedule);
  if (!config_.script_mode() && !sys.finished()) {
    fail(prop::kProgress, "no process can take a step but some have not finished", schedule);
  }

  Linearization lin;
  try {
    lin = linearize(h, sys.num_procs());
  } catch (const ClassificationError& e) {
    fail(prop::kLinearizable, e.what(), schedule);
    return options_.stop_on_failure ? Visit::Stop : Visit::Continue;
  }
  if (!lin.conforms) fail(prop::kLinearizable, "candidate linearization does not conform", schedule);

  if (options_.brute_force && oracle_seen_.insert(object_projection(h)).second) {
    const OracleResult r = brute_force_linearizable(h, options_.oracle_cap);
    if (r == OracleResult::Skipped) {
      ++report_.metrics.oracle_skipped;
    } else {
      ++report_.metrics.oracle_checked;
      if (lin.conforms && r == OracleResult::NotLinearizable) {
        fail(prop::kOracleAgreement, "candidate conforms but the oracle finds no linearization", schedule);
      }
      if (!lin.conforms && r == OracleResult::Linearizable) ++report_.metrics.oracle_only;
    }
  }
  return options_.stop_on_failure && failed_since_last_check() ? Visit::Stop : Visit::Continue;
}

void PropertyChecker::finish(const ExploreStats& stats) {
  report_.metrics.histories = stats.histories;
  report_.metrics.prefixes = stats.prefixes;
  auto it = report_.verdicts.find(prop::kOracleAgreement);
  if (it != report_.verdicts.end() && it->second.status == Status::Pass && report_.metrics.oracle_checked == 0 &&
      report_.metrics.oracle_skipped > 0) {
    it->second.status = Status::Skipped;
    it->second.detail = "every history exceeded the oracle cap";
  }
}

PropertyReport check_exhaustive(const SystemConfig& config, const CheckOptions& options, const ExploreLimits& limits) {
  const System root(config);
  PropertyChecker checker(config, options);
  const ExploreStats stats = explore(root, limits, checker.prefix_callback(), checker.maximal_callback());
  checker.finish(stats);
  PropertyReport report = checker.report();
  if (stats.overflow) {
    Verdict& v = report.verdicts[prop::kProgress];
    v.status = Status::Fail;
    v.detail = "schedule exceeded " + std::to_string(limits.max_steps) + " steps";
    v.counterexample = stats.overflow;
  }
  return report;
}

namespace {

template <class Driver>
PropertyReport check_run(const SystemConfig& config, const CheckOptions& options, Driver&& drive, History* out) {
  const System root(config);
  PropertyChecker checker(config, options);
  Run run = drive(root, checker.prefix_callback());
  ExploreStats stats;
  stats.prefixes = run.schedule.size() + 1;
  if (!run.stopped && run.system.enabled_procs().empty()) {
    stats.histories = 1;
    checker.on_maximal(run.system, run.history, run.schedule);
  }
  checker.finish(stats);
  if (out) *out = run.history;
  return checker.report();
}

}  // namespace

PropertyReport check_random(const SystemConfig& config, std::uint64_t seed, std::size_t max_steps,
                            const CheckOptions& options) {
  return check_run(
      config, options,
      [&](const System& root, auto&& on_step) { return run_random(root, seed, max_steps, on_step); }, nullptr);
}

PropertyReport check_schedule(const SystemConfig& config, const Schedule& schedule, const CheckOptions& options,
                              History* history) {
  return check_run(
      config, options, [&](const System& root, auto&& on_step) { return replay(root, schedule, on_step); }, history);
}

void merge_into(PropertyReport& into, const PropertyReport& from) {
  for (const auto& [name, v] : from.verdicts) {
    auto it = into.verdicts.find(name);
    if (it == into.verdicts.end()) {
      into.verdicts[name] = v;
      continue;
    }
    Verdict& mine = it->second;
    if (mine.status == Status::Fail) continue;
    if (v.status == Status::Fail || mine.status == Status::NotApplicable ||
        (mine.status == Status::Skipped && v.status == Status::Pass)) {
      mine = v;
    }
  }
  Metrics& a = into.metrics;
  const Metrics& b = from.metrics;
  a.histories += b.histories;
  a.prefixes += b.prefixes;
  a.max_rmr_per_passage = std::max(a.max_rmr_per_passage, b.max_rmr_per_passage);
  a.max_spin_rmr_per_passage = std::max(a.max_spin_rmr_per_passage, b.max_spin_rmr_per_passage);
  for (std::size_t k = 0; k < a.max_steps_per_op.size(); ++k) {
    a.max_steps_per_op[k] = std::max(a.max_steps_per_op[k], b.max_steps_per_op[k]);
  }
  a.max_exit_steps = std::max(a.max_exit_steps, b.max_exit_steps);
  a.oracle_checked += b.oracle_checked;
  a.oracle_skipped += b.oracle_skipped;
  a.oracle_only += b.oracle_only;
}

}  // namespace qlock
