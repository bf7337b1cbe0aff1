#pragma once

// Correctness checks over histories and system states: candidate
// linearizations from linearization points, an independent brute-force
// linearizability oracle, the invariants of the lock and of both MutexQueue
// implementations, and a per-prefix aggregator used by the explorers.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "qlock/explore.hpp"
#include "qlock/history.hpp"
#include "qlock/mutex_queue.hpp"
#include "qlock/system.hpp"

namespace qlock {

/// One operation of a sequential history on M.
struct SeqOp {
  ProcessId proc = 0;
  MqOp op = MqOp::Enqueue;
  MqResponse response = MqResponse::ok();

  bool operator==(const SeqOp&) const = default;
};

using SeqHistory = std::vector<SeqOp>;

/// Two linearization points inside one operation execution.
class ClassificationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// L(H): the operations whose linearization point occurs in H, in the order
/// of those points, each with the response fixed by its point.
SeqHistory build_candidate(const History& h);

/// Replays seq from the initial state; Arbitrary matches anything.
bool conforms(const SeqHistory& seq);

struct Linearization {
  SeqHistory seq;
  /// Position in seq of the first bad operation, if the history has one.
  std::optional<std::size_t> bad_op;
  bool conforms = false;
};

/// Builds the linearization used in the correctness proofs: L(H) when no
/// operation violates the etiquette; otherwise the candidate up to the first
/// bad operation, then the bad operation, then every remaining invoked
/// operation in invocation order, all with Arbitrary responses.
Linearization linearize(const History& h, int nprocs);

/// An operation execution on M recovered from a history.
struct OpExec {
  ProcessId proc = 0;
  MqOp op = MqOp::Enqueue;
  /// Empty while pending.
  std::optional<MqResponse> response;
  std::size_t invoked_at = 0;
  std::size_t responded_at = 0;
};

/// H|M as a list of operation executions, in invocation order.
std::vector<OpExec> operations(const History& h);

enum class OracleResult { Linearizable, NotLinearizable, Skipped };

const char* to_string(OracleResult r);

/// Searches every completion and every order consistent with real-time
/// precedence for a conforming sequential history. Skipped when there are
/// more than `cap` operation executions.
OracleResult brute_force_linearizable(const std::vector<OpExec>& ops, std::size_t cap = 12);
OracleResult brute_force_linearizable(const History& h, std::size_t cap = 12);

// State predicates. Each returns a description of the first violation.

/// Invariant of the lock over an atomic MutexQueue.
std::optional<std::string> check_invariant1(const System& sys);
/// MQFI: queued processes have distinct array indices.
std::optional<std::string> check_mqfi_indices(const System& sys);
/// MQFI: the value of every Stat entry.
std::optional<std::string> check_mqfi_stat(const System& sys);
/// Expected value of Stat[i] given the linearized state and private
/// variables.
int expected_stat(const System& sys, int i);
/// MQFS: ownership properties of myIdx and prevIdx.
std::optional<std::string> check_mqfs_ownership(const System& sys);
/// MQFS: the value of every Queue entry.
std::optional<std::string> check_mqfs_queue(const System& sys);

enum class Status { Pass, Fail, NotApplicable, Skipped };

const char* to_string(Status s);
std::optional<Status> parse_status(const std::string& text);

struct Verdict {
  Status status = Status::NotApplicable;
  std::string detail;
  /// Schedule reproducing the first violation.
  std::optional<Schedule> counterexample;

  bool operator==(const Verdict&) const = default;
};

struct Metrics {
  std::uint64_t histories = 0;
  std::uint64_t prefixes = 0;
  int max_rmr_per_passage = 0;
  int max_spin_rmr_per_passage = 0;
  /// Indexed by MqOp.
  std::array<int, 3> max_steps_per_op{};
  int max_exit_steps = 0;
  std::uint64_t oracle_checked = 0;
  std::uint64_t oracle_skipped = 0;
  /// Histories whose candidate failed but which the oracle found
  /// linearizable through some other order.
  std::uint64_t oracle_only = 0;

  bool operator==(const Metrics&) const = default;
};

/// Property names used as report keys.
namespace prop {
inline constexpr const char* kWellFormed = "well_formed";
inline constexpr const char* kMutualExclusion = "mutual_exclusion";
inline constexpr const char* kMutualExclusionLiteral = "mutual_exclusion_literal";
inline constexpr const char* kCsPredicatesAgree = "cs_predicates_agree";
inline constexpr const char* kFcfs = "fcfs";
inline constexpr const char* kBoundedExit = "bounded_exit";
inline constexpr const char* kStepBounds = "step_bounds";
inline constexpr const char* kRmrBound = "rmr_bound";
inline constexpr const char* kSpinRmr = "spin_rmr";
inline constexpr const char* kProgress = "progress";
inline constexpr const char* kLinearizable = "linearizable";
inline constexpr const char* kOracleAgreement = "oracle_agreement";
inline constexpr const char* kInvariant1 = "invariant1";
inline constexpr const char* kStatValues = "stat_values";
inline constexpr const char* kDistinctIndices = "distinct_indices";
inline constexpr const char* kQueueValues = "queue_values";
inline constexpr const char* kOwnership = "ownership";
inline constexpr const char* kTraceProperties = "trace_properties";
}  // namespace prop

struct PropertyReport {
  std::map<std::string, Verdict> verdicts;
  Metrics metrics;

  /// No verdict is Fail.
  bool all_pass() const;
  /// First failing property in key order, if any.
  std::optional<std::string> first_failure() const;

  bool operator==(const PropertyReport&) const = default;
};

/// Step-count limit of one access procedure of the given implementation.
int step_bound(ImplKind impl, MqOp op);

struct CheckOptions {
  std::size_t oracle_cap = 12;
  bool brute_force = true;
  /// Per-passage RMR limit; unchecked when empty.
  std::optional<int> rmr_bound;
  /// Stop the search at the first failure.
  bool stop_on_failure = false;
};

/// Aggregates verdicts over every prefix and maximal history handed to it.
class PropertyChecker {
 public:
  PropertyChecker(const SystemConfig& config, CheckOptions options = {});

  Visit on_prefix(const System& sys, const History& h, const Schedule& schedule, const StepInfo& info);
  Visit on_maximal(const System& sys, const History& h, const Schedule& schedule);

  /// Callbacks bound to this checker, for explore().
  auto prefix_callback() {
    return [this](const System& s, const History& h, const Schedule& sc, const StepInfo& i) {
      return on_prefix(s, h, sc, i);
    };
  }
  auto maximal_callback() {
    return [this](const System& s, const History& h, const Schedule& sc) { return on_maximal(s, h, sc); };
  }

  /// Copies exploration totals into the metrics and finalizes the oracle
  /// verdict.
  void finish(const ExploreStats& stats);

  const PropertyReport& report() const { return report_; }

 private:
  void applicable(const char* name);
  void fail(const char* name, const std::string& detail, const Schedule& schedule);
  bool failed_since_last_check();

  SystemConfig config_;
  CheckOptions options_;
  PropertyReport report_;
  bool new_failure_ = false;
  std::unordered_set<std::string> oracle_seen_;
};

/// Explores every interleaving and checks all properties.
PropertyReport check_exhaustive(const SystemConfig& config, const CheckOptions& options = {},
                                const ExploreLimits& limits = {});

/// Checks one seeded random run. Maximal-history checks apply when the run
/// ends with no process enabled.
PropertyReport check_random(const SystemConfig& config, std::uint64_t seed, std::size_t max_steps,
                            const CheckOptions& options = {});

/// Checks the run given by a schedule; the resulting history is stored in
/// `history` when non-null. Throws std::invalid_argument if the schedule is
/// not executable.
PropertyReport check_schedule(const SystemConfig& config, const Schedule& schedule, const CheckOptions& options = {},
                              History* history = nullptr);

/// Folds `from` into `into`: first failures win, maxima are taken, counts
/// are added.
void merge_into(PropertyReport& into, const PropertyReport& from);

}  // namespace qlock
