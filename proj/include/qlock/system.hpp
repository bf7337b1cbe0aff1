#pragma once

// A complete simulated system: N processes running GQME (or a fixed script
// of MutexQueue operations) over one MutexQueue provider, on a simulated
// memory. The state is a plain value, so copying a System snapshots it;
// the history is kept outside so that explorers can share one buffer.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qlock/gqme.hpp"
#include "qlock/history.hpp"
#include "qlock/linearization.hpp"
#include "qlock/mqfi.hpp"
#include "qlock/mqfs.hpp"
#include "qlock/mutex_queue.hpp"
#include "qlock/sim_memory.hpp"

namespace qlock {

enum class ImplKind : std::uint8_t { Atomic, Mqfi, Mqfs };

/// Seeded bugs used to check that the checkers catch them.
enum class Mutation : std::uint8_t { None, SkipStatReset, FlipIsHead, SkipQueueWrite, SkipWaitReset };

const char* to_string(ImplKind k);
const char* to_string(Mutation m);
std::optional<ImplKind> parse_impl(const std::string& text);
std::optional<Mutation> parse_mutation(const std::string& text);
std::optional<MemoryModel> parse_model(const std::string& text);

struct SystemConfig {
  ImplKind impl = ImplKind::Atomic;
  MemoryModel model = MemoryModel::Cc;
  int n = 2;
  int passages = 1;
  CounterMode counter;
  Mutation mutation = Mutation::None;
  /// When non-empty, process p issues scripts[p] directly on the
  /// MutexQueue instead of running GQME. Etiquette is not enforced.
  std::vector<std::vector<MqOp>> scripts;

  bool script_mode() const { return !scripts.empty(); }
  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Bookkeeping per process, updated as steps are taken.
struct ProcTrack {
  /// RMRs of the current passage, and the part spent in line-4 reads.
  int rmr = 0;
  int spin_rmr = 0;
  /// Operation of the current (or last) MutexQueue call and its step count.
  MqOp op = MqOp::Enqueue;
  int op_steps = 0;
  /// Shared steps since the current passage's dequeue() returned; -1 before.
  int exit_steps = -1;
  /// Processes whose enqueue() completed before this passage's enqueue()
  /// started and that had not yet dequeued at that time.
  ProcSet must_precede = 0;
  bool enqueue_done = false;
  /// Enqueuer immediately preceding this process's last enqueue, or -1.
  int last_pred = -1;
  /// The last step of this process was isHead() returning true or the
  /// line-5 write.
  bool last_step_enters_cs = false;
  /// MQFS: myIdx while this process was last in the queue.
  int queued_idx = -1;
  int script_pos = 0;

  bool operator==(const ProcTrack&) const = default;
};

/// What one scheduler step did.
struct StepInfo {
  GqmeEffect effect;
  /// The process entered the CS and some process it had to wait for had not
  /// dequeued yet.
  bool fcfs_violation = false;
};

class System {
 public:
  explicit System(SystemConfig config);

  const SystemConfig& config() const { return *config_; }
  int num_procs() const { return config_->n; }

  /// A fresh history bound to this system's memory layout.
  History make_history() const { return History(layout_); }

  /// p can take a step. A process whose last line-4 read returned true is
  /// disabled until Wait[p] is written, since another read would not
  /// change the state.
  bool enabled(ProcessId p) const;
  /// All processes halted (or finished their scripts).
  bool finished() const;
  std::vector<ProcessId> enabled_procs() const;

  StepInfo step(ProcessId p, History& history);

  /// Compact encoding of the full state, for state caching.
  std::vector<std::int64_t> encode() const;

  // Accessors for checkers.
  const SimMemory& memory() const { return mem_; }
  const MemoryLayout& layout() const { return *layout_; }
  const GqmeShared& gqme_shared() const { return statics_->gqme; }
  const std::optional<MqfiShared>& mqfi_shared() const { return statics_->mqfi; }
  const std::optional<MqfsShared>& mqfs_shared() const { return statics_->mqfs; }
  const std::vector<GqmeProc>& gqme_procs() const { return gqme_; }
  const std::vector<MqfiProc>& mqfi_procs() const { return mqfi_; }
  const std::vector<MqfsProc>& mqfs_procs() const { return mqfs_; }
  const ProcTrack& track(ProcessId p) const { return track_[static_cast<std::size_t>(p)]; }
  const LinearizationTracker& tracker() const { return tracker_; }
  /// The linearized MutexQueue state; for an atomic M, its actual state.
  const MutexQueueState& queue_state() const { return tracker_.state(); }
  /// A trace property (an MQFS slot or index property, or a none pid handed out by
  /// dequeue) failed at some step; the first description is kept.
  const std::optional<std::string>& trace_violation() const { return trace_violation_; }
  /// Array index obtained by each MQFI enqueue(), in linearization order.
  const std::vector<int>& index_sequence() const { return index_sequence_; }

 private:
  struct Statics {
    GqmeShared gqme;
    std::optional<MqfiShared> mqfi;
    std::optional<MqfsShared> mqfs;
    GqmeFaults gqme_faults;
    MqfiFaults mqfi_faults;
    MqfsFaults mqfs_faults;
  };

  System(SystemConfig&& config, std::shared_ptr<MemoryLayout> layout);
  static std::shared_ptr<const Statics> build_statics(const SystemConfig& config, MemoryLayout& layout);

  ProcedureStep call(ProcessId p, MqOp op, History& history);
  void observe(const Step& s);
  void on_lin_point(ProcessId p, const LinPoint& lp);
  void on_invoke(ProcessId p, MqOp op);
  void on_response(ProcessId p, MqOp op);
  void note_trace_violation(std::string what);

  std::shared_ptr<const SystemConfig> config_;
  std::shared_ptr<const MemoryLayout> layout_;
  std::shared_ptr<const Statics> statics_;

  SimMemory mem_;
  MutexQueueState atomic_state_;
  std::vector<GqmeProc> gqme_;
  std::vector<MqfiProc> mqfi_;
  std::vector<MqfsProc> mqfs_;
  std::vector<ProcTrack> track_;
  LinearizationTracker tracker_;
  int last_enqueuer_ = -1;
  std::optional<std::string> trace_violation_;
  std::vector<int> index_sequence_;
};

}  // namespace qlock
