#pragma once

// MutexQueue from fetch-and-store and registers.
//
// Each process owns one of N+1 slots of Queue and links itself behind the
// slot swapped out of Last. isHead() swaps the caller's (slot, id) into the
// predecessor's slot; dequeue() swaps (prevIdx, id) into its own slot and
// then adopts prevIdx as its slot. Whichever swap comes second sees the
// other's value, which resolves the isHead/dequeue race.

#include <optional>
#include <stdexcept>
#include <vector>

#include "qlock/history.hpp"
#include "qlock/sim_memory.hpp"

namespace qlock {

/// Pid half of a Queue entry that no process has written.
inline constexpr int kNoneProc = -2;

struct MqfsShared {
  int n = 0;
  std::vector<CellId> queue;  // N + 1 slots
  CellId last;
};

/// Adds Queue[0..N] and Last. Queue[i] starts as ((i+1) mod (N+1), none) so
/// that no slot initially names itself; Last starts at N.
MqfsShared make_mqfs_shared(MemoryLayout& layout, int n);

struct MqfsFaults {
  bool skip_queue_write = false;
  bool flip_is_head = false;
};

struct MqfsProc {
  ProcessId pid = 0;
  int my_idx = 0;
  int prev_idx = 0;
  int temp_idx = 0;
  int temp_id = kNoneProc;
  std::optional<MqOp> pending;
  int line = 0;
  bool invoked = false;
  int op_steps = 0;
  /// Wrote Queue[myIdx] at enqueue line 1 and has not swapped it at
  /// dequeue line 1 since.
  bool entry_published = false;
  /// prevIdx as obtained by the last enqueue().
  int prev_at_enqueue = -1;
  /// A dequeue() handed out a never-written pid half; must stay false.
  bool returned_none = false;

  static MqfsProc initial(ProcessId p) {
    MqfsProc proc;
    proc.pid = p;
    proc.my_idx = p;
    return proc;
  }

  void begin(MqOp op) {
    pending = op;
    line = 1;
    invoked = false;
    op_steps = 0;
  }

  bool operator==(const MqfsProc&) const = default;
};

ProcedureStep mqfs_step(MqfsProc& proc, const MqfsShared& shared, SimMemory& mem, History& history,
                        const MqfsFaults& faults = {});

std::optional<LinPoint> mqfs_linearization_point(const BaseStep& step, const MqfsProc& ctx,
                                                 const MqfsShared& shared);

/// The process owning slot i (myIdx == i), if any. Throws
/// DuplicateOwner if two processes claim the slot.
std::optional<ProcessId> owner_of(int i, const std::vector<MqfsProc>& procs);

class DuplicateOwner : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qlock
