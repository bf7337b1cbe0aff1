#pragma once

// MutexQueue from fetch-and-increment and registers.
//
// Processes take slots of two circular arrays by incrementing Ctr. Stat[i]
// counts the events "the owner of slot i became visible" and "the owner of
// slot i became head", so whoever brings it to 1 second learns that both
// happened. Proc[i] publishes the owner's id for its predecessor.

#include <cstdint>
#include <optional>
#include <vector>

#include "qlock/history.hpp"
#include "qlock/sim_memory.hpp"

namespace qlock {

/// Ctr is either an unbounded integer or an unsigned m-bit integer that
/// wraps to zero; wrapping is only legal when N divides 2^m.
struct CounterMode {
  std::optional<int> wrap_bits;

  static CounterMode unbounded() { return {}; }
  static CounterMode wrap(int bits) { return {bits}; }

  /// Throws std::invalid_argument if wrapping at 2^m is incompatible with n.
  void validate(int n) const;

  bool operator==(const CounterMode&) const = default;
};

/// Array slot for a raw counter value.
int ctr_index(std::int64_t raw, const CounterMode& mode, int n);

struct MqfiShared {
  int n = 0;
  CounterMode mode;
  std::vector<CellId> stat;
  std::vector<CellId> proc;
  CellId ctr;
};

/// Adds Stat, Proc and Ctr to the layout with their initial values.
MqfiShared make_mqfi_shared(MemoryLayout& layout, int n, CounterMode mode);

struct MqfiFaults {
  bool skip_stat_reset = false;
  bool flip_is_head = false;
};

struct MqfiProc {
  ProcessId pid = 0;
  int index = 0;
  std::optional<MqOp> pending;
  /// Next line of the pending procedure, counted from 1.
  int line = 0;
  bool invoked = false;
  /// Steps taken by the pending (or last) procedure call.
  int op_steps = 0;
  /// Wrote Stat[index] := 0 since last invoking enqueue().
  bool stat_reset_written = false;

  void begin(MqOp op) {
    pending = op;
    line = 1;
    invoked = false;
    op_steps = 0;
  }

  /// In dequeue() after the successor's Stat F&I returned 1, before reading
  /// Proc.
  bool between_fai_and_proc_read() const { return pending == MqOp::Dequeue && line == 3; }

  bool operator==(const MqfiProc&) const = default;
};

/// Executes the next line of p's pending procedure, appending its steps to
/// the history. INV is recorded with the first base object step and RES with
/// the last.
ProcedureStep mqfi_step(MqfiProc& proc, const MqfiShared& shared, SimMemory& mem, History& history,
                        const MqfiFaults& faults = {});

/// Classifies a base object step taken by `ctx` (state before the step) as a
/// linearization point, returning the operation and its response.
std::optional<LinPoint> mqfi_linearization_point(const BaseStep& step, const MqfiProc& ctx,
                                                 const MqfiShared& shared);

}  // namespace qlock
