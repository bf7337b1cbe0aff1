#pragma once

// Generic queue-based mutual exclusion over any MutexQueue M.
//
//   loop
//   1  NCS
//   2  M.enqueue()
//   3  if !M.isHead()
//   4    while Wait[p].read() = true do skip
//   5    Wait[p].write(true)
//   6  CS
//   7  nextHead := M.dequeue()
//   8  if nextHead != -1
//   9    Wait[nextHead].write(false)
//
// Wait[p] is local to p on a DSM machine. NCS and CS take no shared steps.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qlock/history.hpp"
#include "qlock/sim_memory.hpp"

namespace qlock {

/// Next pseudocode line a process will execute.
enum class Line : std::uint8_t { Ncs = 1, Enqueue, IsHead, Spin, Reset, Cs, Dequeue, Branch, Signal };

enum class Phase : std::uint8_t { Doorway, Wait, DoneWait, NoWait, NearNcs };

const char* to_string(Phase phase);

struct PhaseInfo {
  Phase phase = Phase::NearNcs;
  /// Sub-phase of NEAR_NCS between a dequeue() returning a successor and
  /// the write at line 9.
  bool exit = false;

  bool operator==(const PhaseInfo&) const = default;
};

struct GqmeShared {
  std::vector<CellId> wait;
};

/// Adds Wait[0..N-1], initially true, Wait[p] homed at p.
GqmeShared make_gqme_shared(MemoryLayout& layout, int n);

struct GqmeFaults {
  bool skip_wait_reset = false;
};

struct GqmeProc {
  ProcessId pid = 0;
  Line pc = Line::Enqueue;
  int next_head = -1;
  /// 1-based index of the current passage; 0 before the first.
  int passage = 0;
  int passages_budget = 0;
  bool halted = false;
  /// Reached the CS through the busy-wait loop in this passage.
  bool waited = false;
  /// Last line-4 read returned true and Wait[p] has not been written since;
  /// another read would repeat the same state.
  bool spin_blocked = false;
  /// A MutexQueue access procedure is in progress.
  bool in_call = false;

  static GqmeProc initial(ProcessId p, int passages) {
    GqmeProc proc;
    proc.pid = p;
    proc.passages_budget = passages;
    proc.halted = passages <= 0;
    return proc;
  }

  bool operator==(const GqmeProc&) const = default;
};

PhaseInfo phase_of(const GqmeProc& proc);

/// In the CS by control position: between entering at line 3 or 5 and the
/// start of dequeue() at line 7.
bool in_cs_by_pc(const GqmeProc& proc);

/// What one GQME step did, for the system's bookkeeping.
struct GqmeEffect {
  bool passage_started = false;
  bool passage_finished = false;
  bool entered_cs = false;
  /// A MutexQueue operation finished with this response.
  std::optional<MqResponse> queue_response;
  /// Wait cell written by this step, if any.
  std::optional<ProcessId> wait_written;
};

/// Executes the next step of p. `port(op)` advances p's MutexQueue call of
/// `op` by one step, starting the call if none is in progress, and reports
/// whether it completed and with what response.
template <class Port>
GqmeEffect gqme_step(GqmeProc& proc, const GqmeShared& shared, SimMemory& mem, History& history, Port&& port,
                     const GqmeFaults& faults = {}) {
  if (proc.halted) throw std::logic_error("gqme_step on halted process");
  GqmeEffect effect;
  const ProcessId p = proc.pid;

  auto wait_access = [&](ProcessId owner, Access a) {
    const CellId cell = shared.wait[static_cast<std::size_t>(owner)];
    const AccessResult r = mem.apply(p, cell, a);
    history.push({p, BaseStep{cell, a, r.ret, r.cost, std::nullopt}});
    if (a.kind == AccessKind::Write) effect.wait_written = owner;
    return r.ret.first != 0;
  };
  auto call = [&](MqOp op) {
    const ProcedureStep r = port(op);
    proc.in_call = !r.done;
    if (r.done) effect.queue_response = r.response;
    return r;
  };
  auto finish_passage = [&] {
    effect.passage_finished = true;
    proc.next_head = -1;
    if (proc.passage >= proc.passages_budget) {
      proc.halted = true;
    } else {
      proc.pc = Line::Enqueue;
    }
  };

  switch (proc.pc) {
    case Line::Ncs:
    case Line::Enqueue: {
      proc.pc = Line::Enqueue;
      if (!proc.in_call) {
        ++proc.passage;
        effect.passage_started = true;
      }
      const ProcedureStep r = call(MqOp::Enqueue);
      if (r.done) proc.pc = Line::IsHead;
      break;
    }
    case Line::IsHead: {
      const ProcedureStep r = call(MqOp::IsHead);
      if (r.done) {
        if (r.response == MqResponse::boolean(true)) {
          proc.waited = false;
          proc.pc = Line::Dequeue;
          effect.entered_cs = true;
        } else {
          proc.pc = Line::Spin;
        }
      }
      break;
    }
    case Line::Spin:
      if (wait_access(p, Access::read())) {
        proc.spin_blocked = true;
      } else if (faults.skip_wait_reset) {
        proc.waited = true;
        proc.pc = Line::Dequeue;
        effect.entered_cs = true;
      } else {
        proc.pc = Line::Reset;
      }
      break;
    case Line::Reset:
      wait_access(p, Access::write({1, 0}));
      proc.waited = true;
      proc.pc = Line::Dequeue;
      effect.entered_cs = true;
      break;
    case Line::Cs:
    case Line::Dequeue: {
      proc.pc = Line::Dequeue;
      const ProcedureStep r = call(MqOp::Dequeue);
      if (r.done) {
        const int successor = r.response.process();
        if (r.response.kind() == MqResponse::Kind::Pid && successor >= 0 &&
            successor < static_cast<int>(shared.wait.size())) {
          proc.next_head = successor;
          proc.pc = Line::Signal;
        } else {
          finish_passage();
        }
      }
      break;
    }
    case Line::Branch:
    case Line::Signal:
      wait_access(proc.next_head, Access::write({0, 0}));
      finish_passage();
      break;
  }
  return effect;
}

/// The process whose enqueue() immediately precedes p's last enqueue() in
/// linearization order, scanning atomic enqueue steps and enqueue
/// linearization points.
std::optional<ProcessId> last_pred(const History& history, ProcessId p);

}  // namespace qlock
