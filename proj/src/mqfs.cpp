#include "qlock/mqfs.hpp"

#include <stdexcept>
#include <string>

namespace qlock {

MqfsShared make_mqfs_shared(MemoryLayout& layout, int n) {
  MqfsShared s;
  s.n = n;
  for (int i = 0; i <= n; ++i) {
    s.queue.push_back(layout.add({.name = "Queue[" + std::to_string(i) + "]",
                                  .kind = CellKind::FasCell,
                                  .initial = {(i + 1) % (n + 1), kNoneProc},
                                  .object_internal = true,
                                  .pair = true}));
  }
  s.last = layout.add({.name = "Last", .kind = CellKind::FasCell, .initial = {n, 0}, .object_internal = true});
  return s;
}

std::optional<LinPoint> mqfs_linearization_point(const BaseStep& step, const MqfsProc& ctx,
                                                 const MqfsShared& shared) {
  if (!ctx.pending || step.access.kind != AccessKind::FetchStore) return std::nullopt;
  switch (*ctx.pending) {
    case MqOp::Enqueue:
      if (step.cell == shared.last) return LinPoint{MqOp::Enqueue, MqResponse::ok()};
      break;
    case MqOp::IsHead:
      if (step.cell == shared.queue[static_cast<std::size_t>(ctx.prev_idx)]) {
        return LinPoint{MqOp::IsHead, MqResponse::boolean(step.ret.first != ctx.prev_idx)};
      }
      break;
    case MqOp::Dequeue:
      if (step.cell == shared.queue[static_cast<std::size_t>(ctx.my_idx)]) {
        if (step.ret.first == ctx.my_idx) return LinPoint{MqOp::Dequeue, MqResponse::no_successor()};
        return LinPoint{MqOp::Dequeue, MqResponse::pid(static_cast<int>(step.ret.second))};
      }
      break;
  }
  return std::nullopt;
}

ProcedureStep mqfs_step(MqfsProc& proc, const MqfsShared& shared, SimMemory& mem, History& history,
                        const MqfsFaults& faults) {
  if (!proc.pending) throw std::logic_error("mqfs_step without a pending operation");
  const MqOp op = *proc.pending;
  const ProcessId p = proc.pid;

  if (op == MqOp::Enqueue && proc.line == 1 && faults.skip_queue_write) proc.line = 2;
  if (!proc.invoked) {
    history.push({p, InvStep{op}});
    proc.invoked = true;
  }

  auto access = [&](CellId cell, Access a) {
    const AccessResult r = mem.apply(p, cell, a);
    BaseStep step{cell, a, r.ret, r.cost, std::nullopt};
    step.lin_point = mqfs_linearization_point(step, proc, shared);
    history.push({p, step});
    ++proc.op_steps;
    return r.ret;
  };
  auto finish = [&](MqResponse response) {
    history.push({p, ResStep{response}});
    proc.pending.reset();
    proc.line = 0;
    return ProcedureStep{true, response};
  };
  auto slot = [&](int i) { return shared.queue[static_cast<std::size_t>(i)]; };

  switch (op) {
    case MqOp::Enqueue:
      if (proc.line == 1) {
        access(slot(proc.my_idx), Access::write({proc.my_idx, p}));
        proc.entry_published = true;
        proc.line = 2;
        return {};
      } else {
        proc.prev_idx = static_cast<int>(access(shared.last, Access::fetch_store({proc.my_idx, 0})).first);
        proc.prev_at_enqueue = proc.prev_idx;
        return finish(MqResponse::ok());
      }
    case MqOp::IsHead: {
      const Word old = access(slot(proc.prev_idx), Access::fetch_store({proc.my_idx, p}));
      proc.temp_idx = static_cast<int>(old.first);
      proc.temp_id = static_cast<int>(old.second);
      const bool head = proc.temp_idx != proc.prev_idx;
      return finish(MqResponse::boolean(head != faults.flip_is_head));
    }
    case MqOp::Dequeue: {
      const Word old = access(slot(proc.my_idx), Access::fetch_store({proc.prev_idx, p}));
      proc.temp_idx = static_cast<int>(old.first);
      proc.temp_id = static_cast<int>(old.second);
      MqResponse ret = MqResponse::no_successor();
      if (proc.temp_idx != proc.my_idx) {
        ret = MqResponse::pid(proc.temp_id);
        if (proc.temp_id == kNoneProc) proc.returned_none = true;
      }
      proc.entry_published = false;
      proc.my_idx = proc.prev_idx;
      return finish(ret);
    }
  }
  throw std::logic_error("unreachable");
}

std::optional<ProcessId> owner_of(int i, const std::vector<MqfsProc>& procs) {
  std::optional<ProcessId> owner;
  for (const MqfsProc& proc : procs) {
    if (proc.my_idx != i) continue;
    if (owner) {
      throw DuplicateOwner("slot " + std::to_string(i) + " owned by " + std::to_string(*owner) + " and " +
                           std::to_string(proc.pid));
    }
    owner = proc.pid;
  }
  return owner;
}

}  // namespace qlock
