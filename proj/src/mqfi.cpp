#include "qlock/mqfi.hpp"

#include <stdexcept>
#include <string>

namespace qlock {

void CounterMode::validate(int n) const {
  if (!wrap_bits) return;
  const int m = *wrap_bits;
  if (m < 1 || m > 62) throw std::invalid_argument("counter width must be in [1, 62] bits");
  const std::int64_t modulus = std::int64_t{1} << m;
  if (n <= 0 || modulus % n != 0) {
    throw std::invalid_argument("wrapping counter needs N dividing 2^" + std::to_string(m) + ", N = " +
                                std::to_string(n));
  }
}

int ctr_index(std::int64_t raw, const CounterMode& mode, int n) {
  if (mode.wrap_bits) raw &= (std::int64_t{1} << *mode.wrap_bits) - 1;
  return static_cast<int>(raw % n);
}

MqfiShared make_mqfi_shared(MemoryLayout& layout, int n, CounterMode mode) {
  mode.validate(n);
  MqfiShared s;
  s.n = n;
  s.mode = mode;
  for (int i = 0; i < n; ++i) {
    s.stat.push_back(layout.add({.name = "Stat[" + std::to_string(i) + "]",
                                 .kind = CellKind::FaiCounter,
                                 .initial = {i == 0 ? 1 : 0, 0},
                                 .object_internal = true}));
  }
  for (int i = 0; i < n; ++i) {
    s.proc.push_back(layout.add({.name = "Proc[" + std::to_string(i) + "]",
                                 .kind = CellKind::Register,
                                 .object_internal = true}));
  }
  s.ctr = layout.add({.name = "Ctr", .kind = CellKind::FaiCounter, .wrap_bits = mode.wrap_bits, .object_internal = true});
  return s;
}

std::optional<LinPoint> mqfi_linearization_point(const BaseStep& step, const MqfiProc& ctx,
                                                 const MqfiShared& shared) {
  if (!ctx.pending) return std::nullopt;
  const auto next = static_cast<std::size_t>((ctx.index + 1) % shared.n);
  const auto own = static_cast<std::size_t>(ctx.index);
  const bool fai = step.access.kind == AccessKind::FetchInc;

  switch (*ctx.pending) {
    case MqOp::Enqueue:
      if (fai && step.cell == shared.ctr) return LinPoint{MqOp::Enqueue, MqResponse::ok()};
      break;
    case MqOp::IsHead:
      if (fai && step.cell == shared.stat[own]) {
        return LinPoint{MqOp::IsHead, MqResponse::boolean(step.ret.first == 1)};
      }
      break;
    case MqOp::Dequeue:
      if (fai && step.cell == shared.stat[next] && step.ret.first != 1) {
        return LinPoint{MqOp::Dequeue, MqResponse::no_successor()};
      }
      if (step.access.kind == AccessKind::Read && step.cell == shared.proc[next]) {
        return LinPoint{MqOp::Dequeue, MqResponse::successor(static_cast<int>(step.ret.first))};
      }
      break;
  }
  return std::nullopt;
}

ProcedureStep mqfi_step(MqfiProc& proc, const MqfiShared& shared, SimMemory& mem, History& history,
                        const MqfiFaults& faults) {
  if (!proc.pending) throw std::logic_error("mqfi_step without a pending operation");
  const MqOp op = *proc.pending;
  const ProcessId p = proc.pid;

  if (op == MqOp::Dequeue && proc.line == 1 && faults.skip_stat_reset) proc.line = 2;
  if (!proc.invoked) {
    history.push({p, InvStep{op}});
    proc.invoked = true;
    if (op == MqOp::Enqueue) proc.stat_reset_written = false;
  }

  auto access = [&](CellId cell, Access a) {
    const AccessResult r = mem.apply(p, cell, a);
    BaseStep step{cell, a, r.ret, r.cost, std::nullopt};
    step.lin_point = mqfi_linearization_point(step, proc, shared);
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

  const auto own = static_cast<std::size_t>(proc.index);
  const auto next = static_cast<std::size_t>((proc.index + 1) % shared.n);

  switch (op) {
    case MqOp::Enqueue: {
      const Word raw = access(shared.ctr, Access::fetch_inc());
      proc.index = ctr_index(raw.first, shared.mode, shared.n);
      return finish(MqResponse::ok());
    }
    case MqOp::IsHead:
      if (proc.line == 1) {
        access(shared.proc[own], Access::write({p, 0}));
        proc.line = 2;
        return {};
      } else {
        const bool head = access(shared.stat[own], Access::fetch_inc()).first == 1;
        return finish(MqResponse::boolean(head != faults.flip_is_head));
      }
    case MqOp::Dequeue:
      if (proc.line == 1) {
        access(shared.stat[own], Access::write({0, 0}));
        proc.stat_reset_written = true;
        proc.line = 2;
        return {};
      } else if (proc.line == 2) {
        if (access(shared.stat[next], Access::fetch_inc()).first == 1) {
          proc.line = 3;
          return {};
        }
        return finish(MqResponse::no_successor());
      } else {
        const Word id = access(shared.proc[next], Access::read());
        return finish(MqResponse::successor(static_cast<int>(id.first)));
      }
  }
  throw std::logic_error("unreachable");
}

}  // namespace qlock
