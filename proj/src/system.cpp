#include "qlock/system.hpp"

#include <stdexcept>
#include <variant>

#include "qlock/detail/overloaded.hpp"

namespace qlock {

const char* to_string(ImplKind k) {
  switch (k) {
    case ImplKind::Atomic:
      return "atomic";
    case ImplKind::Mqfi:
      return "mqfi";
    case ImplKind::Mqfs:
      return "mqfs";
  }
  return "?";
}

const char* to_string(Mutation m) {
  switch (m) {
    case Mutation::None:
      return "none";
    case Mutation::SkipStatReset:
      return "skip-stat-reset";
    case Mutation::FlipIsHead:
      return "flip-is-head";
    case Mutation::SkipQueueWrite:
      return "skip-queue-write";
    case Mutation::SkipWaitReset:
      return "skip-wait-reset";
  }
  return "?";
}

std::optional<ImplKind> parse_impl(const std::string& text) {
  for (ImplKind k : {ImplKind::Atomic, ImplKind::Mqfi, ImplKind::Mqfs}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::optional<Mutation> parse_mutation(const std::string& text) {
  for (Mutation m : {Mutation::None, Mutation::SkipStatReset, Mutation::FlipIsHead, Mutation::SkipQueueWrite,
                     Mutation::SkipWaitReset}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<MemoryModel> parse_model(const std::string& text) {
  if (text == "cc") return MemoryModel::Cc;
  if (text == "dsm") return MemoryModel::Dsm;
  return std::nullopt;
}

void SystemConfig::validate() const {
  if (n < 1 || n > kMaxProcs) throw std::invalid_argument("n must be in [1, 64]");
  if (passages < 0) throw std::invalid_argument("passages must be non-negative");
  if (impl == ImplKind::Mqfi) counter.validate(n);
  if (counter.wrap_bits && impl != ImplKind::Mqfi) {
    throw std::invalid_argument("a counter width only applies to mqfi");
  }
  if (script_mode() && static_cast<int>(scripts.size()) != n) {
    throw std::invalid_argument("scripts must give one operation list per process");
  }
  switch (mutation) {
    case Mutation::None:
      break;
    case Mutation::SkipStatReset:
      if (impl != ImplKind::Mqfi) throw std::invalid_argument("skip-stat-reset applies to mqfi only");
      break;
    case Mutation::FlipIsHead:
      if (impl == ImplKind::Atomic) throw std::invalid_argument("flip-is-head applies to mqfi and mqfs");
      break;
    case Mutation::SkipQueueWrite:
      if (impl != ImplKind::Mqfs) throw std::invalid_argument("skip-queue-write applies to mqfs only");
      break;
    case Mutation::SkipWaitReset:
      if (script_mode()) throw std::invalid_argument("skip-wait-reset needs the lock algorithm");
      break;
  }
}

namespace {

SystemConfig validated(SystemConfig config) {
  config.validate();
  return config;
}

}  // namespace

System::System(SystemConfig config)
    : System(validated(std::move(config)), std::make_shared<MemoryLayout>()) {}

System::System(SystemConfig&& config, std::shared_ptr<MemoryLayout> layout)
    : config_(std::make_shared<const SystemConfig>(std::move(config))),
      layout_(layout),
      statics_(build_statics(*config_, *layout)),
      mem_(layout_, config_->n, config_->model),
      tracker_(config_->n) {
  const int n = config_->n;
  for (ProcessId p = 0; p < n; ++p) {
    gqme_.push_back(GqmeProc::initial(p, config_->script_mode() ? 0 : config_->passages));
    if (config_->impl == ImplKind::Mqfi) {
      MqfiProc proc;
      proc.pid = p;
      mqfi_.push_back(proc);
    }
    if (config_->impl == ImplKind::Mqfs) mqfs_.push_back(MqfsProc::initial(p));
  }
  track_.resize(static_cast<std::size_t>(n));
}

std::shared_ptr<const System::Statics> System::build_statics(const SystemConfig& config, MemoryLayout& layout) {
  auto statics = std::make_shared<Statics>();
  const int n = config.n;
  statics->gqme = make_gqme_shared(layout, n);
  if (config.impl == ImplKind::Mqfi) statics->mqfi = make_mqfi_shared(layout, n, config.counter);
  if (config.impl == ImplKind::Mqfs) statics->mqfs = make_mqfs_shared(layout, n);
  statics->gqme_faults.skip_wait_reset = config.mutation == Mutation::SkipWaitReset;
  statics->mqfi_faults.skip_stat_reset = config.mutation == Mutation::SkipStatReset;
  statics->mqfi_faults.flip_is_head = config.mutation == Mutation::FlipIsHead && config.impl == ImplKind::Mqfi;
  statics->mqfs_faults.skip_queue_write = config.mutation == Mutation::SkipQueueWrite;
  statics->mqfs_faults.flip_is_head = config.mutation == Mutation::FlipIsHead && config.impl == ImplKind::Mqfs;
  return statics;
}

bool System::enabled(ProcessId p) const {
  const auto i = static_cast<std::size_t>(p);
  if (config_->script_mode()) return track_[i].script_pos < static_cast<int>(config_->scripts[i].size());
  return !gqme_[i].halted && !gqme_[i].spin_blocked;
}

bool System::finished() const {
  for (ProcessId p = 0; p < num_procs(); ++p) {
    const auto i = static_cast<std::size_t>(p);
    if (config_->script_mode()) {
      if (track_[i].script_pos < static_cast<int>(config_->scripts[i].size())) return false;
    } else if (!gqme_[i].halted) {
      return false;
    }
  }
  return true;
}

std::vector<ProcessId> System::enabled_procs() const {
  std::vector<ProcessId> out;
  for (ProcessId p = 0; p < num_procs(); ++p) {
    if (enabled(p)) out.push_back(p);
  }
  return out;
}

ProcedureStep System::call(ProcessId p, MqOp op, History& history) {
  const auto i = static_cast<std::size_t>(p);
  switch (config_->impl) {
    case ImplKind::Atomic: {
      const MqTransition t = apply(atomic_state_, p, op);
      atomic_state_ = t.state;
      history.push({p, ObjectStep{op, t.response, 1}});
      return {true, t.response};
    }
    case ImplKind::Mqfi: {
      MqfiProc& proc = mqfi_[i];
      if (!proc.pending) proc.begin(op);
      return mqfi_step(proc, *statics_->mqfi, mem_, history, statics_->mqfi_faults);
    }
    case ImplKind::Mqfs: {
      MqfsProc& proc = mqfs_[i];
      if (!proc.pending) proc.begin(op);
      return mqfs_step(proc, *statics_->mqfs, mem_, history, statics_->mqfs_faults);
    }
  }
  throw std::logic_error("unreachable");
}

StepInfo System::step(ProcessId p, History& history) {
  if (!enabled(p)) throw std::logic_error("process " + std::to_string(p) + " is not enabled");
  const auto i = static_cast<std::size_t>(p);
  ProcTrack& t = track_[i];
  const std::size_t mark = history.size();
  StepInfo info;

  if (config_->script_mode()) {
    const MqOp op = config_->scripts[i][static_cast<std::size_t>(t.script_pos)];
    if (call(p, op, history).done) ++t.script_pos;
  } else {
    auto port = [&](MqOp op) { return call(p, op, history); };
    info.effect = gqme_step(gqme_[i], statics_->gqme, mem_, history, port, statics_->gqme_faults);
  }

  if (info.effect.passage_started) {
    t.rmr = 0;
    t.spin_rmr = 0;
    t.exit_steps = -1;
  }
  for (std::size_t k = mark; k < history.size(); ++k) observe(history[k]);

  t.last_step_enters_cs = false;
  if (info.effect.entered_cs && history.size() > mark) {
    const Step& last = history[history.size() - 1];
    std::visit(detail::overloaded{
                   [&](const ObjectStep& o) { t.last_step_enters_cs = o.ret == MqResponse::boolean(true); },
                   [&](const ResStep& r) { t.last_step_enters_cs = r.ret == MqResponse::boolean(true); },
                   [&](const BaseStep& b) {
                     t.last_step_enters_cs = b.cell == statics_->gqme.wait[i] &&
                                             b.access.kind == AccessKind::Write && b.access.arg.first != 0;
                   },
                   [&](const InvStep&) {},
               },
               last.event);
  }
  if (info.effect.entered_cs && t.must_precede != 0) info.fcfs_violation = true;
  return info;
}

void System::observe(const Step& s) {
  const ProcessId p = s.proc;
  ProcTrack& t = track_[static_cast<std::size_t>(p)];
  std::visit(detail::overloaded{
                 [&](const BaseStep& b) {
                   t.rmr += b.cost;
                   if (b.cell == statics_->gqme.wait[static_cast<std::size_t>(p)] &&
                       b.access.kind == AccessKind::Read) {
                     t.spin_rmr += b.cost;
                   }
                   if (t.exit_steps >= 0) ++t.exit_steps;
                   if (tracker_.pending(p)) ++t.op_steps;
                   if (b.access.kind == AccessKind::Write) {
                     for (ProcessId q = 0; q < num_procs(); ++q) {
                       if (b.cell == statics_->gqme.wait[static_cast<std::size_t>(q)]) {
                         gqme_[static_cast<std::size_t>(q)].spin_blocked = false;
                       }
                     }
                   }
                   if (b.lin_point) {
                     tracker_.lin_point(p, *b.lin_point);
                     on_lin_point(p, *b.lin_point);
                   }
                 },
                 [&](const ObjectStep& o) {
                   t.rmr += o.cost;
                   if (t.exit_steps >= 0) ++t.exit_steps;
                   on_invoke(p, o.op);
                   t.op_steps = 1;
                   tracker_.atomic(p, o.op, o.ret);
                   on_lin_point(p, {o.op, o.ret});
                   on_response(p, o.op);
                 },
                 [&](const InvStep& inv) {
                   on_invoke(p, inv.op);
                   tracker_.invoke(p, inv.op);
                 },
                 [&](const ResStep& res) {
                   tracker_.respond(p, res.ret);
                   on_response(p, t.op);
                 },
             },
             s.event);
}

void System::on_invoke(ProcessId p, MqOp op) {
  ProcTrack& t = track_[static_cast<std::size_t>(p)];
  t.op = op;
  t.op_steps = 0;
  if (op == MqOp::Enqueue) {
    t.must_precede = 0;
    for (ProcessId q = 0; q < num_procs(); ++q) {
      if (q != p && track_[static_cast<std::size_t>(q)].enqueue_done) t.must_precede |= proc_bit(q);
    }
  }
}

void System::on_response(ProcessId p, MqOp op) {
  ProcTrack& t = track_[static_cast<std::size_t>(p)];
  if (op == MqOp::Enqueue) t.enqueue_done = true;
  if (op == MqOp::Dequeue) {
    t.exit_steps = 0;
    if (config_->impl == ImplKind::Mqfs) {
      const MqfsProc& proc = mqfs_[static_cast<std::size_t>(p)];
      if (proc.returned_none && !tracker_.bad_op_seen()) note_trace_violation("process " + std::to_string(p) + ": dequeue returned an unwritten pid");
      if (!tracker_.bad_op_seen() && proc.my_idx != proc.prev_at_enqueue) {
        note_trace_violation("process " + std::to_string(p) + ": myIdx after dequeue differs from prevIdx at enqueue");
      }
    }
  }
}

void System::on_lin_point(ProcessId p, const LinPoint& lp) {
  ProcTrack& t = track_[static_cast<std::size_t>(p)];
  switch (lp.op) {
    case MqOp::Enqueue:
      t.last_pred = last_enqueuer_;
      if (config_->impl == ImplKind::Mqfi) {
        index_sequence_.push_back(mqfi_[static_cast<std::size_t>(p)].index);
      }
      if (config_->impl == ImplKind::Mqfs) {
        const MqfsProc& proc = mqfs_[static_cast<std::size_t>(p)];
        // The Last swap's result is assigned to prevIdx together with this step.
        if (!tracker_.bad_op_seen()) {
          const int expected = last_enqueuer_ < 0 ? config_->n : track_[static_cast<std::size_t>(last_enqueuer_)].queued_idx;
          if (proc.prev_idx != expected) {
            note_trace_violation("process " + std::to_string(p) + ": prevIdx " + std::to_string(proc.prev_idx) +
                                 " differs from predecessor's myIdx " + std::to_string(expected));
          }
        }
        t.queued_idx = proc.my_idx;
      }
      last_enqueuer_ = p;
      break;
    case MqOp::Dequeue:
      t.enqueue_done = false;
      for (ProcTrack& other : track_) other.must_precede &= ~proc_bit(p);
      break;
    case MqOp::IsHead:
      break;
  }
}

void System::note_trace_violation(std::string what) {
  if (!trace_violation_) trace_violation_ = std::move(what);
}

std::vector<std::int64_t> System::encode() const {
  std::vector<std::int64_t> out;
  mem_.encode(out);
  out.push_back(atomic_state_.broken() ? -1 : static_cast<std::int64_t>(atomic_state_.queue().size()));
  for (ProcessId q : atomic_state_.queue()) out.push_back(q);
  out.push_back(static_cast<std::int64_t>(atomic_state_.visible()));
  for (const GqmeProc& g : gqme_) {
    out.push_back(static_cast<int>(g.pc) | (g.halted << 4) | (g.waited << 5) | (g.spin_blocked << 6) |
                  (g.in_call << 7));
    out.push_back(g.next_head);
    out.push_back(g.passage);
  }
  for (const MqfiProc& m : mqfi_) {
    out.push_back(m.index);
    out.push_back(m.pending ? static_cast<int>(*m.pending) : -1);
    out.push_back(m.line | (m.invoked << 4) | (m.stat_reset_written << 5));
    out.push_back(m.op_steps);
  }
  for (const MqfsProc& m : mqfs_) {
    out.push_back(m.my_idx);
    out.push_back(m.prev_idx);
    out.push_back(m.temp_idx);
    out.push_back(m.temp_id);
    out.push_back(m.pending ? static_cast<int>(*m.pending) : -1);
    out.push_back(m.line | (m.invoked << 4) | (m.entry_published << 5) | (m.returned_none << 6));
    out.push_back(m.op_steps);
    out.push_back(m.prev_at_enqueue);
  }
  for (const ProcTrack& t : track_) {
    out.push_back(t.rmr);
    out.push_back(t.spin_rmr);
    out.push_back(static_cast<int>(t.op) | (t.enqueue_done << 2) | (t.last_step_enters_cs << 3));
    out.push_back(t.op_steps);
    out.push_back(t.exit_steps);
    out.push_back(static_cast<std::int64_t>(t.must_precede));
    out.push_back(t.last_pred);
    out.push_back(t.queued_idx);
    out.push_back(t.script_pos);
  }
  tracker_.encode(out);
  out.push_back(last_enqueuer_);
  out.push_back(trace_violation_ ? 1 : 0);
  return out;
}

}  // namespace qlock
