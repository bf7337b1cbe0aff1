#include "qlock/linearization.hpp"

namespace qlock {

LinearizationTracker::LinearizationTracker(int n) : calls_(static_cast<std::size_t>(n)) {}

void LinearizationTracker::fail(Failure f, ProcessId p) {
  if (failure_ != Failure::None) return;
  failure_ = f;
  failing_ = p;
}

void LinearizationTracker::enter_broken(ProcessId p) {
  bad_op_ = true;
  bad_process_ = p;
  state_ = MutexQueueState::broken_state();
}

void LinearizationTracker::check_pending_etiquette() {
  if (bad_op_) return;
  for (std::size_t q = 0; q < calls_.size(); ++q) {
    const Call& c = calls_[q];
    if (c.active && !c.linearized && is_etiquette_violation(state_, static_cast<ProcessId>(q), c.op)) {
      enter_broken(static_cast<ProcessId>(q));
      return;
    }
  }
}

void LinearizationTracker::invoke(ProcessId p, MqOp op) {
  Call& c = calls_[static_cast<std::size_t>(p)];
  c = Call{true, false, op, MqResponse::ok()};
  check_pending_etiquette();
}

void LinearizationTracker::lin_point(ProcessId p, const LinPoint& lp) {
  Call& c = calls_[static_cast<std::size_t>(p)];
  if (!c.active || c.op != lp.op) {
    if (!bad_op_) fail(Failure::MissingLinPoint, p);
    return;
  }
  if (c.linearized) {
    fail(Failure::DoubleLinPoint, p);
    return;
  }
  c.linearized = true;
  c.lp_response = lp.response;
  if (bad_op_) return;

  const MqTransition t = apply(state_, p, lp.op);
  if (!t.response.matches(lp.response)) fail(Failure::SpecMismatch, p);
  state_ = t.state;
  check_pending_etiquette();
}

void LinearizationTracker::respond(ProcessId p, const MqResponse& ret) {
  Call& c = calls_[static_cast<std::size_t>(p)];
  if (!bad_op_) {
    if (!c.active || !c.linearized) {
      fail(Failure::MissingLinPoint, p);
    } else if (!(c.lp_response == ret)) {
      fail(Failure::ResponseMismatch, p);
    }
  }
  c = Call{};
}

void LinearizationTracker::atomic(ProcessId p, MqOp op, const MqResponse& ret) {
  invoke(p, op);
  lin_point(p, {op, ret});
  respond(p, ret);
}

std::string LinearizationTracker::describe_failure() const {
  const std::string who = "process " + std::to_string(failing_) + ": ";
  switch (failure_) {
    case Failure::None:
      return {};
    case Failure::SpecMismatch:
      return who + "linearization point response does not conform to MutexQueue";
    case Failure::ResponseMismatch:
      return who + "returned value differs from the linearization point's response";
    case Failure::MissingLinPoint:
      return who + "operation returned without a linearization point";
    case Failure::DoubleLinPoint:
      return who + "two linearization points in one operation execution";
  }
  return {};
}

void LinearizationTracker::encode(std::vector<std::int64_t>& out) const {
  out.push_back(state_.broken() ? -1 : static_cast<std::int64_t>(state_.queue().size()));
  for (ProcessId q : state_.queue()) out.push_back(q);
  out.push_back(static_cast<std::int64_t>(state_.visible()));
  for (const Call& c : calls_) {
    out.push_back((c.active ? 1 : 0) | (c.linearized ? 2 : 0) | (static_cast<int>(c.op) << 2));
    out.push_back(static_cast<std::int64_t>(c.lp_response.kind()) * 1000 + c.lp_response.process());
  }
  out.push_back((bad_op_ ? 1 : 0) | (static_cast<int>(failure_) << 1));
}

}  // namespace qlock
