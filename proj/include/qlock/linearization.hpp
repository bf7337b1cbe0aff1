#pragma once

// Incremental construction of the candidate linearization: operations are
// applied to the sequential MutexQueue in the order of their linearization
// points, and every response is checked against the sequential one.

#include <cstdint>
#include <string>
#include <vector>

#include "qlock/history.hpp"
#include "qlock/mutex_queue.hpp"

namespace qlock {

class LinearizationTracker {
 public:
  enum class Failure : std::uint8_t {
    None,
    /// Linearization point response differs from the sequential response.
    SpecMismatch,
    /// Returned value differs from the one fixed at the linearization point.
    ResponseMismatch,
    /// Returned without passing a linearization point.
    MissingLinPoint,
    /// A second linearization point inside one operation execution.
    DoubleLinPoint,
  };

  explicit LinearizationTracker(int n = 0);

  void invoke(ProcessId p, MqOp op);
  void lin_point(ProcessId p, const LinPoint& lp);
  void respond(ProcessId p, const MqResponse& ret);
  /// An operation on an atomic MutexQueue: invocation, linearization and
  /// response in one step.
  void atomic(ProcessId p, MqOp op, const MqResponse& ret);

  /// Linearized state of M at the end of the history seen so far.
  const MutexQueueState& state() const { return state_; }
  /// An operation violated the access etiquette; from here on the
  /// history is linearized through the broken state.
  bool bad_op_seen() const { return bad_op_; }
  /// Issuer of the first bad operation, or -1.
  ProcessId bad_process() const { return bad_process_; }
  bool ok() const { return failure_ == Failure::None; }
  Failure failure() const { return failure_; }
  ProcessId failing_process() const { return failing_; }
  std::string describe_failure() const;

  /// Pending call of p that has passed its linearization point.
  bool linearized(ProcessId p) const { return calls_[static_cast<std::size_t>(p)].linearized; }
  bool pending(ProcessId p) const { return calls_[static_cast<std::size_t>(p)].active; }

  void encode(std::vector<std::int64_t>& out) const;

 private:
  struct Call {
    bool active = false;
    bool linearized = false;
    MqOp op = MqOp::Enqueue;
    MqResponse lp_response = MqResponse::ok();
  };

  void fail(Failure f, ProcessId p);
  void check_pending_etiquette();
  void enter_broken(ProcessId p);

  std::vector<Call> calls_;
  MutexQueueState state_;
  bool bad_op_ = false;
  ProcessId bad_process_ = -1;
  Failure failure_ = Failure::None;
  ProcessId failing_ = -1;
};

}  // namespace qlock
