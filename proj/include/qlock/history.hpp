#pragma once

// Steps and execution histories. A history interleaves atomic steps on base
// objects (ATOM) with invocation/response steps (INV/RES) on an implemented
// MutexQueue; for a system over an atomic MutexQueue the operations on M are
// themselves ATOM steps.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qlock/mutex_queue.hpp"
#include "qlock/sim_memory.hpp"

namespace qlock {

/// The operation an ATOM step linearizes, with its uniquely determined
/// response.
struct LinPoint {
  MqOp op = MqOp::Enqueue;
  MqResponse response = MqResponse::ok();

  bool operator==(const LinPoint&) const = default;
};

struct BaseStep {
  CellId cell;
  Access access;
  Word ret;
  int cost = 0;
  std::optional<LinPoint> lin_point;
};

/// ATOM step on an atomic MutexQueue object.
struct ObjectStep {
  MqOp op = MqOp::Enqueue;
  MqResponse ret = MqResponse::ok();
  int cost = 0;
};

struct InvStep {
  MqOp op = MqOp::Enqueue;
};

struct ResStep {
  MqResponse ret = MqResponse::ok();
};

struct Step {
  ProcessId proc = 0;
  std::variant<BaseStep, ObjectStep, InvStep, ResStep> event;
};

/// Outcome of one scheduler step taken inside an access procedure.
struct ProcedureStep {
  bool done = false;
  MqResponse response = MqResponse::ok();
};

class History {
 public:
  History() = default;
  explicit History(std::shared_ptr<const MemoryLayout> layout) : layout_(std::move(layout)) {}

  void push(Step s) { steps_.push_back(std::move(s)); }
  void truncate(std::size_t n) { steps_.resize(n); }

  const std::vector<Step>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const Step& operator[](std::size_t i) const { return steps_[i]; }

  const std::shared_ptr<const MemoryLayout>& layout() const { return layout_; }

  /// Line-oriented dump: `ATOM p cell op ret cost`, `INV p M op`,
  /// `RES p M ret`.
  void dump(std::ostream& os) const;
  std::string dump() const;

  /// The steps of one process (H|p).
  History project(ProcessId p) const;

 private:
  std::shared_ptr<const MemoryLayout> layout_;
  std::vector<Step> steps_;
};

std::string format_word(const CellInfo& info, const Word& w);
std::string format_step(const MemoryLayout* layout, const Step& s);

/// Checks the well-formedness conditions: base objects conform to their
/// sequential types, invocations and responses nest per process, and steps
/// on object-internal cells occur only inside an invocation. Returns a
/// description of the first violation, if any.
std::optional<std::string> check_well_formed(const History& h, int nprocs);

}  // namespace qlock
