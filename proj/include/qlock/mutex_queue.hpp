#pragma once

// Sequential specification of the N-process MutexQueue type.
//
// A normal state is a pair (Q, V): Q is the sequence of queued processes and
// V the subset of them that have made themselves visible with isHead(). Any
// operation that breaks the access etiquette moves the object to the broken
// state, after which every response is arbitrary.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlock {

using ProcessId = int;

/// Upper bound on N for everything that stores process sets as bitmasks.
inline constexpr int kMaxProcs = 64;

using ProcSet = std::uint64_t;

constexpr ProcSet proc_bit(ProcessId p) { return ProcSet{1} << p; }
constexpr bool contains(ProcSet s, ProcessId p) { return (s & proc_bit(p)) != 0; }

enum class MqOp : std::uint8_t { Enqueue, IsHead, Dequeue };

const char* to_string(MqOp op);
std::optional<MqOp> parse_mq_op(const std::string& text);

class MqResponse {
 public:
  enum class Kind : std::uint8_t { Ok, True, False, NoSuccessor, Pid, Arbitrary };

  static constexpr MqResponse ok() { return MqResponse(Kind::Ok); }
  static constexpr MqResponse boolean(bool b) { return MqResponse(b ? Kind::True : Kind::False); }
  static constexpr MqResponse no_successor() { return MqResponse(Kind::NoSuccessor); }
  static constexpr MqResponse pid(ProcessId p) { return MqResponse(Kind::Pid, p); }
  static constexpr MqResponse arbitrary() { return MqResponse(Kind::Arbitrary); }

  /// Maps a dequeue() return value (-1 or a process id) to a response.
  static constexpr MqResponse successor(int value) {
    return value < 0 ? no_successor() : pid(value);
  }

  constexpr Kind kind() const { return kind_; }
  constexpr ProcessId process() const { return pid_; }

  /// Wildcard comparison: Arbitrary on either side matches anything.
  constexpr bool matches(const MqResponse& other) const {
    return kind_ == Kind::Arbitrary || other.kind_ == Kind::Arbitrary || *this == other;
  }

  constexpr bool operator==(const MqResponse&) const = default;

  std::string str() const;
  static std::optional<MqResponse> parse(const std::string& text);

 private:
  constexpr explicit MqResponse(Kind k, ProcessId p = -1) : kind_(k), pid_(p) {}

  Kind kind_ = Kind::Ok;
  ProcessId pid_ = -1;
};

std::ostream& operator<<(std::ostream& os, const MqResponse& r);

/// Thrown when a query that is only defined on normal states is applied to
/// the broken state.
class BrokenStateQuery : public std::logic_error {
 public:
  BrokenStateQuery() : std::logic_error("query on broken MutexQueue state") {}
};

class MutexQueueState {
 public:
  /// The initial state (<>, {}).
  MutexQueueState() = default;

  static MutexQueueState broken_state();
  /// Builds an arbitrary normal state; used by tests and checkers.
  static MutexQueueState normal(std::vector<ProcessId> queue, ProcSet visible);

  bool broken() const { return broken_; }
  const std::vector<ProcessId>& queue() const { return queue_; }
  ProcSet visible() const { return visible_; }

  bool operator==(const MutexQueueState&) const = default;

  std::string str() const;

 private:
  bool broken_ = false;
  std::vector<ProcessId> queue_;
  ProcSet visible_ = 0;
};

std::ostream& operator<<(std::ostream& os, const MutexQueueState& s);

struct MqTransition {
  MutexQueueState state;
  MqResponse response;
};

/// The transition mapping. Etiquette violations and anything applied to the
/// broken state yield (broken, Arbitrary).
MqTransition apply(const MutexQueueState& state, ProcessId p, MqOp op);

/// True iff apply(state, p, op) ends in the broken state.
bool is_etiquette_violation(const MutexQueueState& state, ProcessId p, MqOp op);

// Queries on normal states; each throws BrokenStateQuery on the broken state.
bool empty(const MutexQueueState& s);
std::optional<ProcessId> head(const MutexQueueState& s);
std::optional<ProcessId> pred(const MutexQueueState& s, ProcessId p);
std::optional<ProcessId> succ(const MutexQueueState& s, ProcessId p);
ProcSet qprocs(const MutexQueueState& s);
ProcSet visprocs(const MutexQueueState& s);

}  // namespace qlock
