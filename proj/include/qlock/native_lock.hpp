#pragma once

// The queue lock on real hardware atomics: GQME over either MutexQueue
// implementation, one cache line per shared word. All atomics are
// sequentially consistent.

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlock/mqfi.hpp"
#include "qlock/mutex_queue.hpp"

namespace qlock {

enum class NativeImpl : std::uint8_t { Mqfi, Mqfs };

const char* to_string(NativeImpl impl);
std::optional<NativeImpl> parse_native_impl(const std::string& text);

struct NativeFaults {
  /// Skip Wait[p] := true after spinning.
  bool skip_wait_reset = false;
};

/// Misuse of the lock by its caller: unregistered thread, double acquire,
/// release without acquire, too many threads.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <class T>
struct alignas(64) Padded {
  T value{};
};

class NativeLock {
 public:
  NativeLock(NativeImpl impl, int n, CounterMode mode = {}, NativeFaults faults = {});

  NativeImpl impl() const { return impl_; }
  int capacity() const { return n_; }

  /// Hands out the next process id. Not thread-safe; call before the
  /// threads start.
  ProcessId register_thread();

  /// Entry protocol. Returns false only if abort() was called while
  /// waiting, in which case the lock is unusable.
  bool acquire(ProcessId p);
  /// Exit protocol.
  void release(ProcessId p);

  /// The two halves of acquire(): the enqueue, then isHead and the busy
  /// wait. Exposed so that callers can bracket the doorway.
  void doorway(ProcessId p);
  bool wait_turn(ProcessId p);

  /// Releases every spinning thread; used by watchdogs.
  void abort() { aborted_.store(true); }

  /// Most busy-wait iterations of p in one passage.
  std::uint64_t max_spin(ProcessId p) const { return threads_[check(p)].value.max_spin; }

 private:
  enum class Stage : std::uint8_t { Idle, Entering, Holding };

  struct ThreadState {
    Stage stage = Stage::Idle;
    int index = 0;
    std::uint32_t my_idx = 0;
    std::uint32_t prev_idx = 0;
    std::uint64_t max_spin = 0;
  };

  std::size_t check(ProcessId p) const;

  void enqueue(ThreadState& t, ProcessId p);
  bool is_head(ThreadState& t, ProcessId p);
  /// Successor to signal, or -1.
  int dequeue(ThreadState& t, ProcessId p);

  NativeImpl impl_;
  int n_;
  CounterMode mode_;
  NativeFaults faults_;
  int registered_ = 0;
  std::atomic<bool> aborted_{false};

  std::unique_ptr<Padded<std::atomic<bool>>[]> wait_;
  std::unique_ptr<Padded<ThreadState>[]> threads_;

  // MQFI
  Padded<std::atomic<std::uint64_t>> ctr_;
  std::unique_ptr<Padded<std::atomic<std::int64_t>>[]> stat_;
  std::unique_ptr<Padded<std::atomic<int>>[]> proc_;

  // MQFS: each entry packs (slot, pid) into one word.
  std::unique_ptr<Padded<std::atomic<std::uint64_t>>[]> queue_;
  Padded<std::atomic<std::uint32_t>> last_;
};

struct StressConfig {
  NativeImpl impl = NativeImpl::Mqfi;
  int threads = 8;
  int passages = 10000;
  CounterMode counter;
  NativeFaults faults;
  /// Abort when no passage completes for this long.
  double watchdog_seconds = 10.0;
};

struct StressReport {
  NativeImpl impl = NativeImpl::Mqfi;
  int threads = 0;
  int passages = 0;
  std::uint64_t expected = 0;
  std::uint64_t observed = 0;
  /// CS entries that overtook a passage whose doorway had finished before
  /// theirs began.
  std::uint64_t fcfs_violations = 0;
  /// Entries that found another thread in the CS.
  std::uint64_t me_violations = 0;
  std::uint64_t max_spin_iterations = 0;
  double wall_seconds = 0;
  bool hang = false;

  bool pass() const { return !hang && observed == expected && fcfs_violations == 0 && me_violations == 0; }
};

/// Runs `threads` threads through `passages` passages each; the CS
/// increments a plain counter.
StressReport stress(const StressConfig& config);

}  // namespace qlock
