#include "qlock/native_lock.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace qlock {

namespace {

constexpr std::uint32_t kNoPid = 0xfffffffe;

std::uint64_t pack(std::uint32_t slot, std::uint32_t pid) { return (std::uint64_t{slot} << 32) | pid; }
std::uint32_t slot_of(std::uint64_t w) { return static_cast<std::uint32_t>(w >> 32); }
std::uint32_t pid_of(std::uint64_t w) { return static_cast<std::uint32_t>(w); }

}  // namespace

const char* to_string(NativeImpl impl) { return impl == NativeImpl::Mqfi ? "mqfi" : "mqfs"; }

std::optional<NativeImpl> parse_native_impl(const std::string& text) {
  if (text == "mqfi") return NativeImpl::Mqfi;
  if (text == "mqfs") return NativeImpl::Mqfs;
  return std::nullopt;
}

NativeLock::NativeLock(NativeImpl impl, int n, CounterMode mode, NativeFaults faults)
    : impl_(impl), n_(n), mode_(mode), faults_(faults) {
  if (n < 1) throw std::invalid_argument("lock capacity must be positive");
  if (impl == NativeImpl::Mqfi) mode.validate(n);
  const auto un = static_cast<std::size_t>(n);
  wait_ = std::make_unique<Padded<std::atomic<bool>>[]>(un);
  threads_ = std::make_unique<Padded<ThreadState>[]>(un);
  for (std::size_t p = 0; p < un; ++p) {
    wait_[p].value.store(true);
    threads_[p].value.my_idx = static_cast<std::uint32_t>(p);
  }
  if (impl == NativeImpl::Mqfi) {
    stat_ = std::make_unique<Padded<std::atomic<std::int64_t>>[]>(un);
    proc_ = std::make_unique<Padded<std::atomic<int>>[]>(un);
    stat_[0].value.store(1);
  } else {
    queue_ = std::make_unique<Padded<std::atomic<std::uint64_t>>[]>(un + 1);
    for (std::size_t i = 0; i <= un; ++i) {
      queue_[i].value.store(pack(static_cast<std::uint32_t>((i + 1) % (un + 1)), kNoPid));
    }
    last_.value.store(static_cast<std::uint32_t>(n));
  }
}

ProcessId NativeLock::register_thread() {
  if (registered_ >= n_) throw ContractViolation("more threads than the lock was built for");
  return registered_++;
}

std::size_t NativeLock::check(ProcessId p) const {
  if (p < 0 || p >= registered_) throw ContractViolation("unregistered process " + std::to_string(p));
  return static_cast<std::size_t>(p);
}

void NativeLock::enqueue(ThreadState& t, ProcessId p) {
  if (impl_ == NativeImpl::Mqfi) {
    t.index = ctr_index(static_cast<std::int64_t>(ctr_.value.fetch_add(1)), mode_, n_);
  } else {
    queue_[t.my_idx].value.store(pack(t.my_idx, static_cast<std::uint32_t>(p)));
    t.prev_idx = last_.value.exchange(t.my_idx);
  }
}

bool NativeLock::is_head(ThreadState& t, ProcessId p) {
  if (impl_ == NativeImpl::Mqfi) {
    const auto i = static_cast<std::size_t>(t.index);
    proc_[i].value.store(p);
    return stat_[i].value.fetch_add(1) == 1;
  }
  const std::uint64_t old = queue_[t.prev_idx].value.exchange(pack(t.my_idx, static_cast<std::uint32_t>(p)));
  return slot_of(old) != t.prev_idx;
}

int NativeLock::dequeue(ThreadState& t, ProcessId p) {
  if (impl_ == NativeImpl::Mqfi) {
    const auto i = static_cast<std::size_t>(t.index);
    const auto next = static_cast<std::size_t>((t.index + 1) % n_);
    stat_[i].value.store(0);
    if (stat_[next].value.fetch_add(1) == 1) return proc_[next].value.load();
    return -1;
  }
  const std::uint64_t old = queue_[t.my_idx].value.exchange(pack(t.prev_idx, static_cast<std::uint32_t>(p)));
  const int ret = slot_of(old) != t.my_idx ? static_cast<int>(pid_of(old)) : -1;
  t.my_idx = t.prev_idx;
  return ret;
}

void NativeLock::doorway(ProcessId p) {
  ThreadState& t = threads_[check(p)].value;
  if (t.stage != Stage::Idle) throw ContractViolation("process " + std::to_string(p) + " acquired twice");
  t.stage = Stage::Entering;
  enqueue(t, p);
}

bool NativeLock::wait_turn(ProcessId p) {
  ThreadState& t = threads_[check(p)].value;
  if (t.stage != Stage::Entering) throw ContractViolation("process " + std::to_string(p) + " skipped the doorway");
  if (!is_head(t, p)) {
    std::atomic<bool>& wait = wait_[static_cast<std::size_t>(p)].value;
    std::uint64_t spins = 0;
    while (wait.load()) {
      if (aborted_.load()) return false;
      ++spins;
      std::this_thread::yield();
    }
    if (!faults_.skip_wait_reset) wait.store(true);
    t.max_spin = std::max(t.max_spin, spins);
  }
  t.stage = Stage::Holding;
  return true;
}

bool NativeLock::acquire(ProcessId p) {
  doorway(p);
  return wait_turn(p);
}

void NativeLock::release(ProcessId p) {
  ThreadState& t = threads_[check(p)].value;
  if (t.stage != Stage::Holding) throw ContractViolation("process " + std::to_string(p) + " released without holding");
  const int next = dequeue(t, p);
  if (next >= 0 && next < n_) wait_[static_cast<std::size_t>(next)].value.store(false);
  t.stage = Stage::Idle;
}

StressReport stress(const StressConfig& config) {
  if (config.threads < 1 || config.passages < 0) throw std::invalid_argument("threads must be positive");
  NativeLock lock(config.impl, config.threads, config.counter, config.faults);
  const std::size_t total = static_cast<std::size_t>(config.threads) * static_cast<std::size_t>(config.passages);

  struct Entry {
    std::uint64_t start = 0;
    std::uint64_t end = 0;
  };
  // Written inside the CS only, in CS order.
  std::vector<Entry> order(total);
  std::uint64_t counter = 0;
  std::atomic<std::uint64_t> tickets{0};
  std::atomic<int> occupancy{0};
  std::atomic<std::uint64_t> me_violations{0};
  std::atomic<std::uint64_t> progress{0};
  std::atomic<bool> go{false};
  std::atomic<int> running{config.threads};

  std::vector<ProcessId> ids;
  for (int k = 0; k < config.threads; ++k) ids.push_back(lock.register_thread());

  auto worker = [&](ProcessId p) {
    while (!go.load()) std::this_thread::yield();
    for (int k = 0; k < config.passages; ++k) {
      const std::uint64_t start = tickets.fetch_add(1);
      lock.doorway(p);
      const std::uint64_t end = tickets.fetch_add(1);
      if (!lock.wait_turn(p)) break;
      if (occupancy.fetch_add(1) != 0) me_violations.fetch_add(1);
      if (counter < total) order[counter] = {start, end};
      ++counter;
      occupancy.fetch_sub(1);
      lock.release(p);
      progress.fetch_add(1);
    }
    running.fetch_sub(1);
  };

  StressReport report;
  report.impl = config.impl;
  report.threads = config.threads;
  report.passages = config.passages;
  report.expected = total;

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::thread> pool;
  for (ProcessId p : ids) pool.emplace_back(worker, p);
  go.store(true);

  // Watchdog: abort when no passage completes within the interval.
  const auto interval = std::chrono::duration<double>(config.watchdog_seconds);
  std::uint64_t seen = 0;
  auto last_move = std::chrono::steady_clock::now();
  while (running.load() > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    const std::uint64_t now_progress = progress.load();
    const auto now = std::chrono::steady_clock::now();
    if (now_progress != seen) {
      seen = now_progress;
      last_move = now;
    } else if (now - last_move > interval) {
      report.hang = true;
      lock.abort();
      break;
    }
  }
  for (std::thread& t : pool) t.join();
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  report.observed = counter;
  report.me_violations = me_violations.load();
  const std::size_t recorded = std::min<std::size_t>(counter, total);
  std::uint64_t max_start = 0;
  for (std::size_t k = 0; k < recorded; ++k) {
    if (k > 0 && order[k].end < max_start) ++report.fcfs_violations;
    max_start = std::max(max_start, order[k].start);
  }
  for (ProcessId p : ids) report.max_spin_iterations = std::max(report.max_spin_iterations, lock.max_spin(p));
  return report;
}

}  // namespace qlock
