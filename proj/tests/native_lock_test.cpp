#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "qlock/native_lock.hpp"

namespace {

using namespace qlock;

class NativeLockTest : public ::testing::TestWithParam<NativeImpl> {};

TEST_P(NativeLockTest, SoloPassages) {
  NativeLock lock(GetParam(), 1);
  const ProcessId p = lock.register_thread();
  int counter = 0;
  for (int k = 0; k < 1000; ++k) {
    ASSERT_TRUE(lock.acquire(p));
    ++counter;
    lock.release(p);
  }
  EXPECT_EQ(counter, 1000);
  EXPECT_EQ(lock.max_spin(p), 0u);
}

TEST_P(NativeLockTest, ContractViolations) {
  NativeLock lock(GetParam(), 2);
  const ProcessId p = lock.register_thread();
  EXPECT_THROW(lock.release(p), ContractViolation);
  EXPECT_THROW(lock.acquire(1), ContractViolation);
  ASSERT_TRUE(lock.acquire(p));
  EXPECT_THROW(lock.acquire(p), ContractViolation);
  lock.release(p);
  lock.register_thread();
  EXPECT_THROW(lock.register_thread(), ContractViolation);
}

TEST_P(NativeLockTest, SingleThreadStressHasNoInversions) {
  StressConfig c;
  c.impl = GetParam();
  c.threads = 1;
  c.passages = 500;
  const StressReport r = stress(c);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.observed, 500u);
}

TEST_P(NativeLockTest, FourThreads) {
  StressConfig c;
  c.impl = GetParam();
  c.threads = 4;
  c.passages = 1000;
  const StressReport r = stress(c);
  EXPECT_EQ(r.observed, 4000u);
  EXPECT_EQ(r.fcfs_violations, 0u);
  EXPECT_EQ(r.me_violations, 0u);
  EXPECT_FALSE(r.hang);
}

TEST_P(NativeLockTest, HandoffBetweenTwoThreads) {
  NativeLock lock(GetParam(), 2);
  const ProcessId a = lock.register_thread();
  const ProcessId b = lock.register_thread();
  ASSERT_TRUE(lock.acquire(a));
  std::atomic<bool> b_in{false};
  std::thread t([&] {
    lock.acquire(b);
    b_in.store(true);
    lock.release(b);
  });
  // b has to wait while a holds the lock.
  for (int k = 0; k < 100; ++k) std::this_thread::yield();
  EXPECT_FALSE(b_in.load());
  lock.release(a);
  t.join();
  EXPECT_TRUE(b_in.load());
}

INSTANTIATE_TEST_SUITE_P(Impl, NativeLockTest, ::testing::Values(NativeImpl::Mqfi, NativeImpl::Mqfs),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(NativeLock, WrappingCounter) {
  StressConfig c;
  c.impl = NativeImpl::Mqfi;
  c.threads = 4;
  c.passages = 2000;
  c.counter = CounterMode::wrap(2);
  EXPECT_TRUE(stress(c).pass());
  EXPECT_THROW(NativeLock(NativeImpl::Mqfi, 3, CounterMode::wrap(2)), std::invalid_argument);
}

TEST(NativeLock, SkippedWaitResetAdmitsTwoHolders) {
  NativeLock lock(NativeImpl::Mqfs, 2, {}, NativeFaults{.skip_wait_reset = true});
  const ProcessId a = lock.register_thread();
  const ProcessId b = lock.register_thread();
  // Repeat until b has been signalled out of its spin at least once.
  while (lock.max_spin(b) == 0) {
    ASSERT_TRUE(lock.acquire(a));
    std::thread t([&] {
      lock.acquire(b);
      lock.release(b);
    });
    for (int k = 0; k < 100; ++k) std::this_thread::yield();
    lock.release(a);
    t.join();
  }
  // b was signalled once and never re-armed its flag, so it walks past a.
  ASSERT_TRUE(lock.acquire(a));
  std::atomic<bool> b_in{false};
  std::thread u([&] {
    lock.acquire(b);
    b_in.store(true);
  });
  u.join();
  EXPECT_TRUE(b_in.load());
}

}  // namespace
