#include <algorithm>
#include <deque>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "qlock/mutex_queue.hpp"

namespace {

using namespace qlock;

// Reference transition function written directly from the type definition,
// sharing nothing with the library.
struct RefState {
  bool broken = false;
  std::vector<int> q;
  std::set<int> v;

  bool operator<(const RefState& o) const { return std::tie(broken, q, v) < std::tie(o.broken, o.q, o.v); }
};

// Response encoding: -3 arbitrary, -2 ok, -4 true, -5 false, -1 none, else pid.
int ref_apply(RefState& s, int p, MqOp op) {
  auto in_q = std::find(s.q.begin(), s.q.end(), p) != s.q.end();
  auto breaks = [&] {
    s = RefState{true, {}, {}};
    return -3;
  };
  if (s.broken) return breaks();
  switch (op) {
    case MqOp::Enqueue:
      if (in_q) return breaks();
      s.q.push_back(p);
      return -2;
    case MqOp::IsHead:
      if (!in_q || s.v.count(p)) return breaks();
      s.v.insert(p);
      return s.q.front() == p ? -4 : -5;
    case MqOp::Dequeue:
      if (s.q.empty() || s.q.front() != p || !s.v.count(p)) return breaks();
      s.q.erase(s.q.begin());
      s.v.erase(p);
      if (!s.q.empty() && s.v.count(s.q.front())) return s.q.front();
      return -1;
  }
  return -3;
}

int encode(const MqResponse& r) {
  switch (r.kind()) {
    case MqResponse::Kind::Ok:
      return -2;
    case MqResponse::Kind::True:
      return -4;
    case MqResponse::Kind::False:
      return -5;
    case MqResponse::Kind::NoSuccessor:
      return -1;
    case MqResponse::Kind::Arbitrary:
      return -3;
    case MqResponse::Kind::Pid:
      return r.process();
  }
  return -99;
}

MutexQueueState to_lib(const RefState& s) {
  if (s.broken) return MutexQueueState::broken_state();
  ProcSet v = 0;
  for (int p : s.v) v |= proc_bit(p);
  return MutexQueueState::normal(s.q, v);
}

constexpr MqOp kOps[] = {MqOp::Enqueue, MqOp::IsHead, MqOp::Dequeue};

// Every state reachable from the initial state with n processes.
std::set<RefState> reachable(int n) {
  std::set<RefState> seen{RefState{}};
  std::deque<RefState> todo{RefState{}};
  while (!todo.empty()) {
    RefState s = todo.front();
    todo.pop_front();
    for (int p = 0; p < n; ++p) {
      for (MqOp op : kOps) {
        RefState t = s;
        ref_apply(t, p, op);
        if (seen.insert(t).second) todo.push_back(t);
      }
    }
  }
  return seen;
}

TEST(MutexQueue, TransitionExamples) {
  auto t = apply(MutexQueueState{}, 0, MqOp::Enqueue);
  EXPECT_EQ(t.state, MutexQueueState::normal({0}, 0));
  EXPECT_EQ(t.response, MqResponse::ok());

  t = apply(MutexQueueState::normal({0, 1}, proc_bit(0) | proc_bit(1)), 0, MqOp::Dequeue);
  EXPECT_EQ(t.state, MutexQueueState::normal({1}, proc_bit(1)));
  EXPECT_EQ(t.response, MqResponse::pid(1));

  t = apply(MutexQueueState::normal({0, 1}, proc_bit(0)), 0, MqOp::Dequeue);
  EXPECT_EQ(t.state, MutexQueueState::normal({1}, 0));
  EXPECT_EQ(t.response, MqResponse::no_successor());

  t = apply(MutexQueueState::normal({0}, 0), 1, MqOp::IsHead);
  EXPECT_TRUE(t.state.broken());
  EXPECT_EQ(t.response.kind(), MqResponse::Kind::Arbitrary);
}

TEST(MutexQueue, Queries) {
  EXPECT_TRUE(empty(MutexQueueState{}));
  const auto s = MutexQueueState::normal({2, 0}, proc_bit(2));
  EXPECT_EQ(succ(s, 2), 0);
  EXPECT_EQ(pred(s, 2), std::nullopt);
  EXPECT_EQ(pred(s, 0), 2);
  EXPECT_EQ(succ(s, 0), std::nullopt);
  EXPECT_EQ(head(s), 2);
  EXPECT_EQ(qprocs(s), proc_bit(0) | proc_bit(2));
  EXPECT_EQ(visprocs(s), proc_bit(2));
  EXPECT_EQ(head(MutexQueueState{}), std::nullopt);

  const auto b = MutexQueueState::broken_state();
  EXPECT_THROW(empty(b), BrokenStateQuery);
  EXPECT_THROW(head(b), BrokenStateQuery);
  EXPECT_THROW(pred(b, 0), BrokenStateQuery);
  EXPECT_THROW(succ(b, 0), BrokenStateQuery);
  EXPECT_THROW(qprocs(b), BrokenStateQuery);
  EXPECT_THROW(visprocs(b), BrokenStateQuery);
}

TEST(MutexQueue, EtiquetteExamples) {
  EXPECT_TRUE(is_etiquette_violation(MutexQueueState::normal({0}, 0), 0, MqOp::Enqueue));
  EXPECT_FALSE(is_etiquette_violation(MutexQueueState::normal({0}, proc_bit(0)), 0, MqOp::Dequeue));
  EXPECT_TRUE(is_etiquette_violation(MutexQueueState::normal({0, 1}, proc_bit(0) | proc_bit(1)), 1, MqOp::Dequeue));
  for (MqOp op : kOps) EXPECT_TRUE(is_etiquette_violation(MutexQueueState::broken_state(), 0, op));
}

TEST(MutexQueue, MatchesReferenceOnEveryReachableState) {
  for (int n = 1; n <= 3; ++n) {
    const auto states = reachable(n);
    for (const RefState& s : states) {
      for (int p = 0; p < n; ++p) {
        for (MqOp op : kOps) {
          RefState ref = s;
          const int want = ref_apply(ref, p, op);
          const auto got = apply(to_lib(s), p, op);
          EXPECT_EQ(got.state, to_lib(ref)) << to_lib(s) << " p=" << p << " " << to_string(op);
          EXPECT_EQ(encode(got.response), want);
          EXPECT_EQ(is_etiquette_violation(to_lib(s), p, op), got.state.broken());
        }
      }
    }
  }
}

TEST(MutexQueue, ReachableNormalStatesAreWellFormed) {
  for (int n = 1; n <= 3; ++n) {
    for (const RefState& r : reachable(n)) {
      const auto s = to_lib(r);
      if (s.broken()) continue;
      ProcSet q = 0;
      for (ProcessId p : s.queue()) {
        EXPECT_FALSE(contains(q, p)) << "duplicate in " << s;
        q |= proc_bit(p);
      }
      EXPECT_EQ(s.visible() & ~q, 0u) << "visible process outside the queue in " << s;
    }
  }
}

TEST(MutexQueue, DequeueOnlyNamesVisibleProcesses) {
  for (const RefState& r : reachable(3)) {
    const auto s = to_lib(r);
    if (s.broken()) continue;
    for (ProcessId p = 0; p < 3; ++p) {
      const auto t = apply(s, p, MqOp::Dequeue);
      if (t.response.kind() == MqResponse::Kind::Pid) EXPECT_TRUE(contains(s.visible(), t.response.process()));
    }
  }
}

TEST(MutexQueue, ReachableStateCountsForSmallN) {
  // By hand: (<>,{}), (<0>,{}), (<0>,{0}), Broken.
  EXPECT_EQ(reachable(1).size(), 4u);
}

TEST(MutexQueue, BrokenIsAbsorbing) {
  auto s = MutexQueueState::broken_state();
  for (ProcessId p = 0; p < 3; ++p) {
    for (MqOp op : kOps) {
      const auto t = apply(s, p, op);
      EXPECT_TRUE(t.state.broken());
      EXPECT_TRUE(t.response.matches(MqResponse::pid(2)));
      EXPECT_TRUE(t.response.matches(MqResponse::boolean(false)));
    }
  }
}

TEST(MutexQueue, ResponseTextRoundTrip) {
  for (const MqResponse r : {MqResponse::ok(), MqResponse::boolean(true), MqResponse::boolean(false),
                             MqResponse::no_successor(), MqResponse::pid(0), MqResponse::pid(17), MqResponse::arbitrary()}) {
    EXPECT_EQ(MqResponse::parse(r.str()), r);
  }
  EXPECT_EQ(MqResponse::parse("x"), std::nullopt);
  for (MqOp op : kOps) EXPECT_EQ(parse_mq_op(to_string(op)), op);
}

}  // namespace
