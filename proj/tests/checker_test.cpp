#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "qlock/checker.hpp"
#include "qlock/explore.hpp"
#include "qlock/system.hpp"

namespace {

using namespace qlock;

SeqOp op(ProcessId p, MqOp o, MqResponse r) { return {p, o, r}; }

// History on an atomic queue built step by step.
struct AtomicHistory {
  History h{std::make_shared<MemoryLayout>()};

  AtomicHistory& atom(ProcessId p, MqOp o, MqResponse r) {
    h.push({p, ObjectStep{o, r, 1}});
    return *this;
  }
};

// History of INV/RES pairs only; lets the oracle be exercised on arbitrary
// real-time orders.
struct OpHistory {
  History h{std::make_shared<MemoryLayout>()};

  OpHistory& inv(ProcessId p, MqOp o) {
    h.push({p, InvStep{o}});
    return *this;
  }
  OpHistory& res(ProcessId p, MqResponse r) {
    h.push({p, ResStep{r}});
    return *this;
  }
};

TEST(Candidate, EmptyHistory) {
  EXPECT_TRUE(build_candidate(History{}).empty());
  EXPECT_TRUE(conforms({}));
}

TEST(Candidate, SoloMqfiEnqueueIsHead) {
  SystemConfig c;
  c.impl = ImplKind::Mqfi;
  c.n = 1;
  c.scripts = {{MqOp::Enqueue, MqOp::IsHead}};
  const qlock::Run r = replay(System(c), {0, 0, 0});
  const SeqHistory seq = build_candidate(r.history);
  ASSERT_EQ(seq.size(), 2u);
  EXPECT_EQ(seq[0], op(0, MqOp::Enqueue, MqResponse::ok()));
  EXPECT_EQ(seq[1], op(0, MqOp::IsHead, MqResponse::boolean(true)));
  EXPECT_TRUE(conforms(seq));

  // Cut between isHead's invocation and its Stat F&I.
  const qlock::Run cut = replay(System(c), {0, 0});
  EXPECT_EQ(build_candidate(cut.history).size(), 1u);
}

TEST(Candidate, TwoPointsInOneOperationIsAnError) {
  auto layout = std::make_shared<MemoryLayout>();
  const CellId x = layout->add({"X", CellKind::FaiCounter, {}, std::nullopt});
  History h(layout);
  const LinPoint lp{MqOp::Enqueue, MqResponse::ok()};
  h.push({0, InvStep{MqOp::Enqueue}});
  h.push({0, BaseStep{x, Access::fetch_inc(), {0, 0}, 1, lp}});
  h.push({0, BaseStep{x, Access::fetch_inc(), {1, 0}, 1, lp}});
  EXPECT_THROW(build_candidate(h), ClassificationError);
}

TEST(Conforms, Examples) {
  EXPECT_TRUE(conforms({op(0, MqOp::Enqueue, MqResponse::ok()), op(0, MqOp::IsHead, MqResponse::boolean(true))}));
  EXPECT_FALSE(conforms({op(0, MqOp::Enqueue, MqResponse::ok()), op(0, MqOp::IsHead, MqResponse::boolean(false))}));
  // isHead by a process that never enqueued breaks the object, and the
  // offending call already answers with the wildcard.
  EXPECT_TRUE(conforms({op(0, MqOp::Enqueue, MqResponse::ok()), op(1, MqOp::IsHead, MqResponse::boolean(true))}));
  EXPECT_TRUE(conforms({op(0, MqOp::Enqueue, MqResponse::ok()), op(1, MqOp::IsHead, MqResponse::arbitrary()),
                        op(0, MqOp::Dequeue, MqResponse::arbitrary())}));
  EXPECT_FALSE(conforms({op(0, MqOp::Enqueue, MqResponse::boolean(true))}));
}

TEST(Linearize, CaseOneWildcardAfterABadOperation) {
  AtomicHistory a;
  a.atom(0, MqOp::Enqueue, MqResponse::ok())
      .atom(1, MqOp::IsHead, MqResponse::arbitrary())
      .atom(0, MqOp::IsHead, MqResponse::boolean(false));
  const Linearization lin = linearize(a.h, 2);
  ASSERT_TRUE(lin.bad_op.has_value());
  EXPECT_EQ(*lin.bad_op, 1u);
  EXPECT_TRUE(lin.conforms);
  ASSERT_EQ(lin.seq.size(), 3u);
  EXPECT_EQ(lin.seq[2].response.kind(), MqResponse::Kind::Arbitrary);
}

TEST(Linearize, GoodHistoryIsItsCandidate) {
  AtomicHistory a;
  a.atom(0, MqOp::Enqueue, MqResponse::ok())
      .atom(1, MqOp::Enqueue, MqResponse::ok())
      .atom(0, MqOp::IsHead, MqResponse::boolean(true))
      .atom(1, MqOp::IsHead, MqResponse::boolean(false))
      .atom(0, MqOp::Dequeue, MqResponse::pid(1));
  const Linearization lin = linearize(a.h, 2);
  EXPECT_FALSE(lin.bad_op.has_value());
  EXPECT_TRUE(lin.conforms);
  EXPECT_EQ(lin.seq, build_candidate(a.h));
}

TEST(Linearize, WrongResponseFails) {
  AtomicHistory a;
  a.atom(0, MqOp::Enqueue, MqResponse::ok()).atom(0, MqOp::IsHead, MqResponse::boolean(false));
  EXPECT_FALSE(linearize(a.h, 1).conforms);
}

TEST(Oracle, EmptyAndSequential) {
  EXPECT_EQ(brute_force_linearizable(History{}), OracleResult::Linearizable);
  OpHistory o;
  o.inv(0, MqOp::Enqueue).res(0, MqResponse::ok()).inv(0, MqOp::IsHead).res(0, MqResponse::boolean(true));
  EXPECT_EQ(brute_force_linearizable(o.h), OracleResult::Linearizable);
}

TEST(Oracle, OverlapAllowsReordering) {
  // 1's isHead overlaps 0's enqueue; 1 can still be head only if its own
  // enqueue comes first, which real time allows.
  OpHistory o;
  o.inv(0, MqOp::Enqueue)
      .inv(1, MqOp::Enqueue)
      .res(1, MqResponse::ok())
      .inv(1, MqOp::IsHead)
      .res(1, MqResponse::boolean(true))
      .res(0, MqResponse::ok());
  EXPECT_EQ(brute_force_linearizable(o.h), OracleResult::Linearizable);
}

TEST(Oracle, DequeueMissingAVisibleSuccessor) {
  // 1's isHead returned false before 0's dequeue was invoked, so 1 is
  // already visible behind 0 and dequeue must return 1, not -1.
  OpHistory o;
  o.inv(0, MqOp::Enqueue)
      .res(0, MqResponse::ok())
      .inv(0, MqOp::IsHead)
      .res(0, MqResponse::boolean(true))
      .inv(1, MqOp::Enqueue)
      .res(1, MqResponse::ok())
      .inv(1, MqOp::IsHead)
      .res(1, MqResponse::boolean(false))
      .inv(0, MqOp::Dequeue)
      .res(0, MqResponse::no_successor());
  EXPECT_EQ(brute_force_linearizable(o.h), OracleResult::NotLinearizable);
}

TEST(Oracle, PendingOperationsMayTakeEffect) {
  // 1's pending enqueue must be included for 0's isHead to be false.
  OpHistory o;
  o.inv(1, MqOp::Enqueue).inv(0, MqOp::Enqueue).res(0, MqResponse::ok()).inv(0, MqOp::IsHead).res(0, MqResponse::boolean(false));
  EXPECT_EQ(brute_force_linearizable(o.h), OracleResult::Linearizable);
}

TEST(Oracle, CapIsExplicit) {
  OpHistory o;
  for (int k = 0; k < 5; ++k) {
    o.inv(0, MqOp::Enqueue).res(0, MqResponse::ok());
    o.inv(0, MqOp::IsHead).res(0, MqResponse::boolean(true));
    o.inv(0, MqOp::Dequeue).res(0, MqResponse::no_successor());
  }
  EXPECT_EQ(brute_force_linearizable(o.h, 12), OracleResult::Skipped);
  EXPECT_EQ(brute_force_linearizable(o.h, 15), OracleResult::Linearizable);
}

TEST(Oracle, OperationsRecoveredFromHistory) {
  OpHistory o;
  o.inv(0, MqOp::Enqueue).inv(1, MqOp::Enqueue).res(0, MqResponse::ok());
  const auto ops = operations(o.h);
  ASSERT_EQ(ops.size(), 2u);
  EXPECT_EQ(ops[0].proc, 0);
  EXPECT_TRUE(ops[0].response.has_value());
  EXPECT_FALSE(ops[1].response.has_value());
}

// The candidate of a prefix is a prefix of the candidate of the history.
TEST(Candidate, PrefixMonotone) {
  for (ImplKind impl : {ImplKind::Mqfi, ImplKind::Mqfs}) {
    SystemConfig c;
    c.impl = impl;
    c.n = 3;
    c.passages = 2;
    const System root(c);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const qlock::Run r = run_random(root, seed, 10'000);
      const SeqHistory full = build_candidate(r.history);
      for (std::size_t cut = 0; cut <= r.history.size(); cut += 3) {
        History prefix = r.history;
        prefix.truncate(cut);
        const SeqHistory part = build_candidate(prefix);
        ASSERT_LE(part.size(), full.size());
        EXPECT_TRUE(std::equal(part.begin(), part.end(), full.begin()));
      }
    }
  }
}

TEST(Checker, MqfiSmallBoundsPass) {
  SystemConfig c;
  c.impl = ImplKind::Mqfi;
  const PropertyReport r = check_exhaustive(c);
  EXPECT_TRUE(r.all_pass()) << r.first_failure().value_or("");
  EXPECT_EQ(r.verdicts.at(prop::kStatValues).status, Status::Pass);
  EXPECT_EQ(r.verdicts.at(prop::kLinearizable).status, Status::Pass);
  EXPECT_EQ(r.verdicts.count(prop::kInvariant1), 0u);
}

TEST(Checker, AtomicSmallBoundsPass) {
  SystemConfig c;
  const PropertyReport r = check_exhaustive(c);
  EXPECT_TRUE(r.all_pass());
  EXPECT_EQ(r.verdicts.at(prop::kInvariant1).status, Status::Pass);
}

TEST(Checker, SkippedStatResetIsCaught) {
  SystemConfig c;
  c.impl = ImplKind::Mqfi;
  c.passages = 2;
  c.mutation = Mutation::SkipStatReset;
  CheckOptions o;
  o.stop_on_failure = true;
  const PropertyReport r = check_exhaustive(c, o);
  const Verdict& v = r.verdicts.at(prop::kStatValues);
  EXPECT_EQ(v.status, Status::Fail);
  ASSERT_TRUE(v.counterexample.has_value());
  // The counterexample replays to the same failure.
  const PropertyReport again = check_schedule(c, *v.counterexample, o);
  EXPECT_EQ(again.verdicts.at(prop::kStatValues).status, Status::Fail);
}

TEST(Checker, RmrBoundIsEnforced) {
  SystemConfig c;
  c.impl = ImplKind::Mqfs;
  CheckOptions o;
  o.rmr_bound = 2;
  EXPECT_EQ(check_exhaustive(c, o).verdicts.at(prop::kRmrBound).status, Status::Fail);
}

TEST(Checker, StateInvariantsHoldOnRandomRuns) {
  for (ImplKind impl : {ImplKind::Mqfi, ImplKind::Mqfs}) {
    SystemConfig c;
    c.impl = impl;
    c.n = 5;
    c.passages = 3;
    if (impl == ImplKind::Mqfi) c.counter = CounterMode::unbounded();
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const PropertyReport r = check_random(c, seed, 100'000);
      EXPECT_TRUE(r.all_pass()) << to_string(impl) << " seed " << seed << ": " << r.first_failure().value_or("");
      EXPECT_EQ(r.metrics.histories, 1u);
    }
  }
}

TEST(Checker, MergeKeepsFirstFailure) {
  PropertyReport a, b;
  a.verdicts["x"] = {Status::Pass, "", std::nullopt};
  b.verdicts["x"] = {Status::Fail, "first", Schedule{0}};
  PropertyReport c;
  c.verdicts["x"] = {Status::Fail, "second", Schedule{1}};
  a.metrics.max_rmr_per_passage = 3;
  b.metrics.max_rmr_per_passage = 5;
  a.metrics.histories = 2;
  b.metrics.histories = 4;
  merge_into(a, b);
  merge_into(a, c);
  EXPECT_EQ(a.verdicts["x"].detail, "first");
  EXPECT_EQ(a.metrics.max_rmr_per_passage, 5);
  EXPECT_EQ(a.metrics.histories, 6u);
}

TEST(Checker, IdenticalRunsGiveIdenticalReports) {
  SystemConfig c;
  c.impl = ImplKind::Mqfs;
  c.n = 3;
  EXPECT_EQ(check_exhaustive(c), check_exhaustive(c));
}

}  // namespace
