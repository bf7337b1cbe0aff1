#include <memory>

#include <gtest/gtest.h>

#include "qlock/history.hpp"
#include "qlock/sim_memory.hpp"

namespace {

using namespace qlock;

struct Fixture {
  std::shared_ptr<MemoryLayout> layout = std::make_shared<MemoryLayout>();
  CellId local, shared, counter, swap;

  Fixture() {
    local = layout->add({"Wait[0]", CellKind::Register, {1, 0}, 0});
    shared = layout->add({"R", CellKind::Register, {0, 0}, std::nullopt});
    counter = layout->add({"Ctr", CellKind::FaiCounter, {0, 0}, std::nullopt});
    swap = layout->add({"S", CellKind::FasCell, {0, 0}, std::nullopt});
  }

  SimMemory memory(MemoryModel m) const { return SimMemory(layout, 2, m); }
};

TEST(SimMemory, DsmCostDependsOnlyOnHome) {
  Fixture f;
  SimMemory mem = f.memory(MemoryModel::Dsm);
  EXPECT_EQ(mem.apply(0, f.local, Access::read()).cost, 0);
  EXPECT_EQ(mem.apply(0, f.local, Access::write({0, 0})).cost, 0);
  EXPECT_EQ(mem.apply(1, f.local, Access::read()).cost, 1);
  EXPECT_EQ(mem.apply(1, f.local, Access::write({1, 0})).cost, 1);
  // No home: remote for everyone, repeated reads included.
  EXPECT_EQ(mem.apply(0, f.shared, Access::read()).cost, 1);
  EXPECT_EQ(mem.apply(0, f.shared, Access::read()).cost, 1);
  EXPECT_EQ(mem.apply(1, f.shared, Access::read()).cost, 1);
}

TEST(SimMemory, CcReadsAreCachedUntilAnotherProcessWrites) {
  Fixture f;
  SimMemory mem = f.memory(MemoryModel::Cc);
  EXPECT_EQ(mem.apply(0, f.shared, Access::read()).cost, 1);
  EXPECT_EQ(mem.apply(0, f.shared, Access::read()).cost, 0);
  EXPECT_TRUE(mem.cached(0, f.shared));

  // A read by someone else does not invalidate.
  EXPECT_EQ(mem.apply(1, f.shared, Access::read()).cost, 1);
  EXPECT_EQ(mem.apply(0, f.shared, Access::read()).cost, 0);

  EXPECT_EQ(mem.apply(1, f.shared, Access::write({5, 0})).cost, 1);
  EXPECT_FALSE(mem.cached(0, f.shared));
  const auto r = mem.apply(0, f.shared, Access::read());
  EXPECT_EQ(r.cost, 1);
  EXPECT_EQ(r.ret, (Word{5, 0}));
}

TEST(SimMemory, CcMutationsAlwaysCostOne) {
  Fixture f;
  SimMemory mem = f.memory(MemoryModel::Cc);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(mem.apply(0, f.swap, Access::fetch_store({k, 0})).cost, 1);
    EXPECT_EQ(mem.apply(0, f.counter, Access::fetch_inc()).cost, 1);
    EXPECT_EQ(mem.apply(0, f.shared, Access::write({k, 0})).cost, 1);
  }
  // RMW results are not cached.
  EXPECT_FALSE(mem.cached(0, f.counter));
  EXPECT_EQ(mem.apply(0, f.counter, Access::read()).cost, 1);
}

TEST(SimMemory, CcRmwInvalidatesOtherCaches) {
  Fixture f;
  SimMemory mem = f.memory(MemoryModel::Cc);
  mem.apply(0, f.counter, Access::read());
  mem.apply(1, f.counter, Access::fetch_inc());
  EXPECT_FALSE(mem.cached(0, f.counter));
  mem.apply(0, f.swap, Access::read());
  mem.apply(1, f.swap, Access::fetch_store({3, 4}));
  EXPECT_FALSE(mem.cached(0, f.swap));
}

TEST(SimMemory, PrimitiveSemantics) {
  Fixture f;
  SimMemory mem = f.memory(MemoryModel::Cc);
  EXPECT_EQ(mem.apply(0, f.counter, Access::fetch_inc()).ret.first, 0);
  EXPECT_EQ(mem.apply(1, f.counter, Access::fetch_inc()).ret.first, 1);
  EXPECT_EQ(mem.peek(f.counter).first, 2);
  EXPECT_EQ(mem.apply(0, f.swap, Access::fetch_store({1, 2})).ret, (Word{0, 0}));
  EXPECT_EQ(mem.apply(1, f.swap, Access::fetch_store({3, 4})).ret, (Word{1, 2}));
  EXPECT_EQ(mem.peek(f.swap), (Word{3, 4}));
}

TEST(SimMemory, WrappingCounter) {
  auto layout = std::make_shared<MemoryLayout>();
  CellInfo info{"Ctr", CellKind::FaiCounter, {6, 0}, std::nullopt, 3};
  const CellId c = layout->add(info);
  SimMemory mem(layout, 1, MemoryModel::Cc);
  std::vector<std::int64_t> seen;
  for (int k = 0; k < 4; ++k) seen.push_back(mem.apply(0, c, Access::fetch_inc()).ret.first);
  EXPECT_EQ(seen, (std::vector<std::int64_t>{6, 7, 0, 1}));
  EXPECT_THROW(layout->add({"bad", CellKind::FaiCounter, {}, std::nullopt, 0}), std::invalid_argument);
}

TEST(SimMemory, TypeMismatchIsAHardFault) {
  Fixture f;
  SimMemory mem = f.memory(MemoryModel::Dsm);
  EXPECT_THROW(mem.apply(0, f.shared, Access::fetch_inc()), CellTypeMismatch);
  EXPECT_THROW(mem.apply(0, f.counter, Access::fetch_store({1, 0})), CellTypeMismatch);
  EXPECT_THROW(mem.apply(0, f.swap, Access::fetch_inc()), CellTypeMismatch);
}

TEST(SimMemory, CopiesAreSnapshots) {
  Fixture f;
  SimMemory a = f.memory(MemoryModel::Cc);
  SimMemory b = a;
  a.apply(0, f.shared, Access::write({9, 0}));
  EXPECT_EQ(b.peek(f.shared), (Word{0, 0}));
  std::vector<std::int64_t> ea, eb;
  a.encode(ea);
  b.encode(eb);
  EXPECT_NE(ea, eb);
}

TEST(History, DumpFormat) {
  Fixture f;
  History h(f.layout);
  h.push({0, InvStep{MqOp::Enqueue}});
  h.push({0, BaseStep{f.counter, Access::fetch_inc(), {0, 0}, 1, std::nullopt}});
  h.push({0, ResStep{MqResponse::ok()}});
  h.push({1, ObjectStep{MqOp::IsHead, MqResponse::boolean(false), 1}});
  EXPECT_EQ(h.dump(),
            "INV 0 M enqueue\n"
            "ATOM 0 Ctr F&I 0 1\n"
            "RES 0 M OK\n"
            "ATOM 1 M isHead false 1\n");
  EXPECT_EQ(h.project(1).size(), 1u);
}

TEST(History, WellFormedness) {
  Fixture f;
  History ok(f.layout);
  ok.push({0, InvStep{MqOp::Enqueue}});
  ok.push({0, BaseStep{f.counter, Access::fetch_inc(), {0, 0}, 1, std::nullopt}});
  ok.push({0, ResStep{MqResponse::ok()}});
  EXPECT_EQ(check_well_formed(ok, 2), std::nullopt);

  History nested(f.layout);
  nested.push({0, InvStep{MqOp::Enqueue}});
  nested.push({0, InvStep{MqOp::IsHead}});
  EXPECT_NE(check_well_formed(nested, 2), std::nullopt);

  History orphan(f.layout);
  orphan.push({1, ResStep{MqResponse::ok()}});
  EXPECT_NE(check_well_formed(orphan, 2), std::nullopt);

  // A recorded return value the cell could not have produced.
  History wrong(f.layout);
  wrong.push({0, BaseStep{f.shared, Access::read(), {7, 0}, 1, std::nullopt}});
  EXPECT_NE(check_well_formed(wrong, 2), std::nullopt);
}

}  // namespace
