#pragma once

// Simulated shared memory: atomic base objects with RMR accounting under the
// distributed shared memory (DSM) and cache-coherent (CC) cost models.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlock/mutex_queue.hpp"

namespace qlock {

/// One machine word. Fetch-and-store cells may hold an ordered pair, which
/// is still read and swapped as a single atomic word.
struct Word {
  std::int64_t first = 0;
  std::int64_t second = 0;

  bool operator==(const Word&) const = default;
};

enum class CellKind : std::uint8_t { Register, FaiCounter, FasCell };

enum class MemoryModel : std::uint8_t { Dsm, Cc };

const char* to_string(MemoryModel m);

struct CellId {
  std::uint32_t index = 0;

  bool operator==(const CellId&) const = default;
};

enum class AccessKind : std::uint8_t { Read, Write, FetchInc, FetchStore };

const char* to_string(AccessKind k);

struct Access {
  AccessKind kind = AccessKind::Read;
  Word arg{};

  static Access read() { return {AccessKind::Read, {}}; }
  static Access write(Word w) { return {AccessKind::Write, w}; }
  static Access fetch_inc() { return {AccessKind::FetchInc, {}}; }
  static Access fetch_store(Word w) { return {AccessKind::FetchStore, w}; }
};

struct AccessResult {
  Word ret;
  int cost = 0;
};

/// Programming error: an access not supported by the cell's type.
class CellTypeMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct CellInfo {
  std::string name;
  CellKind kind = CellKind::Register;
  Word initial{};
  std::optional<ProcessId> home;
  /// Fetch-and-increment counters may wrap at 2^wrap_bits.
  std::optional<int> wrap_bits;
  /// Cells private to a MutexQueue implementation; touched only inside its
  /// access procedures.
  bool object_internal = false;
  /// Values are pairs; affects dumping only.
  bool pair = false;
};

/// Static description of the shared variables of one system.
class MemoryLayout {
 public:
  CellId add(CellInfo info);
  const CellInfo& info(CellId c) const { return cells_.at(c.index); }
  std::size_t size() const { return cells_.size(); }
  const std::vector<CellInfo>& cells() const { return cells_; }

 private:
  std::vector<CellInfo> cells_;
};

/// Applies one primitive to a word per its sequential type; shared by the
/// simulator and the history well-formedness replay.
Word apply_primitive(const CellInfo& info, Word& value, const Access& access);

/// Current contents of the shared memory plus CC cache state. Value type:
/// copying it snapshots the memory.
class SimMemory {
 public:
  SimMemory(std::shared_ptr<const MemoryLayout> layout, int nprocs, MemoryModel model);

  AccessResult apply(ProcessId p, CellId cell, const Access& access);

  const Word& peek(CellId c) const { return values_[c.index]; }
  bool cached(ProcessId p, CellId c) const { return contains(caches_[c.index], p); }
  MemoryModel model() const { return model_; }
  int nprocs() const { return nprocs_; }
  const MemoryLayout& layout() const { return *layout_; }
  const std::shared_ptr<const MemoryLayout>& layout_ptr() const { return layout_; }

  /// Appends a compact encoding of the dynamic state (values and caches).
  void encode(std::vector<std::int64_t>& out) const;

 private:
  std::shared_ptr<const MemoryLayout> layout_;
  MemoryModel model_;
  int nprocs_;
  std::vector<Word> values_;
  /// Per cell, the set of processes holding it in cache (CC only).
  std::vector<ProcSet> caches_;
};

}  // namespace qlock
