#include "qlock/sim_memory.hpp"

namespace qlock {

const char* to_string(MemoryModel m) { return m == MemoryModel::Dsm ? "dsm" : "cc"; }

const char* to_string(AccessKind k) {
  switch (k) {
    case AccessKind::Read:
      return "read";
    case AccessKind::Write:
      return "write";
    case AccessKind::FetchInc:
      return "F&I";
    case AccessKind::FetchStore:
      return "F&S";
  }
  return "?";
}

CellId MemoryLayout::add(CellInfo info) {
  if (info.wrap_bits && (*info.wrap_bits < 1 || *info.wrap_bits > 62)) {
    throw std::invalid_argument("counter width must be in [1, 62] bits");
  }
  cells_.push_back(std::move(info));
  return CellId{static_cast<std::uint32_t>(cells_.size() - 1)};
}

Word apply_primitive(const CellInfo& info, Word& value, const Access& access) {
  const Word previous = value;
  switch (access.kind) {
    case AccessKind::Read:
      break;
    case AccessKind::Write:
      value = access.arg;
      break;
    case AccessKind::FetchInc:
      if (info.kind != CellKind::FaiCounter) throw CellTypeMismatch("F&I on non-counter cell " + info.name);
      value.first += 1;
      if (info.wrap_bits) value.first &= (std::int64_t{1} << *info.wrap_bits) - 1;
      break;
    case AccessKind::FetchStore:
      if (info.kind != CellKind::FasCell) throw CellTypeMismatch("F&S on non-swap cell " + info.name);
      value = access.arg;
      break;
  }
  return previous;
}

SimMemory::SimMemory(std::shared_ptr<const MemoryLayout> layout, int nprocs, MemoryModel model)
    : layout_(std::move(layout)), model_(model), nprocs_(nprocs) {
  values_.reserve(layout_->size());
  for (const auto& c : layout_->cells()) values_.push_back(c.initial);
  caches_.assign(layout_->size(), 0);
}

AccessResult SimMemory::apply(ProcessId p, CellId cell, const Access& access) {
  const CellInfo& info = layout_->info(cell);
  AccessResult result;
  result.ret = apply_primitive(info, values_[cell.index], access);

  if (model_ == MemoryModel::Dsm) {
    result.cost = info.home == p ? 0 : 1;
    return result;
  }

  ProcSet& holders = caches_[cell.index];
  if (access.kind == AccessKind::Read) {
    result.cost = contains(holders, p) ? 0 : 1;
    holders |= proc_bit(p);
  } else {
    // Mutations are always remote and invalidate every other copy.
    result.cost = 1;
    holders &= proc_bit(p);
  }
  return result;
}

void SimMemory::encode(std::vector<std::int64_t>& out) const {
  for (const Word& w : values_) {
    out.push_back(w.first);
    out.push_back(w.second);
  }
  if (model_ == MemoryModel::Cc) {
    for (ProcSet s : caches_) out.push_back(static_cast<std::int64_t>(s));
  }
}

}  // namespace qlock
