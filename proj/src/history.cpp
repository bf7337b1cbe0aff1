#include "qlock/history.hpp"

#include <ostream>
#include <sstream>

#include "qlock/detail/overloaded.hpp"

namespace qlock {

namespace {

using detail::overloaded;

std::string format_access(const CellInfo& info, const Access& a) {
  switch (a.kind) {
    case AccessKind::Read:
    case AccessKind::FetchInc:
      return to_string(a.kind);
    case AccessKind::Write:
    case AccessKind::FetchStore:
      return std::string(to_string(a.kind)) + "(" + format_word(info, a.arg) + ")";
  }
  return "?";
}

}  // namespace

std::string format_word(const CellInfo& info, const Word& w) {
  if (!info.pair) return std::to_string(w.first);
  std::string second = w.second < 0 ? "-" : std::to_string(w.second);
  return "(" + std::to_string(w.first) + "," + second + ")";
}

std::string format_step(const MemoryLayout* layout, const Step& s) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const BaseStep& b) {
                   CellInfo fallback{"cell" + std::to_string(b.cell.index)};
                   const CellInfo& info = layout ? layout->info(b.cell) : fallback;
                   os << "ATOM " << s.proc << ' ' << info.name << ' ' << format_access(info, b.access) << ' ';
                   if (b.access.kind == AccessKind::Write) {
                     os << "OK";
                   } else {
                     os << format_word(info, b.ret);
                   }
                   os << ' ' << b.cost;
                 },
                 [&](const ObjectStep& o) {
                   os << "ATOM " << s.proc << " M " << to_string(o.op) << ' ' << o.ret << ' ' << o.cost;
                 },
                 [&](const InvStep& i) { os << "INV " << s.proc << " M " << to_string(i.op); },
                 [&](const ResStep& r) { os << "RES " << s.proc << " M " << r.ret; },
             },
             s.event);
  return os.str();
}

void History::dump(std::ostream& os) const {
  for (const Step& s : steps_) os << format_step(layout_.get(), s) << '\n';
}

std::string History::dump() const {
  std::ostringstream os;
  dump(os);
  return os.str();
}

History History::project(ProcessId p) const {
  History out(layout_);
  for (const Step& s : steps_) {
    if (s.proc == p) out.push(s);
  }
  return out;
}

std::optional<std::string> check_well_formed(const History& h, int nprocs) {
  std::vector<Word> replay;
  if (h.layout()) {
    for (const auto& c : h.layout()->cells()) replay.push_back(c.initial);
  }
  std::vector<bool> pending(static_cast<std::size_t>(nprocs), false);

  for (std::size_t i = 0; i < h.size(); ++i) {
    const Step& s = h[i];
    auto fail = [&](const std::string& why) {
      return "step " + std::to_string(i) + " (" + format_step(h.layout().get(), s) + "): " + why;
    };
    if (s.proc < 0 || s.proc >= nprocs) return fail("process id out of range");
    const auto p = static_cast<std::size_t>(s.proc);

    if (const auto* b = std::get_if<BaseStep>(&s.event)) {
      if (!h.layout() || b->cell.index >= replay.size()) return fail("unknown base object");
      const CellInfo& info = h.layout()->info(b->cell);
      if (info.object_internal && !pending[p]) return fail("base object step outside an operation execution");
      Word& value = replay[b->cell.index];
      const Word expected = value;
      try {
        apply_primitive(info, value, b->access);
      } catch (const CellTypeMismatch& e) {
        return fail(e.what());
      }
      if (b->access.kind != AccessKind::Write && !(expected == b->ret)) {
        return fail("response does not conform to the base object's type");
      }
    } else if (std::holds_alternative<ObjectStep>(s.event)) {
      if (pending[p]) return fail("atomic step on M inside a pending invocation");
    } else if (std::holds_alternative<InvStep>(s.event)) {
      if (pending[p]) return fail("invocation while another invocation is pending");
      pending[p] = true;
    } else {
      if (!pending[p]) return fail("response without a matching invocation");
      pending[p] = false;
    }
  }
  return std::nullopt;
}

}  // namespace qlock
