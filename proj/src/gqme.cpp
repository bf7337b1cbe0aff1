#include "qlock/gqme.hpp"

#include <string>
#include <variant>

namespace qlock {

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Doorway:
      return "DOORWAY";
    case Phase::Wait:
      return "WAIT";
    case Phase::DoneWait:
      return "DONE_WAIT";
    case Phase::NoWait:
      return "NO_WAIT";
    case Phase::NearNcs:
      return "NEAR_NCS";
  }
  return "?";
}

GqmeShared make_gqme_shared(MemoryLayout& layout, int n) {
  GqmeShared s;
  for (int p = 0; p < n; ++p) {
    s.wait.push_back(layout.add({.name = "Wait[" + std::to_string(p) + "]",
                                 .kind = CellKind::Register,
                                 .initial = {1, 0},
                                 .home = p}));
  }
  return s;
}

PhaseInfo phase_of(const GqmeProc& proc) {
  if (proc.halted) return {Phase::NearNcs, false};
  switch (proc.pc) {
    case Line::Ncs:
    case Line::Enqueue:
      return {Phase::NearNcs, false};
    case Line::IsHead:
      return {Phase::Doorway, false};
    case Line::Spin:
    case Line::Reset:
      return {Phase::Wait, false};
    case Line::Cs:
    case Line::Dequeue:
      return {proc.waited ? Phase::DoneWait : Phase::NoWait, false};
    case Line::Branch:
    case Line::Signal:
      return {Phase::NearNcs, true};
  }
  return {};
}

bool in_cs_by_pc(const GqmeProc& proc) { return !proc.halted && proc.pc == Line::Dequeue && !proc.in_call; }

std::optional<ProcessId> last_pred(const History& history, ProcessId p) {
  std::optional<ProcessId> previous;
  std::optional<ProcessId> answer;
  for (const Step& s : history.steps()) {
    bool enqueue = false;
    if (const auto* o = std::get_if<ObjectStep>(&s.event)) {
      enqueue = o->op == MqOp::Enqueue;
    } else if (const auto* b = std::get_if<BaseStep>(&s.event)) {
      enqueue = b->lin_point && b->lin_point->op == MqOp::Enqueue;
    }
    if (!enqueue) continue;
    if (s.proc == p) answer = previous;
    previous = s.proc;
  }
  return answer;
}

}  // namespace qlock
