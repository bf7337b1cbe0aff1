#include "qlock/mutex_queue.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace qlock {

const char* to_string(MqOp op) {
  switch (op) {
    case MqOp::Enqueue:
      return "enqueue";
    case MqOp::IsHead:
      return "isHead";
    case MqOp::Dequeue:
      return "dequeue";
  }
  return "?";
}

std::optional<MqOp> parse_mq_op(const std::string& text) {
  if (text == "enqueue") return MqOp::Enqueue;
  if (text == "isHead") return MqOp::IsHead;
  if (text == "dequeue") return MqOp::Dequeue;
  return std::nullopt;
}

std::string MqResponse::str() const {
  switch (kind_) {
    case Kind::Ok:
      return "OK";
    case Kind::True:
      return "true";
    case Kind::False:
      return "false";
    case Kind::NoSuccessor:
      return "-1";
    case Kind::Pid:
      return std::to_string(pid_);
    case Kind::Arbitrary:
      return "*";
  }
  return "?";
}

std::optional<MqResponse> MqResponse::parse(const std::string& text) {
  if (text == "OK") return ok();
  if (text == "true") return boolean(true);
  if (text == "false") return boolean(false);
  if (text == "-1") return no_successor();
  if (text == "*") return arbitrary();
  if (!text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return pid(std::stoi(text));
  }
  return std::nullopt;
}

std::ostream& operator<<(std::ostream& os, const MqResponse& r) { return os << r.str(); }

MutexQueueState MutexQueueState::broken_state() {
  MutexQueueState s;
  s.broken_ = true;
  return s;
}

MutexQueueState MutexQueueState::normal(std::vector<ProcessId> queue, ProcSet visible) {
  MutexQueueState s;
  s.queue_ = std::move(queue);
  s.visible_ = visible;
  return s;
}

std::string MutexQueueState::str() const {
  if (broken_) return "BROKEN";
  std::ostringstream os;
  os << "(<";
  for (std::size_t i = 0; i < queue_.size(); ++i) os << (i ? "," : "") << queue_[i];
  os << ">, {";
  bool first = true;
  for (int p = 0; p < kMaxProcs; ++p) {
    if (contains(visible_, p)) {
      os << (first ? "" : ",") << p;
      first = false;
    }
  }
  os << "})";
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const MutexQueueState& s) { return os << s.str(); }

namespace {

bool in_queue(const MutexQueueState& s, ProcessId p) {
  return std::find(s.queue().begin(), s.queue().end(), p) != s.queue().end();
}

MqTransition broken_transition() { return {MutexQueueState::broken_state(), MqResponse::arbitrary()}; }

}  // namespace

bool is_etiquette_violation(const MutexQueueState& s, ProcessId p, MqOp op) {
  if (s.broken()) return true;
  switch (op) {
    case MqOp::Enqueue:
      return in_queue(s, p);
    case MqOp::IsHead:
      return !in_queue(s, p) || contains(s.visible(), p);
    case MqOp::Dequeue:
      return s.queue().empty() || s.queue().front() != p || !contains(s.visible(), p);
  }
  return true;
}

MqTransition apply(const MutexQueueState& s, ProcessId p, MqOp op) {
  if (is_etiquette_violation(s, p, op)) return broken_transition();

  std::vector<ProcessId> q = s.queue();
  ProcSet v = s.visible();
  switch (op) {
    case MqOp::Enqueue:
      q.push_back(p);
      return {MutexQueueState::normal(std::move(q), v), MqResponse::ok()};
    case MqOp::IsHead: {
      const bool is_head = q.front() == p;
      return {MutexQueueState::normal(std::move(q), v | proc_bit(p)), MqResponse::boolean(is_head)};
    }
    case MqOp::Dequeue: {
      MqResponse r = MqResponse::no_successor();
      if (q.size() > 1 && contains(v, q[1])) r = MqResponse::pid(q[1]);
      q.erase(q.begin());
      return {MutexQueueState::normal(std::move(q), v & ~proc_bit(p)), r};
    }
  }
  return broken_transition();
}

namespace {

const MutexQueueState& require_normal(const MutexQueueState& s) {
  if (s.broken()) throw BrokenStateQuery();
  return s;
}

}  // namespace

bool empty(const MutexQueueState& s) { return require_normal(s).queue().empty(); }

std::optional<ProcessId> head(const MutexQueueState& s) {
  const auto& q = require_normal(s).queue();
  if (q.empty()) return std::nullopt;
  return q.front();
}

std::optional<ProcessId> pred(const MutexQueueState& s, ProcessId p) {
  const auto& q = require_normal(s).queue();
  auto it = std::find(q.begin(), q.end(), p);
  if (it == q.end() || it == q.begin()) return std::nullopt;
  return *(it - 1);
}

std::optional<ProcessId> succ(const MutexQueueState& s, ProcessId p) {
  const auto& q = require_normal(s).queue();
  auto it = std::find(q.begin(), q.end(), p);
  if (it == q.end() || it + 1 == q.end()) return std::nullopt;
  return *(it + 1);
}

ProcSet qprocs(const MutexQueueState& s) {
  ProcSet out = 0;
  for (ProcessId p : require_normal(s).queue()) out |= proc_bit(p);
  return out;
}

ProcSet visprocs(const MutexQueueState& s) { return require_normal(s).visible(); }

}  // namespace qlock
