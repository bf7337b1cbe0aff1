#include "qlock/report.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>

namespace qlock {

using nlohmann::json;

namespace {

template <class Enum, class Parse>
Enum parse_or_throw(const std::string& text, Parse parse, const char* what) {
  auto v = parse(text);
  if (!v) throw std::invalid_argument(std::string("unknown ") + what + ": " + text);
  return *v;
}

json scripts_to_json(const std::vector<std::vector<MqOp>>& scripts) {
  json out = json::array();
  for (const auto& s : scripts) {
    json ops = json::array();
    for (MqOp op : s) ops.push_back(to_string(op));
    out.push_back(ops);
  }
  return out;
}

std::vector<std::vector<MqOp>> scripts_from_json(const json& j) {
  std::vector<std::vector<MqOp>> out;
  for (const json& s : j) {
    std::vector<MqOp> ops;
    for (const json& op : s) ops.push_back(parse_or_throw<MqOp>(op.get<std::string>(), parse_mq_op, "operation"));
    out.push_back(ops);
  }
  return out;
}

json system_to_json(const SystemConfig& c) {
  json j;
  j["impl"] = to_string(c.impl);
  j["model"] = to_string(c.model);
  j["n"] = c.n;
  j["passages"] = c.passages;
  j["counter_bits"] = c.counter.wrap_bits ? json(*c.counter.wrap_bits) : json(nullptr);
  j["mutation"] = to_string(c.mutation);
  if (c.script_mode()) j["scripts"] = scripts_to_json(c.scripts);
  return j;
}

SystemConfig system_from_json(const json& j) {
  SystemConfig c;
  c.impl = parse_or_throw<ImplKind>(j.at("impl").get<std::string>(), parse_impl, "implementation");
  c.model = parse_or_throw<MemoryModel>(j.at("model").get<std::string>(), parse_model, "memory model");
  c.n = j.at("n").get<int>();
  c.passages = j.at("passages").get<int>();
  if (!j.at("counter_bits").is_null()) c.counter = CounterMode::wrap(j.at("counter_bits").get<int>());
  c.mutation = parse_or_throw<Mutation>(j.at("mutation").get<std::string>(), parse_mutation, "mutation");
  if (j.contains("scripts")) c.scripts = scripts_from_json(j.at("scripts"));
  return c;
}

}  // namespace

SystemConfig RunConfig::system() const {
  SystemConfig c;
  c.impl = impl;
  c.model = model;
  c.n = n;
  c.passages = passages;
  if (counter_bits) c.counter = CounterMode::wrap(*counter_bits);
  c.mutation = mutation;
  c.scripts = scripts;
  return c;
}

void to_json(json& j, const RunConfig& c) {
  j = system_to_json(c.system());
  j["command"] = c.command;
  j["seed"] = c.seed;
  j["oracle_cap"] = c.oracle_cap;
  j["jobs"] = c.jobs;
}

void from_json(const json& j, RunConfig& c) {
  const SystemConfig s = system_from_json(j);
  c.command = j.at("command").get<std::string>();
  c.impl = s.impl;
  c.model = s.model;
  c.n = s.n;
  c.passages = s.passages;
  c.counter_bits = s.counter.wrap_bits;
  c.mutation = s.mutation;
  c.scripts = s.scripts;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.oracle_cap = j.at("oracle_cap").get<std::size_t>();
  c.jobs = j.at("jobs").get<int>();
}

void to_json(json& j, const Verdict& v) {
  j = json{{"status", to_string(v.status)}, {"detail", v.detail}};
  j["counterexample"] = v.counterexample ? json(*v.counterexample) : json(nullptr);
}

void from_json(const json& j, Verdict& v) {
  v.status = parse_or_throw<Status>(j.at("status").get<std::string>(), parse_status, "status");
  v.detail = j.at("detail").get<std::string>();
  if (j.at("counterexample").is_null()) {
    v.counterexample.reset();
  } else {
    v.counterexample = j.at("counterexample").get<Schedule>();
  }
}

void to_json(json& j, const Metrics& m) {
  j = json{{"histories", m.histories},
           {"prefixes", m.prefixes},
           {"max_rmr_per_passage", m.max_rmr_per_passage},
           {"max_spin_rmr_per_passage", m.max_spin_rmr_per_passage},
           {"max_steps_per_op",
            {{"enqueue", m.max_steps_per_op[0]}, {"isHead", m.max_steps_per_op[1]}, {"dequeue", m.max_steps_per_op[2]}}},
           {"max_exit_steps", m.max_exit_steps},
           {"oracle_checked", m.oracle_checked},
           {"oracle_skipped", m.oracle_skipped},
           {"oracle_only", m.oracle_only}};
}

void from_json(const json& j, Metrics& m) {
  m.histories = j.at("histories").get<std::uint64_t>();
  m.prefixes = j.at("prefixes").get<std::uint64_t>();
  m.max_rmr_per_passage = j.at("max_rmr_per_passage").get<int>();
  m.max_spin_rmr_per_passage = j.at("max_spin_rmr_per_passage").get<int>();
  const json& s = j.at("max_steps_per_op");
  m.max_steps_per_op = {s.at("enqueue").get<int>(), s.at("isHead").get<int>(), s.at("dequeue").get<int>()};
  m.max_exit_steps = j.at("max_exit_steps").get<int>();
  m.oracle_checked = j.at("oracle_checked").get<std::uint64_t>();
  m.oracle_skipped = j.at("oracle_skipped").get<std::uint64_t>();
  m.oracle_only = j.at("oracle_only").get<std::uint64_t>();
}

std::string config_hash(const SystemConfig& config) {
  const std::string text = system_to_json(config).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string base64_encode(const std::string& bytes) {
  using namespace boost::archive::iterators;
  using It = base64_from_binary<transform_width<std::string::const_iterator, 6, 8>>;
  std::string out(It(bytes.begin()), It(bytes.end()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

std::string base64_decode(const std::string& text) {
  using namespace boost::archive::iterators;
  using It = transform_width<binary_from_base64<std::string::const_iterator>, 8, 6>;
  std::string trimmed = text;
  while (!trimmed.empty() && (trimmed.back() == '\n' || trimmed.back() == ' ')) trimmed.pop_back();
  std::size_t pad = 0;
  while (!trimmed.empty() && trimmed.back() == '=') {
    trimmed.pop_back();
    ++pad;
  }
  if (pad > 2 || (trimmed.size() + pad) % 4 != 0) throw TokenError("malformed base64 token");
  for (char c : trimmed) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '/';
    if (!ok) throw TokenError("malformed base64 token");
  }
  return std::string(It(trimmed.begin()), It(trimmed.end()));
}

std::string encode_token(const SystemConfig& config, const Schedule& schedule) {
  json j;
  j["config"] = system_to_json(config);
  j["schedule"] = schedule;
  j["hash"] = config_hash(config);
  return base64_encode(j.dump());
}

ReplayToken decode_token(const std::string& token) {
  json j;
  try {
    j = json::parse(base64_decode(token));
  } catch (const json::exception& e) {
    throw TokenError(std::string("token is not valid JSON: ") + e.what());
  }
  ReplayToken out;
  try {
    out.config = system_from_json(j.at("config"));
    out.schedule = j.at("schedule").get<Schedule>();
    if (j.at("hash").get<std::string>() != config_hash(out.config)) throw TokenError("token hash mismatch");
  } catch (const json::exception& e) {
    throw TokenError(std::string("malformed token: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw TokenError(std::string("malformed token: ") + e.what());
  }
  return out;
}

JsonReport JsonReport::from(const RunConfig& config, const PropertyReport& report) {
  JsonReport r;
  r.config = config;
  r.totals = report.metrics;
  r.verdicts = report.verdicts;
  const SystemConfig sys = config.system();
  for (const auto& [name, v] : report.verdicts) {
    if (v.status == Status::Fail && v.counterexample) r.tokens[name] = encode_token(sys, *v.counterexample);
  }
  return r;
}

bool JsonReport::pass() const {
  for (const auto& [name, v] : verdicts) {
    if (v.status == Status::Fail) return false;
  }
  return true;
}

void to_json(json& j, const JsonReport& r) {
  j = json{{"schema_version", r.schema_version},
           {"tool_version", r.tool_version},
           {"config", r.config},
           {"rng", r.rng},
           {"totals", r.totals},
           {"verdicts", r.verdicts},
           {"tokens", r.tokens},
           {"extra", r.extra}};
}

void from_json(const json& j, JsonReport& r) {
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != kReportSchemaVersion) {
    throw std::invalid_argument("unsupported report schema " + std::to_string(r.schema_version));
  }
  r.tool_version = j.at("tool_version").get<std::string>();
  r.config = j.at("config").get<RunConfig>();
  r.rng = j.at("rng").get<std::string>();
  r.totals = j.at("totals").get<Metrics>();
  r.verdicts = j.at("verdicts").get<std::map<std::string, Verdict>>();
  r.tokens = j.at("tokens").get<std::map<std::string, std::string>>();
  r.extra = j.at("extra").get<std::map<std::string, double>>();
}

}  // namespace qlock
