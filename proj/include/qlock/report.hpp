#pragma once

// Run configuration, JSON reports and counterexample replay tokens.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlock/checker.hpp"
#include "qlock/explore.hpp"
#include "qlock/system.hpp"

namespace qlock {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  std::string command = "explore";
  ImplKind impl = ImplKind::Atomic;
  MemoryModel model = MemoryModel::Cc;
  int n = 2;
  int passages = 1;
  std::uint64_t seed = 1;
  /// Width of the MQFI counter; unbounded when empty.
  std::optional<int> counter_bits;
  std::size_t oracle_cap = 12;
  Mutation mutation = Mutation::None;
  int jobs = 1;
  std::vector<std::vector<MqOp>> scripts;

  SystemConfig system() const;

  bool operator==(const RunConfig&) const = default;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);
void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);
void to_json(nlohmann::json& j, const Metrics& m);
void from_json(const nlohmann::json& j, Metrics& m);

/// Hex digest of the parts of a configuration that determine its
/// behaviour.
std::string config_hash(const SystemConfig& config);

class TokenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A self-contained replay recipe: configuration plus schedule.
struct ReplayToken {
  SystemConfig config;
  Schedule schedule;
};

std::string encode_token(const SystemConfig& config, const Schedule& schedule);
/// Throws TokenError on malformed input or a hash mismatch.
ReplayToken decode_token(const std::string& token);

std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

struct JsonReport {
  int schema_version = kReportSchemaVersion;
  std::string tool_version = kToolVersion;
  RunConfig config;
  std::string rng;
  Metrics totals;
  std::map<std::string, Verdict> verdicts;
  /// Replay token for each failing property.
  std::map<std::string, std::string> tokens;
  /// Free-form numbers specific to a command (stress counts, seeds run).
  std::map<std::string, double> extra;

  static JsonReport from(const RunConfig& config, const PropertyReport& report);
  bool pass() const;

  bool operator==(const JsonReport&) const = default;
};

void to_json(nlohmann::json& j, const JsonReport& r);
void from_json(const nlohmann::json& j, JsonReport& r);

}  // namespace qlock
