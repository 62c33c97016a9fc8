#pragma once

// Scenario configuration, execution and artifact writing.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "medsec/attacker.hpp"
#include "medsec/bench.hpp"
#include "medsec/endpoints.hpp"
#include "medsec/netsim.hpp"

namespace medsec {

/// A run broke one of its own consistency checks.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Role { Gateway, Device, Server, Attacker };

std::string_view to_string(Role role);

struct NodeSpec {
  Role role = Role::Gateway;
  std::string name;
  MacAddr mac;
  IpAddr4 ip;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct Topology {
  std::vector<NodeSpec> nodes;

  /// gateway .1, device .50, attacker .66, server .100 on 192.168.1.0/24.
  static Topology standard();
  const NodeSpec* find(Role role) const;
  const NodeSpec& require(Role role) const;
  bool has_ip(IpAddr4 ip) const;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  std::size_t messages = 10;
  Topology topology = Topology::standard();
  DeviceConfig device;
  /// Mode, key, encoding and framing are mirrored from the device.
  ServerConfig server;
  std::optional<AttackPlan> attack;
  /// Expanded from `preset` and any `models` overrides.
  std::optional<bench::Preset> models;
  /// Apply the loss model's drop probability in `run` (bench always does).
  bool apply_loss = false;
  std::string output_dir;

  /// Throws ConfigError.
  void validate() const;
};

/// Parses and validates a JSON config; unknown keys are rejected. Throws
/// ConfigError naming the offending key.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// FNV-1a of "name:seed", 16 hex digits.
std::string make_run_id(std::string_view name, std::uint64_t seed);

struct ScenarioResult {
  std::string run_id;
  Mode mode = Mode::Plain;
  std::vector<CaptureEvent> capture;
  std::vector<MessageRecord> messages;
  std::size_t transmissions = 0;
  ServerLog server_log;
  std::optional<InterceptLog> intercepts;
  std::optional<ImpactReport> impact;
  Inventory inventory;
  MacAddr device_mac;
  MacAddr server_mac;
  std::optional<MacAddr> attacker_mac;
};

/// Builds the network, sequences the attack phases and drives the device
/// until every message is resolved. Throws InvariantError.
ScenarioResult run_scenario(const ScenarioConfig& config);

struct RunSummary {
  std::string run_id;
  std::string name;
  std::size_t sent = 0;           // readings produced by the device
  std::size_t transmissions = 0;  // device IPv4 sends including retries
  std::size_t received = 0;       // server log records
  std::size_t intercepted = 0;
  std::size_t readable = 0;
  std::size_t tampered = 0;
  std::size_t accepted = 0;
  std::map<std::string, std::size_t> rejected;  // by detection category
  std::vector<std::string> artifacts;

  std::string to_json() const;
};

RunSummary summarize(const ScenarioConfig& config, const ScenarioResult& result);

/// Runs and writes capture.jsonl, server_log.jsonl, impact.md and
/// impact.json (attack only) and summary.json into `out_dir`.
RunSummary run(const ScenarioConfig& config, const std::filesystem::path& out_dir);

/// Paired plain and encrypted runs with the same seed and loss enabled.
/// Throws ConfigError when n == 0 or the config has no models.
bench::BenchReport run_bench(const ScenarioConfig& config, std::size_t n);

/// run_bench plus report.md, report.csv and samples.jsonl in `out_dir`.
bench::BenchReport write_bench(const ScenarioConfig& config, std::size_t n, const std::filesystem::path& out_dir);

/// Re-renders a report from samples.jsonl written by `bench`.
std::string rerender_report(const ScenarioConfig& config, const std::filesystem::path& samples_path,
                            bench::ReportFormat format);

}  // namespace medsec
