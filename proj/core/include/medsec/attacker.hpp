#pragma once

// Five-phase man-in-the-middle engine: reconnaissance, ARP poisoning,
// passive interception with forwarding, active manipulation, and impact
// assessment against the server's log.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medsec/endpoints.hpp"
#include "medsec/netsim.hpp"
#include "medsec/rng.hpp"
#include "medsec/wire.hpp"

namespace medsec {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AssessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Phase { Recon, Poison, Passive, Active, Assess };

std::string_view to_string(Phase phase);
Phase parse_phase(std::string_view name);

struct TamperRule {
  enum class Target { PlainField, CiphertextByte, IvBit };
  enum class Action { SetValue, RandomByte, FlipBit };

  Target target = Target::PlainField;
  Action action = Action::SetValue;
  /// PlainField + SetValue: query assignments applied in order.
  std::vector<std::pair<std::string, std::string>> fields;
  /// CiphertextByte: byte offset into the ciphertext (random when unset).
  /// IvBit: bit offset into the IV, 0 = most significant bit of byte 0.
  std::optional<std::size_t> index;
  /// CiphertextByte + SetValue: replacement byte.
  std::optional<Byte> value;
  /// 0-based index among intercepted telemetry messages; unset = every one.
  std::optional<std::size_t> message;

  /// IV manipulation exploits CBC malleability and goes past what the
  /// original experiment attempted; reports flag it.
  bool beyond_paper() const { return target == Target::IvBit; }
  bool applies_to_plain() const { return target == Target::PlainField; }
  std::string describe() const;
  /// Throws PlanError.
  void validate() const;
};

struct AttackPlan {
  IpAddr4 victim_ip;
  IpAddr4 peer_ip;
  std::vector<Phase> phases;
  std::vector<TamperRule> rules;
  SimTime repoison_interval_ms = 1000;
  SimTime recon_timeout_ms = 200;
  /// Inclusive scan range; defaults to .1-.254 of the victim's /24.
  std::optional<std::pair<IpAddr4, IpAddr4>> scan_range;
  /// Send true-MAC replies when poisoning stops.
  bool restore_on_stop = true;
  wire::Framing framing = wire::Framing::Canonical;

  bool has(Phase p) const;
  std::pair<IpAddr4, IpAddr4> effective_scan_range() const;
  /// Active requires Poison, Poison requires Recon, Assess requires Passive or
  /// Active. Throws PlanError.
  void validate() const;
};

struct InterceptEntry {
  SimTime t_ms = 0;
  std::string direction;  // "victim->peer", "peer->victim", "other"
  bool telemetry = false;
  Bytes original;
  Bytes forwarded;
  std::string rule;  // empty when relayed untouched
  std::string note;  // "uninteresting" for non-telemetry traffic
  bool beyond_paper = false;
  std::optional<wire::VitalSigns> extraction;
};

struct InterceptLog {
  std::string run_id;
  MacAddr attacker_mac;
  std::vector<InterceptEntry> entries;

  std::size_t telemetry_count() const;
};

struct ImpactRow {
  std::optional<wire::VitalSigns> original;
  std::optional<wire::VitalSigns> tampered;
  Verdict verdict = Verdict::Accepted;
  Detection detection = Detection::None;
  std::string rule;
  bool beyond_paper = false;
};

struct ImpactReport {
  std::vector<ImpactRow> rows;
  std::size_t intercepted = 0;
  std::size_t readable = 0;
  std::size_t tampered = 0;
  /// Excludes beyond-paper rules.
  std::size_t accepted_despite_tamper = 0;
  std::size_t beyond_paper_accepted = 0;

  std::string to_markdown() const;
  std::string to_json() const;
};

using Inventory = std::map<IpAddr4, MacAddr>;

class Attacker : public Host {
 public:
  enum class ForwardMode { Off, Passive, Active };

  Attacker(std::string name, MacAddr mac, IpAddr4 ip, AttackPlan plan, Rng rng, HostOptions options = {});

  /// ARP-requests every address in the range; `done` runs after the recon
  /// timeout with everything that answered.
  void recon(IpAddr4 first, IpAddr4 last, std::function<void(const Inventory&)> done = {});
  const Inventory& inventory() const { return inventory_; }

  /// Forged replies to victim and peer, refreshed every repoison interval.
  /// Throws PlanError if either MAC is unknown.
  void poison(IpAddr4 victim_ip, IpAddr4 peer_ip);
  /// Stops refreshing; with `corrective` sends true-MAC replies to both.
  void stop_poison(bool corrective);
  bool poisoning() const { return poisoning_; }

  void set_forward_mode(ForwardMode mode) { forward_mode_ = mode; }
  ForwardMode forward_mode() const { return forward_mode_; }

  /// Runs the plan's phases starting at `at`.
  void execute(SimTime at);
  /// Stops poisoning according to the plan.
  void finish();

  const AttackPlan& plan() const { return plan_; }
  const InterceptLog& log() const { return log_; }
  void set_run_id(std::string run_id) { log_.run_id = std::move(run_id); }

 protected:
  void on_arp(const ArpPacket& packet) override;
  void on_foreign_ipv4(const EthernetFrame& frame, const Ipv4Packet& packet) override;

 private:
  void send_forged(IpAddr4 claimed_ip, const MacAddr& claimed_mac, IpAddr4 to_ip, const MacAddr& to_mac);
  void refresh_poison(std::uint64_t generation);
  Bytes apply_rules(const Bytes& payload, std::size_t message_index, InterceptEntry& entry);
  Bytes tamper_envelope(const Bytes& payload, const TamperRule& rule);

  AttackPlan plan_;
  Rng rng_;
  Inventory inventory_;
  bool recon_active_ = false;
  bool poisoning_ = false;
  std::uint64_t poison_generation_ = 0;
  IpAddr4 poison_victim_;
  IpAddr4 poison_peer_;
  ForwardMode forward_mode_ = ForwardMode::Off;
  std::size_t telemetry_seen_ = 0;
  InterceptLog log_;
};

/// Joins intercepted telemetry with server outcomes in arrival order.
/// Throws AssessError when the logs come from different runs.
ImpactReport assess(const InterceptLog& intercepts, const ServerLog& server_log);

}  // namespace medsec
