#pragma once

// The emulated telemetry device and the receiving server.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medsec/crypto.hpp"
#include "medsec/netsim.hpp"
#include "medsec/rng.hpp"
#include "medsec/wire.hpp"

namespace medsec {

enum class Mode { Plain, Encrypted };

std::string_view to_string(Mode mode);
/// "plain" or "encrypted". Throws std::invalid_argument.
Mode parse_mode(std::string_view name);

/// Closed integer interval [min, max].
struct Range {
  int min = 0;
  int max = 0;

  bool contains(int v) const { return v >= min && v <= max; }
  friend bool operator==(const Range&, const Range&) = default;
};

struct DeviceConfig {
  std::string device_id = "esp8266-01";
  Mode mode = Mode::Plain;
  SimTime sample_interval_ms = 2000;
  std::optional<crypto::Key128> key;
  Range hr_range{60, 100};
  Range temp_range{970, 995};  // tenths of a degree F
  SimTime retry_timeout_ms = 2300;
  int max_retries = 3;
  crypto::TextEncoding encoding = crypto::TextEncoding::Hex;
  wire::Framing framing = wire::Framing::Canonical;
  crypto::Iv fidelity_iv{};
  /// Readings replayed in order before uniform sampling takes over.
  std::vector<wire::VitalSigns> script;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Uniform draws within the configured ranges, preceded by any scripted
/// readings.
class SensorModel {
 public:
  SensorModel(Range hr_range, Range temp_range, Rng rng, std::vector<wire::VitalSigns> script = {});

  wire::VitalSigns sample();

 private:
  Range hr_range_;
  Range temp_range_;
  Rng rng_;
  std::vector<wire::VitalSigns> script_;
  std::size_t script_pos_ = 0;
};

/// What happened to one reading on its way to the server.
struct MessageRecord {
  std::uint64_t seq = 0;
  SimTime sampled_at = 0;
  wire::VitalSigns vitals;
  std::size_t wire_bytes = 0;
  std::size_t cipher_blocks = 0;  // 0 in plain mode
  std::vector<SimTime> attempts;
  std::optional<SimTime> acked_at;
  bool lost = false;     // retries exhausted
  bool skipped = false;  // ARP resolution failed

  bool first_attempt_failed() const { return attempts.size() > 1 || lost; }
  /// First failed send to acknowledgment of the retransmission.
  std::optional<SimTime> recovery_ms() const;
  bool resolved() const { return acked_at || lost || skipped; }
};

class Device : public Host {
 public:
  Device(std::string name, MacAddr mac, IpAddr4 ip, DeviceConfig config, IpAddr4 server_ip,
         Rng sensor_rng, Rng iv_rng, HostOptions options = {});

  /// Schedules `count` ticks, the first at `first_at`. `on_done` fires once
  /// every message is acknowledged, lost, or skipped.
  void start(SimTime first_at, std::size_t count, std::function<void()> on_done = {});

  /// Samples, serializes (and seals), then transmits toward the server through
  /// whatever the ARP cache currently says.
  void tick();

  const DeviceConfig& config() const { return config_; }
  const std::vector<MessageRecord>& messages() const { return messages_; }
  std::size_t transmissions() const { return transmissions_; }
  bool done() const;

 protected:
  void on_ipv4(const EthernetFrame& frame, const Ipv4Packet& packet) override;

 private:
  void transmit(std::size_t index);
  void on_retry_timer(std::size_t index, std::size_t attempt);
  void check_done();

  DeviceConfig config_;
  IpAddr4 server_ip_;
  SensorModel sensor_;
  Rng iv_rng_;
  std::vector<MessageRecord> messages_;
  std::vector<Bytes> payloads_;
  std::uint64_t next_seq_ = 1;
  std::size_t planned_ = 0;
  std::size_t transmissions_ = 0;
  std::function<void()> on_done_;
  bool done_fired_ = false;
};

enum class Detection { None, PaddingError, ParseError, RangeViolation, SeqReplay };
enum class Verdict { Accepted, Rejected };

std::string_view to_string(Detection detection);
std::string_view to_string(Verdict verdict);

struct TelemetryRecord {
  SimTime received_at = 0;
  IpAddr4 source_ip;
  /// Link-layer sender of the frame that carried the request.
  MacAddr via_mac;
  std::string device_id;  // empty when the format carries none
  std::optional<wire::VitalSigns> vitals;
  std::optional<std::uint64_t> seq;
  Verdict verdict = Verdict::Accepted;
  Detection detection = Detection::None;
  std::string reason;
};

struct ServerConfig {
  Mode mode = Mode::Plain;
  std::optional<crypto::Key128> key;
  crypto::TextEncoding encoding = crypto::TextEncoding::Hex;
  wire::Framing framing = wire::Framing::Canonical;
  crypto::Iv fidelity_iv{};
  bool validate_ranges = false;
  bool replay_defense = false;
  Range plausible_hr{20, 250};
  Range plausible_temp{850, 1100};

  void validate() const;
};

struct RequestMeta {
  SimTime received_at = 0;
  IpAddr4 source_ip;
  MacAddr via_mac;
};

struct ServerLog {
  std::string run_id;
  std::vector<TelemetryRecord> records;
};

/// {received_at_ms, source_ip, device_id, heart_rate_bpm, temperature_f,
/// verdict, detection}, one object per line.
void write_server_log_jsonl(std::ostream& out, std::span<const TelemetryRecord> records);

class Server : public Host {
 public:
  Server(std::string name, MacAddr mac, IpAddr4 ip, ServerConfig config, HostOptions options = {});

  /// Decodes, (decrypts,) validates and logs one request. Each failure maps
  /// to exactly one detection category.
  TelemetryRecord handle_request(std::span<const Byte> request, const RequestMeta& meta);

  const ServerConfig& config() const { return config_; }
  const ServerLog& log() const { return log_; }
  void set_run_id(std::string run_id) { log_.run_id = std::move(run_id); }

 protected:
  void on_ipv4(const EthernetFrame& frame, const Ipv4Packet& packet) override;

 private:
  TelemetryRecord process(std::span<const Byte> request, const RequestMeta& meta);
  std::optional<std::string> range_violation(const wire::VitalSigns& v) const;

  ServerConfig config_;
  ServerLog log_;
  std::map<std::string, std::uint64_t> last_seq_;
};

}  // namespace medsec
