#include "medsec/endpoints.hpp"

#include <stdexcept>

#include "json.hpp"

namespace medsec {

std::string_view to_string(Mode mode) { return mode == Mode::Plain ? "plain" : "encrypted"; }

Mode parse_mode(std::string_view name) {
  if (name == "plain") return Mode::Plain;
  if (name == "encrypted") return Mode::Encrypted;
  throw std::invalid_argument("unknown mode: " + std::string(name));
}

std::string_view to_string(Detection detection) {
  switch (detection) {
    case Detection::None:
      return "None";
    case Detection::PaddingError:
      return "PaddingError";
    case Detection::ParseError:
      return "ParseError";
    case Detection::RangeViolation:
      return "RangeViolation";
    case Detection::SeqReplay:
      return "SeqReplay";
  }
  return "Unknown";
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::Accepted ? "Accepted" : "Rejected";
}

void DeviceConfig::validate() const {
  if (device_id.empty()) throw std::invalid_argument("device.id must be non-empty");
  if (sample_interval_ms <= 0) throw std::invalid_argument("device.sample_interval_ms must be > 0");
  if (hr_range.min > hr_range.max) throw std::invalid_argument("device.hr_range min > max");
  if (temp_range.min > temp_range.max) throw std::invalid_argument("device.temp_range min > max");
  if (hr_range.min < 0) throw std::invalid_argument("device.hr_range must be >= 0");
  if (retry_timeout_ms <= 0) throw std::invalid_argument("device.retry_timeout_ms must be > 0");
  if (max_retries < 0) throw std::invalid_argument("device.max_retries must be >= 0");
  if (mode == Mode::Encrypted && !key) throw std::invalid_argument("device.key required in encrypted mode");
}

void ServerConfig::validate() const {
  if (mode == Mode::Encrypted && !key) throw std::invalid_argument("server.key required in encrypted mode");
  if (plausible_hr.min > plausible_hr.max || plausible_temp.min > plausible_temp.max) {
    throw std::invalid_argument("server plausibility bounds min > max");
  }
}

// --- sensor ------------------------------------------------------------------

SensorModel::SensorModel(Range hr_range, Range temp_range, Rng rng, std::vector<wire::VitalSigns> script)
    : hr_range_(hr_range), temp_range_(temp_range), rng_(std::move(rng)), script_(std::move(script)) {}

wire::VitalSigns SensorModel::sample() {
  if (script_pos_ < script_.size()) return script_[script_pos_++];
  const int hr = rng_.uniform_int(hr_range_.min, hr_range_.max);
  const int temp = rng_.uniform_int(temp_range_.min, temp_range_.max);
  return wire::VitalSigns{hr, temp};
}

// --- device ------------------------------------------------------------------

std::optional<SimTime> MessageRecord::recovery_ms() const {
  if (!acked_at || attempts.size() < 2) return std::nullopt;
  return *acked_at - attempts.front();
}

Device::Device(std::string name, MacAddr mac, IpAddr4 ip, DeviceConfig config, IpAddr4 server_ip,
               Rng sensor_rng, Rng iv_rng, HostOptions options)
    : Host(std::move(name), mac, ip, options),
      config_(std::move(config)),
      server_ip_(server_ip),
      sensor_(config_.hr_range, config_.temp_range, std::move(sensor_rng), config_.script),
      iv_rng_(std::move(iv_rng)) {
  config_.validate();
}

void Device::start(SimTime first_at, std::size_t count, std::function<void()> on_done) {
  planned_ += count;
  on_done_ = std::move(on_done);
  for (std::size_t k = 0; k < count; ++k) {
    medium().schedule(first_at + static_cast<SimTime>(k) * config_.sample_interval_ms, [this] { tick(); });
  }
  if (count == 0) medium().schedule(first_at, [this] { check_done(); });
}

void Device::tick() {
  MessageRecord rec;
  rec.seq = next_seq_++;
  rec.sampled_at = medium().now();
  rec.vitals = sensor_.sample();

  Bytes payload;
  if (config_.mode == Mode::Plain) {
    payload = wire::encode_plain(rec.vitals, server_ip_);
  } else {
    const std::string plaintext =
        wire::encode_message(wire::TelemetryMessage{rec.vitals, config_.device_id, rec.seq});
    const crypto::Envelope env =
        config_.framing == wire::Framing::Fidelity
            ? crypto::seal_with_iv(*config_.key, config_.fidelity_iv, to_bytes(plaintext))
            : crypto::seal(*config_.key, to_bytes(plaintext), iv_rng_);
    rec.cipher_blocks = env.ciphertext.size() / crypto::kBlockSize;
    payload = wire::encode_encrypted(env, server_ip_, config_.encoding, config_.framing);
  }
  rec.wire_bytes = payload.size();

  messages_.push_back(std::move(rec));
  payloads_.push_back(std::move(payload));
  transmit(messages_.size() - 1);
}

void Device::transmit(std::size_t index) {
  const auto id = static_cast<std::uint16_t>(messages_[index].seq);
  send_ip(server_ip_, payloads_[index], id, [this, index](bool sent) {
    MessageRecord& rec = messages_[index];
    if (!sent) {
      rec.skipped = true;
      check_done();
      return;
    }
    rec.attempts.push_back(medium().now());
    ++transmissions_;
    const std::size_t attempt = rec.attempts.size();
    medium().schedule(medium().now() + config_.retry_timeout_ms,
                      [this, index, attempt] { on_retry_timer(index, attempt); });
  });
}

void Device::on_retry_timer(std::size_t index, std::size_t attempt) {
  MessageRecord& rec = messages_[index];
  if (rec.acked_at || rec.lost || rec.attempts.size() != attempt) return;
  if (static_cast<int>(attempt) <= config_.max_retries) {
    transmit(index);
  } else {
    rec.lost = true;
    check_done();
  }
}

void Device::on_ipv4(const EthernetFrame& /*frame*/, const Ipv4Packet& packet) {
  if (packet.src != server_ip_ || !wire::is_ack(packet.payload)) return;
  for (auto i = messages_.size(); i-- > 0;) {
    MessageRecord& rec = messages_[i];
    if (static_cast<std::uint16_t>(rec.seq) != packet.identification) continue;
    if (rec.acked_at || rec.lost) return;
    rec.acked_at = medium().now();
    check_done();
    return;
  }
}

bool Device::done() const {
  if (messages_.size() != planned_) return false;
  for (const auto& m : messages_) {
    if (!m.resolved()) return false;
  }
  return true;
}

void Device::check_done() {
  if (done_fired_ || !done()) return;
  done_fired_ = true;
  if (on_done_) on_done_();
}

// --- server ------------------------------------------------------------------

Server::Server(std::string name, MacAddr mac, IpAddr4 ip, ServerConfig config, HostOptions options)
    : Host(std::move(name), mac, ip, options), config_(std::move(config)) {
  config_.validate();
}

void Server::on_ipv4(const EthernetFrame& frame, const Ipv4Packet& packet) {
  handle_request(packet.payload, RequestMeta{medium().now(), packet.src, frame.src});
  send_ip(packet.src, wire::ack_response(), packet.identification);
}

TelemetryRecord Server::handle_request(std::span<const Byte> request, const RequestMeta& meta) {
  TelemetryRecord rec = process(request, meta);
  log_.records.push_back(rec);
  return rec;
}

std::optional<std::string> Server::range_violation(const wire::VitalSigns& v) const {
  if (!config_.validate_ranges) return std::nullopt;
  if (!config_.plausible_hr.contains(v.heart_rate_bpm)) return "heart rate out of range";
  if (!config_.plausible_temp.contains(v.temperature_df)) return "temperature out of range";
  return std::nullopt;
}

TelemetryRecord Server::process(std::span<const Byte> request, const RequestMeta& meta) {
  TelemetryRecord rec;
  rec.received_at = meta.received_at;
  rec.source_ip = meta.source_ip;
  rec.via_mac = meta.via_mac;
  auto reject = [&rec](Detection d, std::string reason) {
    rec.verdict = Verdict::Rejected;
    rec.detection = d;
    rec.reason = std::move(reason);
    return rec;
  };

  if (config_.mode == Mode::Plain) {
    try {
      rec.vitals = wire::parse_plain(request);
    } catch (const wire::WireError& e) {
      return reject(Detection::ParseError, e.reason());
    }
    if (auto why = range_violation(*rec.vitals)) return reject(Detection::RangeViolation, *why);
    return rec;
  }

  wire::TelemetryMessage msg;
  try {
    const auto body = wire::parse_encrypted(request, config_.encoding);
    const auto envelope = wire::split_envelope(body.decode(), config_.framing, config_.fidelity_iv);
    const Bytes plaintext = crypto::open(*config_.key, envelope);
    msg = wire::decode_message(as_string_view(plaintext));
  } catch (const wire::WireError& e) {
    return reject(Detection::ParseError, e.reason());
  } catch (const crypto::CryptoError& e) {
    if (e.kind() == crypto::CryptoError::Kind::Padding) return reject(Detection::PaddingError, e.what());
    return reject(Detection::ParseError, e.what());
  }

  rec.device_id = msg.device_id;
  rec.vitals = msg.vitals;
  rec.seq = msg.seq;
  if (auto why = range_violation(msg.vitals)) return reject(Detection::RangeViolation, *why);
  if (config_.replay_defense) {
    const auto it = last_seq_.find(msg.device_id);
    if (it != last_seq_.end() && msg.seq <= it->second) {
      return reject(Detection::SeqReplay, "sequence number not increasing");
    }
    last_seq_[msg.device_id] = msg.seq;
  }
  return rec;
}

void write_server_log_jsonl(std::ostream& out, std::span<const TelemetryRecord> records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["received_at_ms"] = r.received_at;
    j["source_ip"] = r.source_ip.to_string();
    j["device_id"] = r.device_id.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.device_id);
    if (r.vitals) {
      j["heart_rate_bpm"] = r.vitals->heart_rate_bpm;
      j["temperature_f"] = r.vitals->temperature_df / 10.0;
    } else {
      j["heart_rate_bpm"] = nullptr;
      j["temperature_f"] = nullptr;
    }
    j["verdict"] = to_string(r.verdict);
    j["detection"] = to_string(r.detection);
    out << j.dump() << '\n';
  }
}

}  // namespace medsec
