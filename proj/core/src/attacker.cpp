#include "medsec/attacker.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace medsec {
namespace {

bool looks_like_hex(std::string_view text) {
  return !text.empty() && text.size() % 2 == 0 &&
         std::all_of(text.begin(), text.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
         });
}

std::string vitals_cell(const std::optional<wire::VitalSigns>& v, bool heart_rate) {
  if (!v) return "n/a";
  return heart_rate ? std::to_string(v->heart_rate_bpm) : wire::format_tenths(v->temperature_df);
}

nlohmann::ordered_json vitals_json(const std::optional<wire::VitalSigns>& v) {
  if (!v) return nullptr;
  nlohmann::ordered_json j;
  j["heart_rate_bpm"] = v->heart_rate_bpm;
  j["temperature_f"] = v->temperature_df / 10.0;
  return j;
}

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Recon:
      return "recon";
    case Phase::Poison:
      return "poison";
    case Phase::Passive:
      return "passive";
    case Phase::Active:
      return "active";
    case Phase::Assess:
      return "assess";
  }
  return "unknown";
}

Phase parse_phase(std::string_view name) {
  for (Phase p : {Phase::Recon, Phase::Poison, Phase::Passive, Phase::Active, Phase::Assess}) {
    if (to_string(p) == name) return p;
  }
  throw PlanError("unknown phase: " + std::string(name));
}

// --- rules / plan ------------------------------------------------------------

std::string TamperRule::describe() const {
  std::string out;
  switch (target) {
    case Target::PlainField:
      for (const auto& [k, v] : fields) {
        if (!out.empty()) out += ',';
        out += k + "=" + v;
      }
      return "set " + out;
    case Target::CiphertextByte: {
      const std::string where = index ? "ciphertext[" + std::to_string(*index) + "]" : "ciphertext[random]";
      switch (action) {
        case Action::RandomByte:
          return "randomize " + where;
        case Action::FlipBit:
          return "flip " + where;
        case Action::SetValue:
          return "set " + where;
      }
      break;
    }
    case Target::IvBit:
      return "flip iv bit " + std::to_string(index.value_or(0));
  }
  return out;
}

void TamperRule::validate() const {
  switch (target) {
    case Target::PlainField:
      if (action != Action::SetValue) throw PlanError("plain field rules only support set_value");
      if (fields.empty()) throw PlanError("plain field rule without fields");
      break;
    case Target::CiphertextByte:
      if (action == Action::SetValue && !value) throw PlanError("ciphertext set_value rule needs a value");
      break;
    case Target::IvBit:
      if (action != Action::FlipBit) throw PlanError("iv rules only support flip_bit");
      if (!index || *index >= 128) throw PlanError("iv bit index must be in [0,128)");
      break;
  }
}

bool AttackPlan::has(Phase p) const { return std::find(phases.begin(), phases.end(), p) != phases.end(); }

std::pair<IpAddr4, IpAddr4> AttackPlan::effective_scan_range() const {
  if (scan_range) return *scan_range;
  IpAddr4 first = victim_ip;
  IpAddr4 last = victim_ip;
  first.octets[3] = 1;
  last.octets[3] = 254;
  return {first, last};
}

void AttackPlan::validate() const {
  if (has(Phase::Active) && !has(Phase::Poison)) throw PlanError("active phase requires poison");
  if (has(Phase::Poison) && !has(Phase::Recon)) throw PlanError("poison phase requires recon");
  if (has(Phase::Assess) && !has(Phase::Passive) && !has(Phase::Active)) {
    throw PlanError("assess phase requires passive or active");
  }
  if (repoison_interval_ms <= 0) throw PlanError("repoison interval must be > 0");
  if (recon_timeout_ms <= 0) throw PlanError("recon timeout must be > 0");
  const auto [first, last] = effective_scan_range();
  if (first.to_u32() > last.to_u32()) throw PlanError("scan range is empty");
  for (const auto& r : rules) r.validate();
}

std::size_t InterceptLog::telemetry_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const InterceptEntry& e) { return e.telemetry; }));
}

// --- attacker ----------------------------------------------------------------

Attacker::Attacker(std::string name, MacAddr mac, IpAddr4 ip, AttackPlan plan, Rng rng, HostOptions options)
    : Host(std::move(name), mac, ip, options), plan_(std::move(plan)), rng_(std::move(rng)) {
  plan_.validate();
  log_.attacker_mac = this->mac();
}

void Attacker::recon(IpAddr4 first, IpAddr4 last, std::function<void(const Inventory&)> done) {
  recon_active_ = true;
  for (std::uint32_t a = first.to_u32(); a <= last.to_u32(); ++a) {
    const IpAddr4 target = IpAddr4::from_u32(a);
    if (target == ip()) continue;
    ArpPacket request;
    request.op = ArpPacket::Op::Request;
    request.sender_mac = mac();
    request.sender_ip = ip();
    request.target_ip = target;
    send_arp(request, MacAddr::broadcast());
    if (a == 0xffffffffu) break;
  }
  medium().schedule(medium().now() + plan_.recon_timeout_ms, [this, done = std::move(done)] {
    recon_active_ = false;
    if (done) done(inventory_);
  });
}

void Attacker::on_arp(const ArpPacket& packet) {
  if (recon_active_ && packet.op == ArpPacket::Op::Reply && packet.target_ip == ip() &&
      packet.target_mac == mac()) {
    inventory_[packet.sender_ip] = packet.sender_mac;
  }
}

void Attacker::send_forged(IpAddr4 claimed_ip, const MacAddr& claimed_mac, IpAddr4 to_ip,
                           const MacAddr& to_mac) {
  ArpPacket reply;
  reply.op = ArpPacket::Op::Reply;
  reply.sender_mac = claimed_mac;
  reply.sender_ip = claimed_ip;
  reply.target_mac = to_mac;
  reply.target_ip = to_ip;
  send_arp(reply, to_mac);
}

void Attacker::poison(IpAddr4 victim_ip, IpAddr4 peer_ip) {
  if (!inventory_.contains(victim_ip)) throw PlanError("victim " + victim_ip.to_string() + " not in inventory");
  if (!inventory_.contains(peer_ip)) throw PlanError("peer " + peer_ip.to_string() + " not in inventory");
  poison_victim_ = victim_ip;
  poison_peer_ = peer_ip;
  poisoning_ = true;
  refresh_poison(++poison_generation_);
}

void Attacker::refresh_poison(std::uint64_t generation) {
  if (!poisoning_ || generation != poison_generation_) return;
  send_forged(poison_peer_, mac(), poison_victim_, inventory_.at(poison_victim_));
  send_forged(poison_victim_, mac(), poison_peer_, inventory_.at(poison_peer_));
  medium().schedule(medium().now() + plan_.repoison_interval_ms,
                    [this, generation] { refresh_poison(generation); });
}

void Attacker::stop_poison(bool corrective) {
  if (!poisoning_) return;
  poisoning_ = false;
  ++poison_generation_;
  if (!corrective) return;
  const MacAddr victim_mac = inventory_.at(poison_victim_);
  const MacAddr peer_mac = inventory_.at(poison_peer_);
  send_forged(poison_peer_, peer_mac, poison_victim_, victim_mac);
  send_forged(poison_victim_, victim_mac, poison_peer_, peer_mac);
}

void Attacker::execute(SimTime at) {
  if (plan_.has(Phase::Active)) {
    forward_mode_ = ForwardMode::Active;
  } else if (plan_.has(Phase::Passive)) {
    forward_mode_ = ForwardMode::Passive;
  }
  if (!plan_.has(Phase::Recon)) return;
  medium().schedule(at, [this] {
    const auto [first, last] = plan_.effective_scan_range();
    recon(first, last, [this](const Inventory&) {
      if (plan_.has(Phase::Poison)) poison(plan_.victim_ip, plan_.peer_ip);
    });
  });
}

void Attacker::finish() { stop_poison(plan_.restore_on_stop); }

void Attacker::on_foreign_ipv4(const EthernetFrame& frame, const Ipv4Packet& packet) {
  if (forward_mode_ == ForwardMode::Off) {
    Host::on_foreign_ipv4(frame, packet);
    return;
  }
  const auto route = inventory_.find(packet.dst);
  if (route == inventory_.end()) {
    medium().record_drop(frame, "no-route");
    return;
  }

  InterceptEntry entry;
  entry.t_ms = medium().now();
  entry.original = packet.payload;
  if (packet.src == plan_.victim_ip && packet.dst == plan_.peer_ip) {
    entry.direction = "victim->peer";
  } else if (packet.src == plan_.peer_ip && packet.dst == plan_.victim_ip) {
    entry.direction = "peer->victim";
  } else {
    entry.direction = "other";
  }
  if (entry.direction == "victim->peer") {
    try {
      entry.telemetry = wire::parse_http(packet.payload).path == wire::kDataPath;
    } catch (const wire::WireError&) {
      entry.telemetry = false;
    }
  }

  Bytes forwarded = packet.payload;
  if (entry.telemetry) {
    try {
      entry.extraction = wire::parse_plain(packet.payload);
    } catch (const wire::WireError&) {
    }
    if (forward_mode_ == ForwardMode::Active) forwarded = apply_rules(packet.payload, telemetry_seen_, entry);
    ++telemetry_seen_;
  } else {
    entry.note = "uninteresting";
  }
  entry.forwarded = forwarded;
  log_.entries.push_back(std::move(entry));

  Ipv4Packet relay = packet;
  relay.payload = std::move(forwarded);
  medium().send_frame(EthernetFrame{mac(), route->second, EtherType::Ipv4, relay.encode()});
}

Bytes Attacker::apply_rules(const Bytes& payload, std::size_t message_index, InterceptEntry& entry) {
  Bytes out = payload;
  const bool plain = wire::parse_http(payload).method == "GET";
  for (const auto& rule : plan_.rules) {
    if (rule.message && *rule.message != message_index) continue;
    if (rule.applies_to_plain() != plain) continue;
    if (plain) {
      try {
        for (const auto& [field, value] : rule.fields) out = wire::tamper_query(out, field, value);
      } catch (const wire::TamperError&) {
        continue;
      }
    } else {
      if (rule.target == TamperRule::Target::IvBit && plan_.framing != wire::Framing::Canonical) continue;
      out = tamper_envelope(out, rule);
    }
    if (!entry.rule.empty()) entry.rule += "; ";
    entry.rule += rule.describe();
    entry.beyond_paper = entry.beyond_paper || rule.beyond_paper();
  }
  return wire::fix_content_length(out);
}

Bytes Attacker::tamper_envelope(const Bytes& payload, const TamperRule& rule) {
  const wire::HttpRequest req = wire::parse_http(payload);
  const std::string body_text = to_string(req.body);
  const auto encoding = looks_like_hex(body_text) ? crypto::TextEncoding::Hex : crypto::TextEncoding::Base64;
  Bytes body;
  try {
    body = crypto::decode_text(body_text, encoding);
  } catch (const crypto::CryptoError&) {
    return payload;
  }
  const std::size_t ct_offset = plan_.framing == wire::Framing::Canonical ? crypto::kBlockSize : 0;
  if (body.size() <= ct_offset) return payload;

  if (rule.target == TamperRule::Target::IvBit) {
    body[*rule.index / 8] ^= static_cast<Byte>(0x80 >> (*rule.index % 8));
  } else {
    const std::size_t ct_size = body.size() - ct_offset;
    const std::size_t idx = rule.index ? *rule.index : static_cast<std::size_t>(rng_.uniform(0, ct_size - 1));
    if (idx >= ct_size) return payload;
    Byte& b = body[ct_offset + idx];
    switch (rule.action) {
      case TamperRule::Action::RandomByte:
        b ^= static_cast<Byte>(rng_.uniform(1, 255));
        break;
      case TamperRule::Action::FlipBit:
        b ^= 0x01;
        break;
      case TamperRule::Action::SetValue:
        b = *rule.value;
        break;
    }
  }
  const std::string new_text = crypto::encode_text(body, encoding);
  Bytes out(payload.begin(), payload.end() - static_cast<std::ptrdiff_t>(req.body.size()));
  out.insert(out.end(), new_text.begin(), new_text.end());
  return out;
}

// --- assessment --------------------------------------------------------------

ImpactReport assess(const InterceptLog& intercepts, const ServerLog& server_log) {
  if (intercepts.run_id != server_log.run_id) {
    throw AssessError("intercept log run '" + intercepts.run_id + "' does not match server log run '" +
                      server_log.run_id + "'");
  }
  std::vector<const TelemetryRecord*> relayed;
  for (const auto& r : server_log.records) {
    if (r.via_mac == intercepts.attacker_mac) relayed.push_back(&r);
  }

  ImpactReport report;
  std::size_t next = 0;
  for (const auto& e : intercepts.entries) {
    if (!e.telemetry) continue;
    if (next >= relayed.size()) throw AssessError("server log is missing relayed messages");
    const TelemetryRecord& rec = *relayed[next++];
    ++report.intercepted;
    if (e.extraction) ++report.readable;
    if (e.rule.empty()) continue;

    ++report.tampered;
    ImpactRow row;
    row.original = e.extraction;
    row.tampered = rec.vitals;
    if (!row.tampered) {
      try {
        row.tampered = wire::parse_plain(e.forwarded);
      } catch (const wire::WireError&) {
      }
    }
    row.verdict = rec.verdict;
    row.detection = rec.detection;
    row.rule = e.rule;
    row.beyond_paper = e.beyond_paper;
    if (rec.verdict == Verdict::Accepted) {
      if (e.beyond_paper) {
        ++report.beyond_paper_accepted;
      } else {
        ++report.accepted_despite_tamper;
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string ImpactReport::to_markdown() const {
  std::ostringstream out;
  out << "| Original Heart Rate (BPM) | Tampered Heart Rate (BPM) | Original Temperature (°F) "
         "| Tampered Temperature (°F) | Detection by Server | Server Verdict | Note |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out << "| " << vitals_cell(r.original, true) << " | " << vitals_cell(r.tampered, true) << " | "
        << vitals_cell(r.original, false) << " | " << vitals_cell(r.tampered, false) << " | "
        << to_string(r.detection) << " | " << to_string(r.verdict) << " | "
        << (r.beyond_paper ? "beyond-paper (CBC IV malleability)" : "") << " |\n";
  }
  out << "\n";
  out << "- Intercepted telemetry messages: " << intercepted << "\n";
  out << "- Readable by attacker: " << readable << "\n";
  out << "- Tampered: " << tampered << "\n";
  out << "- Accepted despite tampering: " << accepted_despite_tamper << "\n";
  if (beyond_paper_accepted > 0) {
    out << "- Accepted despite tampering (beyond-paper IV rules): " << beyond_paper_accepted << "\n";
  }
  return out.str();
}

std::string ImpactReport::to_json() const {
  nlohmann::ordered_json j;
  j["intercepted"] = intercepted;
  j["readable"] = readable;
  j["tampered"] = tampered;
  j["accepted_despite_tamper"] = accepted_despite_tamper;
  j["beyond_paper_accepted"] = beyond_paper_accepted;
  auto rows_json = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["original"] = vitals_json(r.original);
    row["tampered"] = vitals_json(r.tampered);
    row["verdict"] = to_string(r.verdict);
    row["detection"] = to_string(r.detection);
    row["rule"] = r.rule;
    row["beyond_paper"] = r.beyond_paper;
    rows_json.push_back(std::move(row));
  }
  j["rows"] = std::move(rows_json);
  return j.dump(2) + "\n";
}

}  // namespace medsec
