#include "medsec/netsim.hpp"

#include <algorithm>
#include <utility>

#include "json.hpp"

namespace medsec {
namespace {

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<Byte>(v >> 8));
  out.push_back(static_cast<Byte>(v));
}

std::uint16_t get_u16(std::span<const Byte> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

template <std::size_t N>
void put_octets(Bytes& out, const std::array<Byte, N>& octets) {
  out.insert(out.end(), octets.begin(), octets.end());
}

template <std::size_t N>
std::array<Byte, N> get_octets(std::span<const Byte> b, std::size_t at) {
  std::array<Byte, N> out{};
  std::copy_n(b.begin() + static_cast<std::ptrdiff_t>(at), N, out.begin());
  return out;
}

std::uint16_t ipv4_checksum(std::span<const Byte> header) {
  std::uint32_t sum = 0;
  for (std::size_t i = 0; i + 1 < header.size(); i += 2) sum += get_u16(header, i);
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

constexpr std::size_t kArpSize = 28;
constexpr std::size_t kIpv4HeaderSize = 20;

}  // namespace

std::string_view to_string(EtherType type) {
  switch (type) {
    case EtherType::Arp:
      return "ARP";
    case EtherType::Ipv4:
      return "IPV4";
  }
  return "UNKNOWN";
}

std::string_view to_string(CaptureEvent::Kind kind) {
  switch (kind) {
    case CaptureEvent::Kind::Send:
      return "send";
    case CaptureEvent::Kind::Deliver:
      return "deliver";
    case CaptureEvent::Kind::Drop:
      return "drop";
  }
  return "unknown";
}

// --- ARP / IPv4 codecs -------------------------------------------------------

Bytes ArpPacket::encode() const {
  Bytes out;
  out.reserve(kArpSize);
  put_u16(out, 1);       // htype: Ethernet
  put_u16(out, 0x0800);  // ptype: IPv4
  out.push_back(6);
  out.push_back(4);
  put_u16(out, static_cast<std::uint16_t>(op));
  put_octets(out, sender_mac.octets);
  put_octets(out, sender_ip.octets);
  put_octets(out, target_mac.octets);
  put_octets(out, target_ip.octets);
  return out;
}

std::optional<ArpPacket> ArpPacket::decode(std::span<const Byte> b) {
  if (b.size() != kArpSize) return std::nullopt;
  if (get_u16(b, 0) != 1 || get_u16(b, 2) != 0x0800 || b[4] != 6 || b[5] != 4) return std::nullopt;
  const auto op = get_u16(b, 6);
  if (op != 1 && op != 2) return std::nullopt;
  ArpPacket p;
  p.op = static_cast<Op>(op);
  p.sender_mac.octets = get_octets<6>(b, 8);
  p.sender_ip.octets = get_octets<4>(b, 14);
  p.target_mac.octets = get_octets<6>(b, 18);
  p.target_ip.octets = get_octets<4>(b, 24);
  if (p.sender_mac.is_zero() || p.sender_mac.is_broadcast()) return std::nullopt;
  if (p.op == Op::Reply && p.target_mac.is_zero()) return std::nullopt;
  return p;
}

Bytes Ipv4Packet::encode() const {
  Bytes out;
  out.reserve(kIpv4HeaderSize + payload.size());
  out.push_back(0x45);  // version 4, IHL 5
  out.push_back(0);
  put_u16(out, static_cast<std::uint16_t>(kIpv4HeaderSize + payload.size()));
  put_u16(out, identification);
  put_u16(out, 0x4000);  // DF
  out.push_back(ttl);
  out.push_back(protocol);
  put_u16(out, 0);
  put_octets(out, src.octets);
  put_octets(out, dst.octets);
  const auto sum = ipv4_checksum(std::span<const Byte>(out).first(kIpv4HeaderSize));
  out[10] = static_cast<Byte>(sum >> 8);
  out[11] = static_cast<Byte>(sum);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::optional<Ipv4Packet> Ipv4Packet::decode(std::span<const Byte> b) {
  if (b.size() < kIpv4HeaderSize || b[0] != 0x45) return std::nullopt;
  if (get_u16(b, 2) != b.size()) return std::nullopt;
  if (ipv4_checksum(b.first(kIpv4HeaderSize)) != 0) return std::nullopt;
  Ipv4Packet p;
  p.identification = get_u16(b, 4);
  p.ttl = b[8];
  p.protocol = b[9];
  p.src.octets = get_octets<4>(b, 12);
  p.dst.octets = get_octets<4>(b, 16);
  p.payload.assign(b.begin() + kIpv4HeaderSize, b.end());
  return p;
}

// --- clock / cache -----------------------------------------------------------

void SimClock::advance_to(SimTime t) {
  if (t < now_) throw std::logic_error("simulation clock cannot move backwards");
  now_ = t;
}

std::optional<MacAddr> ArpCache::lookup(IpAddr4 ip, SimTime now) const {
  const auto it = entries_.find(ip);
  if (it == entries_.end()) return std::nullopt;
  if (ttl_ms_ && now - it->second.learned_at >= *ttl_ms_) return std::nullopt;
  return it->second.mac;
}

// --- capture export ----------------------------------------------------------

void write_capture_jsonl(std::ostream& out, std::span<const CaptureEvent> events) {
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    j["t_ms"] = e.t_ms;
    j["event"] = to_string(e.kind);
    j["src_mac"] = e.src.to_string();
    j["dst_mac"] = e.dst.to_string();
    j["ethertype"] = to_string(e.ethertype);
    j["payload_hex"] = to_hex(e.payload);
    j["annotation"] = e.annotation;
    out << j.dump() << '\n';
  }
}

// --- medium ------------------------------------------------------------------

Medium::Medium(SimTime propagation_delay_ms) : propagation_delay_ms_(propagation_delay_ms) {
  if (propagation_delay_ms < 0) throw std::invalid_argument("negative propagation delay");
}

Medium::NodeId Medium::attach(Host& host) {
  for (const Host* h : hosts_) {
    if (h->mac() == host.mac()) throw std::invalid_argument("duplicate MAC " + host.mac().to_string());
    if (h->ip() == host.ip()) throw std::invalid_argument("duplicate IP " + host.ip().to_string());
  }
  if (host.mac().is_broadcast() || host.mac().is_zero()) {
    throw std::invalid_argument("reserved MAC " + host.mac().to_string());
  }
  hosts_.push_back(&host);
  host.bind(*this);
  return hosts_.size() - 1;
}

void Medium::schedule(SimTime at, std::function<void()> action) {
  if (at < now()) throw std::logic_error("cannot schedule an event in the past");
  queue_.push(Event{at, next_seq_++, std::move(action)});
}

void Medium::send_frame(EthernetFrame frame, SimTime at) {
  if (frame.payload.empty()) throw std::invalid_argument("empty frame payload");
  if (host_by_mac(frame.src) == nullptr) {
    throw std::invalid_argument("frame source " + frame.src.to_string() + " is not attached");
  }
  if (at == now()) {
    transmit(std::move(frame));
  } else {
    schedule(at, [this, f = std::move(frame)]() mutable { transmit(std::move(f)); });
  }
}

void Medium::transmit(EthernetFrame frame) {
  ++frames_sent_;
  record(CaptureEvent::Kind::Send, frame, "");

  if (loss_ && frame.ethertype == EtherType::Ipv4 && frame.src == loss_->sender &&
      loss_->rng.bernoulli(loss_->probability)) {
    record(CaptureEvent::Kind::Drop, frame, "loss");
    return;
  }

  std::vector<Host*> receivers;
  if (frame.dst.is_broadcast()) {
    for (Host* h : hosts_) {
      if (h->mac() != frame.src) receivers.push_back(h);
    }
  } else if (Host* h = host_by_mac(frame.dst)) {
    receivers.push_back(h);
  } else {
    record(CaptureEvent::Kind::Drop, frame, "no-receiver");
    return;
  }

  const SimTime at = now() + propagation_delay_ms_;
  for (Host* h : receivers) {
    schedule(at, [this, h, frame] {
      ++frames_delivered_;
      record(CaptureEvent::Kind::Deliver, frame, "to:" + h->name());
      h->receive(frame);
    });
  }
}

void Medium::record(CaptureEvent::Kind kind, const EthernetFrame& frame, std::string annotation) {
  capture_.push_back(
      CaptureEvent{now(), kind, frame.src, frame.dst, frame.ethertype, frame.payload, std::move(annotation)});
}

void Medium::record_drop(const EthernetFrame& frame, std::string annotation) {
  record(CaptureEvent::Kind::Drop, frame, std::move(annotation));
}

bool Medium::step() {
  if (queue_.empty()) return false;
  // Copy out before popping: the action may schedule more events.
  Event ev = queue_.top();
  queue_.pop();
  clock_.advance_to(ev.at);
  ev.action();
  return true;
}

void Medium::run() {
  while (step()) {
  }
}

void Medium::run_until(SimTime t) {
  while (!queue_.empty() && queue_.top().at <= t) step();
  if (t > now()) clock_.advance_to(t);
}

void Medium::set_loss(const MacAddr& sender, double drop_probability, Rng rng) {
  if (drop_probability < 0.0 || drop_probability > 1.0) {
    throw std::invalid_argument("drop probability outside [0,1]");
  }
  loss_ = Loss{sender, drop_probability, std::move(rng)};
}

Host* Medium::host_by_mac(const MacAddr& mac) const {
  for (Host* h : hosts_) {
    if (h->mac() == mac) return h;
  }
  return nullptr;
}

Host* Medium::host_by_ip(const IpAddr4& ip) const {
  for (Host* h : hosts_) {
    if (h->ip() == ip) return h;
  }
  return nullptr;
}

// --- host --------------------------------------------------------------------

Host::Host(std::string name, MacAddr mac, IpAddr4 ip, HostOptions options)
    : name_(std::move(name)), mac_(mac), ip_(ip), options_(options), cache_(options.arp_ttl_ms) {}

Medium& Host::medium() const {
  if (medium_ == nullptr) throw std::logic_error("host " + name_ + " is not attached to a medium");
  return *medium_;
}

void Host::receive(const EthernetFrame& frame) {
  switch (frame.ethertype) {
    case EtherType::Arp: {
      const auto packet = ArpPacket::decode(frame.payload);
      if (!packet) {
        medium().record_drop(frame, "malformed-arp");
        return;
      }
      handle_arp(*packet);
      on_arp(*packet);
      return;
    }
    case EtherType::Ipv4: {
      const auto packet = Ipv4Packet::decode(frame.payload);
      if (!packet) {
        medium().record_drop(frame, "malformed-ipv4");
        return;
      }
      if (packet->dst == ip_) {
        on_ipv4(frame, *packet);
      } else {
        on_foreign_ipv4(frame, *packet);
      }
      return;
    }
  }
}

void Host::on_foreign_ipv4(const EthernetFrame& frame, const Ipv4Packet& /*packet*/) {
  medium().record_drop(frame, "not-for-host:" + name_);
}

void Host::send_arp(const ArpPacket& packet, const MacAddr& dst) {
  medium().send_frame(EthernetFrame{mac_, dst, EtherType::Arp, packet.encode()});
}

void Host::handle_arp(const ArpPacket& packet) {
  const SimTime now = medium().now();
  if (packet.op == ArpPacket::Op::Reply) {
    cache_.learn(packet.sender_ip, packet.sender_mac, now);
    if (auto it = pending_.find(packet.sender_ip); it != pending_.end()) {
      auto callbacks = std::move(it->second.callbacks);
      pending_.erase(it);
      for (auto& cb : callbacks) cb(packet.sender_mac);
    }
    return;
  }
  if (packet.target_ip != ip_) return;
  // RFC 826: the target of a request learns the requester.
  cache_.learn(packet.sender_ip, packet.sender_mac, now);
  ArpPacket reply;
  reply.op = ArpPacket::Op::Reply;
  reply.sender_mac = mac_;
  reply.sender_ip = ip_;
  reply.target_mac = packet.sender_mac;
  reply.target_ip = packet.sender_ip;
  send_arp(reply, packet.sender_mac);
}

void Host::arp_resolve(IpAddr4 ip, ResolveCallback callback) {
  Medium& m = medium();
  if (auto mac = cache_.lookup(ip, m.now())) {
    callback(*mac);
    return;
  }
  auto [it, inserted] = pending_.try_emplace(ip);
  it->second.callbacks.push_back(std::move(callback));
  if (!inserted) return;
  const std::uint64_t generation = it->second.generation = next_generation_++;

  ArpPacket request;
  request.op = ArpPacket::Op::Request;
  request.sender_mac = mac_;
  request.sender_ip = ip_;
  request.target_ip = ip;
  send_arp(request, MacAddr::broadcast());

  m.schedule(m.now() + options_.arp_timeout_ms, [this, ip, generation] {
    auto pending = pending_.find(ip);
    if (pending == pending_.end() || pending->second.generation != generation) return;
    auto callbacks = std::move(pending->second.callbacks);
    pending_.erase(pending);
    for (auto& cb : callbacks) cb(std::nullopt);
  });
}

void Host::send_ip(IpAddr4 dst, Bytes payload, std::uint16_t identification,
                   std::function<void(bool)> on_sent) {
  arp_resolve(dst, [this, dst, identification, payload = std::move(payload),
                    on_sent = std::move(on_sent)](std::optional<MacAddr> mac) mutable {
    if (!mac) {
      if (on_sent) on_sent(false);
      return;
    }
    Ipv4Packet packet;
    packet.src = ip_;
    packet.dst = dst;
    packet.identification = identification;
    packet.payload = std::move(payload);
    medium().send_frame(EthernetFrame{mac_, *mac, EtherType::Ipv4, packet.encode()});
    if (on_sent) on_sent(true);
  });
}

MacAddr arp_resolve_sync(Medium& medium, Host& host, IpAddr4 ip) {
  std::optional<std::optional<MacAddr>> outcome;
  host.arp_resolve(ip, [&outcome](std::optional<MacAddr> mac) { outcome = mac; });
  while (!outcome && medium.step()) {
  }
  if (!outcome || !*outcome) throw ArpResolutionError(ip);
  return **outcome;
}

}  // namespace medsec
