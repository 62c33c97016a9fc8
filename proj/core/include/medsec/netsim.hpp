#pragma once

// Deterministic discrete-event model of one switched LAN segment.
//
// Every frame is recorded in the medium's capture log (send / deliver / drop),
// which is the simulation's stand-in for a packet capture on the segment.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "medsec/address.hpp"
#include "medsec/bytes.hpp"
#include "medsec/rng.hpp"

namespace medsec {

/// Simulated time in whole milliseconds.
using SimTime = std::int64_t;

enum class EtherType : std::uint16_t { Ipv4 = 0x0800, Arp = 0x0806 };

std::string_view to_string(EtherType type);

struct EthernetFrame {
  MacAddr src;
  MacAddr dst;
  EtherType ethertype = EtherType::Ipv4;
  Bytes payload;
};

/// RFC 826 ARP for Ethernet/IPv4 (28 bytes on the wire).
struct ArpPacket {
  enum class Op : std::uint16_t { Request = 1, Reply = 2 };

  Op op = Op::Request;
  MacAddr sender_mac;
  IpAddr4 sender_ip;
  MacAddr target_mac;
  IpAddr4 target_ip;

  Bytes encode() const;
  static std::optional<ArpPacket> decode(std::span<const Byte> bytes);
};

/// Minimal IPv4 datagram: 20-byte header without options, checksummed.
struct Ipv4Packet {
  static constexpr Byte kProtocolTelemetry = 253;  // RFC 3692 experimental

  IpAddr4 src;
  IpAddr4 dst;
  std::uint16_t identification = 0;
  Byte ttl = 64;
  Byte protocol = kProtocolTelemetry;
  Bytes payload;

  Bytes encode() const;
  static std::optional<Ipv4Packet> decode(std::span<const Byte> bytes);
};

class SimClock {
 public:
  SimTime now() const { return now_; }
  /// Throws std::logic_error when asked to move backwards.
  void advance_to(SimTime t);

 private:
  SimTime now_ = 0;
};

class ArpCache {
 public:
  struct Entry {
    MacAddr mac;
    SimTime learned_at = 0;
  };

  /// No TTL means entries never expire.
  explicit ArpCache(std::optional<SimTime> ttl_ms = std::nullopt) : ttl_ms_(ttl_ms) {}

  /// Newest write wins.
  void learn(IpAddr4 ip, MacAddr mac, SimTime now) { entries_[ip] = Entry{mac, now}; }
  std::optional<MacAddr> lookup(IpAddr4 ip, SimTime now) const;
  void forget(IpAddr4 ip) { entries_.erase(ip); }

  const std::map<IpAddr4, Entry>& entries() const { return entries_; }

 private:
  std::optional<SimTime> ttl_ms_;
  std::map<IpAddr4, Entry> entries_;
};

struct CaptureEvent {
  enum class Kind { Send, Deliver, Drop };

  SimTime t_ms = 0;
  Kind kind = Kind::Send;
  MacAddr src;
  MacAddr dst;
  EtherType ethertype = EtherType::Ipv4;
  Bytes payload;
  std::string annotation;
};

std::string_view to_string(CaptureEvent::Kind kind);

/// One JSON object per line; field order and spelling are fixed.
void write_capture_jsonl(std::ostream& out, std::span<const CaptureEvent> events);

class Host;

class Medium {
 public:
  using NodeId = std::size_t;

  explicit Medium(SimTime propagation_delay_ms = 1);
  Medium(const Medium&) = delete;
  Medium& operator=(const Medium&) = delete;

  /// Registers a host. Throws std::invalid_argument on duplicate MAC or IP.
  NodeId attach(Host& host);

  SimTime now() const { return clock_.now(); }
  SimTime propagation_delay() const { return propagation_delay_ms_; }

  /// Transmits at the current time.
  void send_frame(EthernetFrame frame) { send_frame(std::move(frame), now()); }
  /// Transmits at `at` (>= now). Broadcasts reach every host except the sender.
  /// Unknown unicast destinations are dropped with annotation "no-receiver".
  void send_frame(EthernetFrame frame, SimTime at);

  /// Events at equal times run in scheduling order.
  void schedule(SimTime at, std::function<void()> action);

  /// Processes one event; false when the queue is empty.
  bool step();
  void run();
  /// Runs every event with time <= t, then sets the clock to t.
  void run_until(SimTime t);
  bool idle() const { return queue_.empty(); }

  /// Bernoulli loss on IPv4 frames transmitted by `sender`.
  void set_loss(const MacAddr& sender, double drop_probability, Rng rng);

  /// Records a frame a host refused (for example a malformed ARP body).
  void record_drop(const EthernetFrame& frame, std::string annotation);

  Host* host_by_mac(const MacAddr& mac) const;
  Host* host_by_ip(const IpAddr4& ip) const;
  const std::vector<Host*>& hosts() const { return hosts_; }

  const std::vector<CaptureEvent>& capture() const { return capture_; }
  std::uint64_t frames_sent() const { return frames_sent_; }
  std::uint64_t frames_delivered() const { return frames_delivered_; }

 private:
  struct Event {
    SimTime at;
    std::uint64_t seq;
    std::function<void()> action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };
  struct Loss {
    MacAddr sender;
    double probability;
    Rng rng;
  };

  void transmit(EthernetFrame frame);
  void record(CaptureEvent::Kind kind, const EthernetFrame& frame, std::string annotation);

  SimTime propagation_delay_ms_;
  SimClock clock_;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::vector<Host*> hosts_;
  std::vector<CaptureEvent> capture_;
  std::optional<Loss> loss_;
  std::uint64_t frames_sent_ = 0;
  std::uint64_t frames_delivered_ = 0;
};

struct HostOptions {
  SimTime arp_timeout_ms = 500;
  std::optional<SimTime> arp_ttl_ms;
};

class ArpResolutionError : public std::runtime_error {
 public:
  explicit ArpResolutionError(IpAddr4 ip)
      : std::runtime_error("ARP resolution failed for " + ip.to_string()), ip_(ip) {}
  IpAddr4 ip() const { return ip_; }

 private:
  IpAddr4 ip_;
};

/// A node with an IPv4 address and an ARP stack. Endpoints and the attacker
/// derive from this.
class Host {
 public:
  /// Empty optional means resolution failed after the ARP timeout.
  using ResolveCallback = std::function<void(std::optional<MacAddr>)>;

  Host(std::string name, MacAddr mac, IpAddr4 ip, HostOptions options = {});
  virtual ~Host() = default;
  Host(const Host&) = delete;
  Host& operator=(const Host&) = delete;

  const std::string& name() const { return name_; }
  const MacAddr& mac() const { return mac_; }
  const IpAddr4& ip() const { return ip_; }
  const ArpCache& arp_cache() const { return cache_; }
  ArpCache& arp_cache() { return cache_; }

  /// Called by Medium::attach.
  void bind(Medium& medium) { medium_ = &medium; }
  bool attached() const { return medium_ != nullptr; }

  /// Entry point for frames the medium delivers to this host.
  void receive(const EthernetFrame& frame);

  /// Cached mapping when present (callback runs synchronously); otherwise a
  /// broadcast request and a timeout.
  void arp_resolve(IpAddr4 ip, ResolveCallback callback);

  /// Replies, solicited or not, overwrite the cache entry for sender_ip.
  /// Requests for this host's IP are answered with a unicast reply.
  void handle_arp(const ArpPacket& packet);

  /// Resolves `dst` and transmits. `on_sent(false)` when resolution fails.
  void send_ip(IpAddr4 dst, Bytes payload, std::uint16_t identification,
               std::function<void(bool)> on_sent = {});

 protected:
  Medium& medium() const;

  /// IPv4 datagram addressed to this host.
  virtual void on_ipv4(const EthernetFrame& /*frame*/, const Ipv4Packet& /*packet*/) {}
  /// IPv4 datagram delivered to this MAC but addressed to another IP. Hosts
  /// do not route, so the default discards it.
  virtual void on_foreign_ipv4(const EthernetFrame& frame, const Ipv4Packet& packet);
  /// Any ARP packet, after standard processing.
  virtual void on_arp(const ArpPacket& /*packet*/) {}

  void send_arp(const ArpPacket& packet, const MacAddr& dst);

 private:
  struct Pending {
    std::uint64_t generation = 0;
    std::vector<ResolveCallback> callbacks;
  };

  std::string name_;
  MacAddr mac_;
  IpAddr4 ip_;
  HostOptions options_;
  ArpCache cache_;
  Medium* medium_ = nullptr;
  std::map<IpAddr4, Pending> pending_;
  std::uint64_t next_generation_ = 0;
};

/// Runs the medium until `host` resolves `ip`. Throws ArpResolutionError.
MacAddr arp_resolve_sync(Medium& medium, Host& host, IpAddr4 ip);

}  // namespace medsec
