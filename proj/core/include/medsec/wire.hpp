#pragma once

// Byte-exact telemetry wire formats.
//
// Plain mode: a bodiless GET whose query carries the reading.
//   GET /data?HeartRate=78&Temperature=98.6 HTTP/1.1\r\n
//   Host: 192.168.1.100\r\n
//   User-Agent: ESP8266HTTPClient\r\n
//   \r\n
//
// Encrypted mode: a POST whose body is the text-encoded envelope.
//   POST /data HTTP/1.1\r\n
//   Host: 192.168.1.100\r\n
//   Content-Type: application/octet-stream\r\n
//   Content-Length: 96\r\n
//   \r\n
//   <hex or base64 of IV || ciphertext>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medsec/address.hpp"
#include "medsec/bytes.hpp"
#include "medsec/crypto.hpp"

namespace medsec::wire {

inline constexpr std::string_view kDataPath = "/data";
inline constexpr std::string_view kUserAgent = "ESP8266HTTPClient";
inline constexpr std::string_view kOctetStream = "application/octet-stream";

class WireError : public std::runtime_error {
 public:
  explicit WireError(std::string reason) : std::runtime_error(reason), reason_(std::move(reason)) {}
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
};

class TamperError : public WireError {
 public:
  using WireError::WireError;
};

/// One reading. Temperature is held in tenths of a degree Fahrenheit so that
/// "98.6" round-trips exactly.
struct VitalSigns {
  int heart_rate_bpm = 0;
  int temperature_df = 0;

  friend bool operator==(const VitalSigns&, const VitalSigns&) = default;
};

/// 986 -> "98.6", 0 -> "0.0", -5 -> "-0.5".
std::string format_tenths(int tenths);
/// Accepts an optional '-', digits, and at most one fractional digit.
std::optional<int> parse_tenths(std::string_view text);
std::optional<int> parse_int(std::string_view text);

struct HttpRequest {
  std::string method;
  std::string path;
  /// Raw (not percent-decoded) key/value pairs in wire order.
  std::vector<std::pair<std::string, std::string>> query;
  std::string version;
  std::vector<std::pair<std::string, std::string>> headers;
  Bytes body;

  /// Case-insensitive header lookup; first match.
  std::optional<std::string_view> header(std::string_view name) const;
  std::optional<std::string_view> query_value(std::string_view key) const;
  std::string target() const;
  Bytes serialize() const;
};

/// Strict parse of one complete request. Throws WireError with reasons such
/// as "malformed request line", "bad header syntax", "length mismatch".
HttpRequest parse_http(std::span<const Byte> bytes);

Bytes encode_plain(const VitalSigns& vitals, IpAddr4 server_ip);
/// Throws WireError: "wrong method", "wrong path", "missing key: X",
/// "non-numeric: X".
VitalSigns parse_plain(std::span<const Byte> bytes);

/// Canonical framing carries IV || ciphertext. Fidelity framing carries the
/// ciphertext alone; both ends then use a fixed, pre-agreed IV.
enum class Framing { Canonical, Fidelity };

std::string_view to_string(Framing framing);
Framing parse_framing(std::string_view name);

Bytes encode_encrypted(const crypto::Envelope& envelope, IpAddr4 server_ip,
                       crypto::TextEncoding encoding, Framing framing = Framing::Canonical);

/// Body of an encrypted request before it is split into IV and ciphertext.
struct EncryptedBody {
  crypto::TextEncoding encoding = crypto::TextEncoding::Hex;
  std::string text;

  /// Throws WireError on bad alphabet or length.
  Bytes decode() const;
};

/// Requires POST /data with an octet-stream body. Throws WireError.
EncryptedBody parse_encrypted(std::span<const Byte> bytes, crypto::TextEncoding encoding);

/// Rebuilds the envelope from a decoded body. Throws WireError when the body
/// is not IV plus whole blocks (canonical) or not whole blocks (fidelity).
crypto::Envelope split_envelope(std::span<const Byte> decoded, Framing framing,
                                const crypto::Iv& fidelity_iv);

/// Rewrites one query value in place, preserving every other byte.
/// Throws TamperError when the request does not parse or the field is absent.
Bytes tamper_query(std::span<const Byte> request, std::string_view field, std::string_view new_value);

/// Recomputes Content-Length (when present) after the body changed size.
Bytes fix_content_length(std::span<const Byte> request);

/// The sealed plaintext: {"HeartRate":78,"Temperature":98.6,"Id":"dev","Seq":1}
struct TelemetryMessage {
  VitalSigns vitals;
  std::string device_id;
  std::uint64_t seq = 0;

  friend bool operator==(const TelemetryMessage&, const TelemetryMessage&) = default;
};

std::string encode_message(const TelemetryMessage& message);
/// Only the exact canonical serialization is accepted. Throws WireError.
TelemetryMessage decode_message(std::string_view json);

/// Fixed acknowledgment the server returns for every complete request.
Bytes ack_response();
bool is_ack(std::span<const Byte> bytes);

}  // namespace medsec::wire
