#include "medsec/wire.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace medsec::wire {
namespace {

constexpr std::string_view kCrlf = "\r\n";

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; };
           return lower(x) == lower(y);
         });
}

bool is_token_char(char c) {
  if (c >= 'a' && c <= 'z') return true;
  if (c >= 'A' && c <= 'Z') return true;
  if (c >= '0' && c <= '9') return true;
  return std::string_view("!#$%&'*+-.^_`|~").find(c) != std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

struct QueryPair {
  std::string_view key;
  std::string_view value;
  std::size_t value_offset;  // within the query string
};

// Splits "a=1&b=2" keeping offsets so values can be rewritten in place.
std::vector<QueryPair> split_query(std::string_view query) {
  std::vector<QueryPair> pairs;
  if (query.empty()) return pairs;
  std::size_t pos = 0;
  while (true) {
    const std::size_t amp = query.find('&', pos);
    const std::string_view item = query.substr(pos, amp == std::string_view::npos ? amp : amp - pos);
    if (item.empty()) throw WireError("malformed query");
    const std::size_t eq = item.find('=');
    if (eq == 0) throw WireError("malformed query");
    if (eq == std::string_view::npos) {
      pairs.push_back({item, std::string_view{}, pos + item.size()});
    } else {
      pairs.push_back({item.substr(0, eq), item.substr(eq + 1), pos + eq + 1});
    }
    if (amp == std::string_view::npos) break;
    pos = amp + 1;
  }
  return pairs;
}

struct Head {
  std::string_view method;
  std::string_view target;
  std::string_view version;
  std::vector<std::pair<std::string_view, std::string_view>> headers;
  std::size_t body_offset = 0;
};

Head parse_head(std::string_view text) {
  const std::size_t end = text.find("\r\n\r\n");
  if (end == std::string_view::npos) throw WireError("incomplete headers");
  Head head;
  head.body_offset = end + 4;

  const std::string_view block = text.substr(0, end + 2);
  std::size_t line_end = block.find(kCrlf);
  const std::string_view request_line = block.substr(0, line_end);

  const std::size_t sp1 = request_line.find(' ');
  const std::size_t sp2 = sp1 == std::string_view::npos ? sp1 : request_line.find(' ', sp1 + 1);
  if (sp1 == std::string_view::npos || sp2 == std::string_view::npos ||
      request_line.find(' ', sp2 + 1) != std::string_view::npos) {
    throw WireError("malformed request line");
  }
  head.method = request_line.substr(0, sp1);
  head.target = request_line.substr(sp1 + 1, sp2 - sp1 - 1);
  head.version = request_line.substr(sp2 + 1);
  if (head.method.empty() || !std::all_of(head.method.begin(), head.method.end(),
                                          [](char c) { return c >= 'A' && c <= 'Z'; })) {
    throw WireError("malformed request line");
  }
  if (head.target.empty() || head.target.front() != '/') throw WireError("malformed request line");
  if (head.version != "HTTP/1.1" && head.version != "HTTP/1.0") throw WireError("malformed request line");
  for (char c : request_line) {
    if (c == '\r' || c == '\n' || c == '\t') throw WireError("malformed request line");
  }

  std::size_t pos = line_end + 2;
  while (pos < block.size()) {
    line_end = block.find(kCrlf, pos);
    const std::string_view line = block.substr(pos, line_end - pos);
    pos = line_end + 2;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0) throw WireError("bad header syntax");
    const std::string_view name = line.substr(0, colon);
    if (!std::all_of(name.begin(), name.end(), is_token_char)) throw WireError("bad header syntax");
    const std::string_view value = trim(line.substr(colon + 1));
    for (char c : value) {
      if (c == '\r' || c == '\n') throw WireError("bad header syntax");
    }
    head.headers.emplace_back(name, value);
  }
  return head;
}

std::optional<std::string_view> find_header(const Head& head, std::string_view name) {
  for (const auto& [n, v] : head.headers) {
    if (iequals(n, name)) return v;
  }
  return std::nullopt;
}

}  // namespace

std::string format_tenths(int tenths) {
  const bool negative = tenths < 0;
  const long long magnitude = negative ? -static_cast<long long>(tenths) : tenths;
  std::string out = negative ? "-" : "";
  out += std::to_string(magnitude / 10);
  out += '.';
  out += static_cast<char>('0' + magnitude % 10);
  return out;
}

std::optional<int> parse_int(std::string_view text) {
  if (text.empty()) return std::nullopt;
  int value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (*begin == '+') return std::nullopt;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::optional<int> parse_tenths(std::string_view text) {
  const std::size_t dot = text.find('.');
  if (dot == std::string_view::npos) {
    const auto whole = parse_int(text);
    if (!whole || *whole > std::numeric_limits<int>::max() / 10 ||
        *whole < std::numeric_limits<int>::min() / 10) {
      return std::nullopt;
    }
    return *whole * 10;
  }
  const std::string_view int_part = text.substr(0, dot);
  const std::string_view frac = text.substr(dot + 1);
  if (frac.size() != 1 || frac[0] < '0' || frac[0] > '9') return std::nullopt;
  const bool negative = !int_part.empty() && int_part[0] == '-';
  const std::string_view digits = negative ? int_part.substr(1) : int_part;
  if (digits.empty() || digits[0] == '-') return std::nullopt;
  const auto whole = parse_int(digits);
  if (!whole || *whole > std::numeric_limits<int>::max() / 10 - 1) return std::nullopt;
  const int magnitude = *whole * 10 + (frac[0] - '0');
  return negative ? -magnitude : magnitude;
}

// --- HttpRequest -------------------------------------------------------------

std::optional<std::string_view> HttpRequest::header(std::string_view name) const {
  for (const auto& [n, v] : headers) {
    if (iequals(n, name)) return std::string_view(v);
  }
  return std::nullopt;
}

std::optional<std::string_view> HttpRequest::query_value(std::string_view key) const {
  for (const auto& [k, v] : query) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

std::string HttpRequest::target() const {
  std::string t = path;
  if (!query.empty()) {
    t += '?';
    for (std::size_t i = 0; i < query.size(); ++i) {
      if (i) t += '&';
      t += query[i].first;
      t += '=';
      t += query[i].second;
    }
  }
  return t;
}

Bytes HttpRequest::serialize() const {
  std::string head = method + ' ' + target() + ' ' + version + "\r\n";
  for (const auto& [n, v] : headers) head += n + ": " + v + "\r\n";
  head += "\r\n";
  Bytes out = to_bytes(head);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

HttpRequest parse_http(std::span<const Byte> bytes) {
  const std::string_view text = as_string_view(bytes);
  const Head head = parse_head(text);

  HttpRequest req;
  req.method = head.method;
  req.version = head.version;
  const std::size_t q = head.target.find('?');
  req.path = head.target.substr(0, q);
  if (q != std::string_view::npos) {
    for (const auto& p : split_query(head.target.substr(q + 1))) req.query.emplace_back(p.key, p.value);
  }
  for (const auto& [n, v] : head.headers) req.headers.emplace_back(n, v);

  const std::size_t body_size = bytes.size() - head.body_offset;
  if (const auto cl = find_header(head, "Content-Length")) {
    std::size_t declared = 0;
    auto [ptr, ec] = std::from_chars(cl->data(), cl->data() + cl->size(), declared);
    if (ec != std::errc{} || ptr != cl->data() + cl->size() || cl->empty()) {
      throw WireError("bad header syntax");
    }
    if (declared != body_size) throw WireError("length mismatch");
  } else if (body_size != 0) {
    throw WireError("unexpected body");
  }
  req.body.assign(bytes.begin() + static_cast<std::ptrdiff_t>(head.body_offset), bytes.end());
  return req;
}

// --- plain telemetry ---------------------------------------------------------

Bytes encode_plain(const VitalSigns& vitals, IpAddr4 server_ip) {
  std::string out = "GET /data?HeartRate=" + std::to_string(vitals.heart_rate_bpm) +
                    "&Temperature=" + format_tenths(vitals.temperature_df) + " HTTP/1.1\r\n";
  out += "Host: " + server_ip.to_string() + "\r\n";
  out += "User-Agent: " + std::string(kUserAgent) + "\r\n";
  out += "\r\n";
  return to_bytes(out);
}

VitalSigns parse_plain(std::span<const Byte> bytes) {
  const HttpRequest req = parse_http(bytes);
  if (req.method != "GET") throw WireError("wrong method");
  if (req.path != kDataPath) throw WireError("wrong path");
  const auto hr = req.query_value("HeartRate");
  if (!hr) throw WireError("missing key: HeartRate");
  const auto temp = req.query_value("Temperature");
  if (!temp) throw WireError("missing key: Temperature");
  const auto hr_value = parse_int(*hr);
  if (!hr_value) throw WireError("non-numeric: HeartRate");
  const auto temp_value = parse_tenths(*temp);
  if (!temp_value) throw WireError("non-numeric: Temperature");
  return VitalSigns{*hr_value, *temp_value};
}

// --- encrypted telemetry -----------------------------------------------------

std::string_view to_string(Framing framing) {
  return framing == Framing::Canonical ? "canonical" : "fidelity";
}

Framing parse_framing(std::string_view name) {
  if (name == "canonical") return Framing::Canonical;
  if (name == "fidelity") return Framing::Fidelity;
  throw std::invalid_argument("unknown framing: " + std::string(name));
}

Bytes encode_encrypted(const crypto::Envelope& envelope, IpAddr4 server_ip,
                       crypto::TextEncoding encoding, Framing framing) {
  const std::string body = framing == Framing::Canonical
                               ? crypto::encode_text(envelope.serialize(), encoding)
                               : crypto::encode_text(envelope.ciphertext, encoding);
  std::string out = "POST /data HTTP/1.1\r\n";
  out += "Host: " + server_ip.to_string() + "\r\n";
  out += "Content-Type: " + std::string(kOctetStream) + "\r\n";
  out += "Content-Length: " + std::to_string(body.size()) + "\r\n";
  out += "\r\n";
  out += body;
  return to_bytes(out);
}

Bytes EncryptedBody::decode() const {
  try {
    return crypto::decode_text(text, encoding);
  } catch (const crypto::CryptoError& e) {
    throw WireError(std::string("bad body encoding: ") + e.what());
  }
}

EncryptedBody parse_encrypted(std::span<const Byte> bytes, crypto::TextEncoding encoding) {
  const HttpRequest req = parse_http(bytes);
  if (req.method != "POST") throw WireError("wrong method");
  if (req.path != kDataPath || !req.query.empty()) throw WireError("wrong path");
  const auto type = req.header("Content-Type");
  if (!type || *type != kOctetStream) throw WireError("wrong content type");
  return EncryptedBody{encoding, medsec::to_string(req.body)};
}

crypto::Envelope split_envelope(std::span<const Byte> decoded, Framing framing,
                                const crypto::Iv& fidelity_iv) {
  if (framing == Framing::Fidelity) {
    if (decoded.empty() || decoded.size() % crypto::kBlockSize != 0) {
      throw WireError("ciphertext not block aligned");
    }
    return crypto::Envelope{fidelity_iv, Bytes(decoded.begin(), decoded.end())};
  }
  try {
    return crypto::Envelope::parse(decoded);
  } catch (const crypto::CryptoError&) {
    throw WireError("envelope not IV plus whole blocks");
  }
}

// --- tampering ---------------------------------------------------------------

Bytes tamper_query(std::span<const Byte> request, std::string_view field, std::string_view new_value) {
  const std::string_view text = as_string_view(request);
  Head head;
  try {
    head = parse_head(text);
    parse_http(request);
  } catch (const WireError& e) {
    throw TamperError("request does not parse: " + e.reason());
  }
  for (char c : new_value) {
    if (c == '&' || c == ' ' || c == '#' || c == '\r' || c == '\n' || c == '?') {
      throw TamperError("value not representable in a query string");
    }
  }
  const std::size_t q = head.target.find('?');
  if (q == std::string_view::npos) throw TamperError("field absent: " + std::string(field));
  const std::string_view query = head.target.substr(q + 1);
  const std::size_t query_offset = static_cast<std::size_t>(query.data() - text.data());
  for (const auto& pair : split_query(query)) {
    if (pair.key != field) continue;
    Bytes out(request.begin(), request.end());
    const auto at = out.begin() + static_cast<std::ptrdiff_t>(query_offset + pair.value_offset);
    if (pair.value.data() == nullptr) {
      // Key without '=': insert one.
      const std::string inserted = "=" + std::string(new_value);
      out.insert(at, inserted.begin(), inserted.end());
    } else {
      out.erase(at, at + static_cast<std::ptrdiff_t>(pair.value.size()));
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(query_offset + pair.value_offset),
                 new_value.begin(), new_value.end());
    }
    return out;
  }
  throw TamperError("field absent: " + std::string(field));
}

Bytes fix_content_length(std::span<const Byte> request) {
  const std::string_view text = as_string_view(request);
  const Head head = parse_head(text);
  Bytes out(request.begin(), request.end());
  for (const auto& [name, value] : head.headers) {
    if (!iequals(name, "Content-Length")) continue;
    const std::string actual = std::to_string(request.size() - head.body_offset);
    const std::size_t offset = static_cast<std::size_t>(value.data() - text.data());
    const auto at = out.begin() + static_cast<std::ptrdiff_t>(offset);
    out.erase(at, at + static_cast<std::ptrdiff_t>(value.size()));
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(offset), actual.begin(), actual.end());
    break;
  }
  return out;
}

// --- sealed message schema ---------------------------------------------------

std::string encode_message(const TelemetryMessage& message) {
  std::string id;
  try {
    id = nlohmann::json(message.device_id).dump();
  } catch (const nlohmann::json::exception&) {
    throw WireError("device id is not valid UTF-8");
  }
  return "{\"HeartRate\":" + std::to_string(message.vitals.heart_rate_bpm) +
         ",\"Temperature\":" + format_tenths(message.vitals.temperature_df) + ",\"Id\":" + id +
         ",\"Seq\":" + std::to_string(message.seq) + "}";
}

TelemetryMessage decode_message(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception&) {
    throw WireError("invalid json");
  }
  if (!doc.is_object() || doc.size() != 4) throw WireError("schema mismatch");
  TelemetryMessage msg;
  try {
    const auto& hr = doc.at("HeartRate");
    const auto& temp = doc.at("Temperature");
    const auto& id = doc.at("Id");
    const auto& seq = doc.at("Seq");
    if (!hr.is_number_integer() || !temp.is_number() || !id.is_string() || !seq.is_number_unsigned()) {
      throw WireError("schema mismatch");
    }
    const auto hr_value = hr.get<std::int64_t>();
    const double t = temp.get<double>();
    if (hr_value < std::numeric_limits<int>::min() || hr_value > std::numeric_limits<int>::max() ||
        !std::isfinite(t) || std::fabs(t) > 1e8) {
      throw WireError("schema mismatch");
    }
    msg.vitals.heart_rate_bpm = static_cast<int>(hr_value);
    msg.vitals.temperature_df = static_cast<int>(std::llround(t * 10.0));
    msg.device_id = id.get<std::string>();
    msg.seq = seq.get<std::uint64_t>();
  } catch (const nlohmann::json::exception&) {
    throw WireError("schema mismatch");
  }
  if (encode_message(msg) != json) throw WireError("non-canonical message");
  return msg;
}

Bytes ack_response() { return to_bytes("HTTP/1.1 200 OK\r\n\r\n"); }

bool is_ack(std::span<const Byte> bytes) { return as_string_view(bytes) == "HTTP/1.1 200 OK\r\n\r\n"; }

}  // namespace medsec::wire
