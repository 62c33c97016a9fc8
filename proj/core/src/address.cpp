#include "medsec/address.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace medsec {
namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

MacAddr MacAddr::parse(std::string_view text) {
  MacAddr mac;
  if (text.size() != 17) throw std::invalid_argument("bad MAC address: " + std::string(text));
  for (std::size_t i = 0; i < 6; ++i) {
    const int hi = hex_digit(text[i * 3]);
    const int lo = hex_digit(text[i * 3 + 1]);
    if (hi < 0 || lo < 0 || (i < 5 && text[i * 3 + 2] != ':')) {
      throw std::invalid_argument("bad MAC address: " + std::string(text));
    }
    mac.octets[i] = static_cast<Byte>(hi * 16 + lo);
  }
  return mac;
}

std::string MacAddr::to_string() const {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", octets[0], octets[1],
                octets[2], octets[3], octets[4], octets[5]);
  return buf;
}

IpAddr4 IpAddr4::parse(std::string_view text) {
  IpAddr4 ip;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (std::size_t i = 0; i < 4; ++i) {
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc{} || next == p || value > 255 || next - p > 3) {
      throw std::invalid_argument("bad IPv4 address: " + std::string(text));
    }
    ip.octets[i] = static_cast<Byte>(value);
    p = next;
    if (i < 3) {
      if (p == end || *p != '.') throw std::invalid_argument("bad IPv4 address: " + std::string(text));
      ++p;
    }
  }
  if (p != end) throw std::invalid_argument("bad IPv4 address: " + std::string(text));
  return ip;
}

std::string IpAddr4::to_string() const {
  return std::to_string(octets[0]) + '.' + std::to_string(octets[1]) + '.' +
         std::to_string(octets[2]) + '.' + std::to_string(octets[3]);
}

}  // namespace medsec
