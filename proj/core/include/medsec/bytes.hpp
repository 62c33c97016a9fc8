#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace medsec {

using Byte = std::uint8_t;
using Bytes = std::vector<Byte>;

inline Bytes to_bytes(std::string_view text) { return Bytes(text.begin(), text.end()); }

inline std::string to_string(std::span<const Byte> bytes) {
  return std::string(bytes.begin(), bytes.end());
}

inline std::string_view as_string_view(std::span<const Byte> bytes) {
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

/// Lowercase hex, two characters per byte.
inline std::string to_hex(std::span<const Byte> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (Byte b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

inline bool contains(std::span<const Byte> haystack, std::string_view needle) {
  return as_string_view(haystack).find(needle) != std::string_view::npos;
}

}  // namespace medsec
