#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "medsec/bytes.hpp"

namespace medsec {

/// 48-bit link-layer address. Text form is lowercase, colon separated.
struct MacAddr {
  std::array<Byte, 6> octets{};

  static constexpr MacAddr broadcast() { return MacAddr{{0xff, 0xff, 0xff, 0xff, 0xff, 0xff}}; }

  /// Accepts "aa:bb:cc:dd:ee:ff" in either case. Throws std::invalid_argument.
  static MacAddr parse(std::string_view text);

  bool is_broadcast() const { return *this == broadcast(); }
  bool is_zero() const { return *this == MacAddr{}; }
  std::string to_string() const;

  friend auto operator<=>(const MacAddr&, const MacAddr&) = default;
};

struct IpAddr4 {
  std::array<Byte, 4> octets{};

  /// Dotted quad. Throws std::invalid_argument.
  static IpAddr4 parse(std::string_view text);
  static constexpr IpAddr4 from_u32(std::uint32_t v) {
    return IpAddr4{{static_cast<Byte>(v >> 24), static_cast<Byte>(v >> 16),
                    static_cast<Byte>(v >> 8), static_cast<Byte>(v)}};
  }

  constexpr std::uint32_t to_u32() const {
    return (std::uint32_t{octets[0]} << 24) | (std::uint32_t{octets[1]} << 16) |
           (std::uint32_t{octets[2]} << 8) | std::uint32_t{octets[3]};
  }
  std::string to_string() const;

  friend auto operator<=>(const IpAddr4&, const IpAddr4&) = default;
};

}  // namespace medsec
