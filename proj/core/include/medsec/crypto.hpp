#pragma once

// AES-128 (FIPS-197), CBC mode with PKCS#7 padding, the IV-carrying envelope,
// and the hex / Base64 text encodings used to put envelopes on the wire.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "medsec/bytes.hpp"
#include "medsec/rng.hpp"

namespace medsec::crypto {

inline constexpr std::size_t kBlockSize = 16;

using Block = std::array<Byte, kBlockSize>;

class CryptoError : public std::runtime_error {
 public:
  enum class Kind { Size, Padding, Encoding };

  CryptoError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Key128 {
  std::array<Byte, 16> bytes{};

  /// 32 hex characters. Throws CryptoError(Encoding / Size).
  static Key128 from_hex(std::string_view hex);
  friend bool operator==(const Key128&, const Key128&) = default;
};

struct Iv {
  std::array<Byte, 16> bytes{};
  friend bool operator==(const Iv&, const Iv&) = default;
};

/// IV plus ciphertext; the ciphertext length is a positive multiple of 16.
struct Envelope {
  Iv iv;
  Bytes ciphertext;

  /// IV followed by ciphertext, the canonical on-wire body.
  Bytes serialize() const;
  /// Inverse of serialize(). Throws CryptoError(Size) unless the input is at
  /// least two blocks and block aligned.
  static Envelope parse(std::span<const Byte> bytes);
};

/// Expanded key schedule. Cheap to copy; holds no other state.
class Aes128 {
 public:
  explicit Aes128(const Key128& key);

  Block encrypt_block(const Block& in) const;
  Block decrypt_block(const Block& in) const;

 private:
  std::array<std::array<Byte, 16>, 11> round_keys_{};
};

/// Throws CryptoError(Size) unless `block` is exactly 16 bytes.
Block aes128_encrypt_block(const Key128& key, std::span<const Byte> block);
Block aes128_decrypt_block(const Key128& key, std::span<const Byte> block);

/// Output length is (len / 16 + 1) * 16; an aligned input gains a full block.
Bytes pkcs7_pad(std::span<const Byte> data);
/// Throws CryptoError(Size) on bad length, CryptoError(Padding) on bad trailer.
Bytes pkcs7_unpad(std::span<const Byte> padded);

Bytes cbc_encrypt(const Key128& key, const Iv& iv, std::span<const Byte> plaintext);
Bytes cbc_decrypt(const Key128& key, const Iv& iv, std::span<const Byte> ciphertext);

/// Encrypts under a fresh IV drawn from `rng`.
Envelope seal(const Key128& key, std::span<const Byte> plaintext, Rng& rng);
Envelope seal_with_iv(const Key128& key, const Iv& iv, std::span<const Byte> plaintext);
Bytes open(const Key128& key, const Envelope& envelope);

enum class TextEncoding { Hex, Base64 };

std::string_view to_string(TextEncoding encoding);
/// "hex" or "base64". Throws std::invalid_argument.
TextEncoding parse_text_encoding(std::string_view name);

/// Hex is lowercase; Base64 uses the standard alphabet with '=' padding.
std::string encode_text(std::span<const Byte> bytes, TextEncoding encoding);
/// Hex decoding accepts either case. Throws CryptoError(Encoding).
Bytes decode_text(std::string_view text, TextEncoding encoding);

}  // namespace medsec::crypto
