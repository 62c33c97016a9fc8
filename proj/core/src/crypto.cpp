#include "medsec/crypto.hpp"

#include <algorithm>

namespace medsec::crypto {
namespace {

constexpr std::array<Byte, 256> kSbox = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
};

constexpr std::array<Byte, 256> make_inverse_sbox() {
  std::array<Byte, 256> inv{};
  for (std::size_t i = 0; i < 256; ++i) inv[kSbox[i]] = static_cast<Byte>(i);
  return inv;
}

constexpr std::array<Byte, 256> kInvSbox = make_inverse_sbox();

constexpr std::array<Byte, 10> kRcon = {0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1b, 0x36};

constexpr Byte xtime(Byte x) { return static_cast<Byte>((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00)); }

constexpr Byte gmul(Byte a, Byte b) {
  Byte p = 0;
  while (b) {
    if (b & 1) p ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return p;
}

// State layout follows FIPS-197: byte i sits at row i % 4, column i / 4.

void add_round_key(Block& s, const std::array<Byte, 16>& k) {
  for (std::size_t i = 0; i < 16; ++i) s[i] ^= k[i];
}

void sub_bytes(Block& s) {
  for (auto& b : s) b = kSbox[b];
}

void inv_sub_bytes(Block& s) {
  for (auto& b : s) b = kInvSbox[b];
}

void shift_rows(Block& s) {
  Block t = s;
  for (std::size_t r = 1; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) s[r + 4 * c] = t[r + 4 * ((c + r) % 4)];
  }
}

void inv_shift_rows(Block& s) {
  Block t = s;
  for (std::size_t r = 1; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) s[r + 4 * ((c + r) % 4)] = t[r + 4 * c];
  }
}

void mix_columns(Block& s) {
  for (std::size_t c = 0; c < 4; ++c) {
    Byte* col = &s[4 * c];
    const Byte a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
    col[0] = static_cast<Byte>(xtime(a0) ^ (xtime(a1) ^ a1) ^ a2 ^ a3);
    col[1] = static_cast<Byte>(a0 ^ xtime(a1) ^ (xtime(a2) ^ a2) ^ a3);
    col[2] = static_cast<Byte>(a0 ^ a1 ^ xtime(a2) ^ (xtime(a3) ^ a3));
    col[3] = static_cast<Byte>((xtime(a0) ^ a0) ^ a1 ^ a2 ^ xtime(a3));
  }
}

void inv_mix_columns(Block& s) {
  for (std::size_t c = 0; c < 4; ++c) {
    Byte* col = &s[4 * c];
    const Byte a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
    col[0] = static_cast<Byte>(gmul(a0, 14) ^ gmul(a1, 11) ^ gmul(a2, 13) ^ gmul(a3, 9));
    col[1] = static_cast<Byte>(gmul(a0, 9) ^ gmul(a1, 14) ^ gmul(a2, 11) ^ gmul(a3, 13));
    col[2] = static_cast<Byte>(gmul(a0, 13) ^ gmul(a1, 9) ^ gmul(a2, 14) ^ gmul(a3, 11));
    col[3] = static_cast<Byte>(gmul(a0, 11) ^ gmul(a1, 13) ^ gmul(a2, 9) ^ gmul(a3, 14));
  }
}

Block to_block(std::span<const Byte> bytes) {
  if (bytes.size() != kBlockSize) {
    throw CryptoError(CryptoError::Kind::Size,
                      "AES block must be 16 bytes, got " + std::to_string(bytes.size()));
  }
  Block b;
  std::copy(bytes.begin(), bytes.end(), b.begin());
  return b;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr std::string_view kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int base64_value(char c) {
  const auto pos = kBase64Alphabet.find(c);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

std::string base64_encode(std::span<const Byte> in) {
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= in.size(); i += 3) {
    const std::uint32_t v = (in[i] << 16) | (in[i + 1] << 8) | in[i + 2];
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(kBase64Alphabet[(v >> 6) & 63]);
    out.push_back(kBase64Alphabet[v & 63]);
  }
  const std::size_t rest = in.size() - i;
  if (rest == 1) {
    const std::uint32_t v = in[i] << 16;
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (in[i] << 16) | (in[i + 1] << 8);
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(kBase64Alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

Bytes base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) {
    throw CryptoError(CryptoError::Kind::Encoding, "base64 length not a multiple of 4");
  }
  Bytes out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int v[4];
    int pad = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && last && k >= 2) {
        ++pad;
        v[k] = 0;
        continue;
      }
      if (pad > 0) throw CryptoError(CryptoError::Kind::Encoding, "base64 data after padding");
      v[k] = base64_value(c);
      if (v[k] < 0) throw CryptoError(CryptoError::Kind::Encoding, "invalid base64 character");
    }
    const std::uint32_t word = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<Byte>(word >> 16));
    if (pad < 2) out.push_back(static_cast<Byte>(word >> 8));
    if (pad < 1) out.push_back(static_cast<Byte>(word));
    // Non-canonical encodings leave bits set in the discarded tail.
    if ((pad == 1 && (word & 0xff)) || (pad == 2 && (word & 0xffff))) {
      throw CryptoError(CryptoError::Kind::Encoding, "non-canonical base64 padding bits");
    }
  }
  return out;
}

}  // namespace

Key128 Key128::from_hex(std::string_view hex) {
  const Bytes raw = decode_text(hex, TextEncoding::Hex);
  if (raw.size() != 16) {
    throw CryptoError(CryptoError::Kind::Size, "AES-128 key must be 16 bytes");
  }
  Key128 key;
  std::copy(raw.begin(), raw.end(), key.bytes.begin());
  return key;
}

Bytes Envelope::serialize() const {
  Bytes out(iv.bytes.begin(), iv.bytes.end());
  out.insert(out.end(), ciphertext.begin(), ciphertext.end());
  return out;
}

Envelope Envelope::parse(std::span<const Byte> bytes) {
  if (bytes.size() < 2 * kBlockSize || bytes.size() % kBlockSize != 0) {
    throw CryptoError(CryptoError::Kind::Size,
                      "envelope must be IV plus whole blocks, got " + std::to_string(bytes.size()));
  }
  Envelope env;
  std::copy_n(bytes.begin(), kBlockSize, env.iv.bytes.begin());
  env.ciphertext.assign(bytes.begin() + kBlockSize, bytes.end());
  return env;
}

Aes128::Aes128(const Key128& key) {
  // 44 words, viewed as 11 round keys.
  std::array<Byte, 176> w{};
  std::copy(key.bytes.begin(), key.bytes.end(), w.begin());
  for (std::size_t i = 4; i < 44; ++i) {
    std::array<Byte, 4> t = {w[4 * (i - 1)], w[4 * (i - 1) + 1], w[4 * (i - 1) + 2], w[4 * (i - 1) + 3]};
    if (i % 4 == 0) {
      t = {static_cast<Byte>(kSbox[t[1]] ^ kRcon[i / 4 - 1]), kSbox[t[2]], kSbox[t[3]], kSbox[t[0]]};
    }
    for (std::size_t j = 0; j < 4; ++j) w[4 * i + j] = static_cast<Byte>(w[4 * (i - 4) + j] ^ t[j]);
  }
  for (std::size_t r = 0; r < 11; ++r) {
    std::copy_n(w.begin() + static_cast<std::ptrdiff_t>(16 * r), 16, round_keys_[r].begin());
  }
}

Block Aes128::encrypt_block(const Block& in) const {
  Block s = in;
  add_round_key(s, round_keys_[0]);
  for (std::size_t round = 1; round < 10; ++round) {
    sub_bytes(s);
    shift_rows(s);
    mix_columns(s);
    add_round_key(s, round_keys_[round]);
  }
  sub_bytes(s);
  shift_rows(s);
  add_round_key(s, round_keys_[10]);
  return s;
}

Block Aes128::decrypt_block(const Block& in) const {
  Block s = in;
  add_round_key(s, round_keys_[10]);
  for (std::size_t round = 9; round >= 1; --round) {
    inv_shift_rows(s);
    inv_sub_bytes(s);
    add_round_key(s, round_keys_[round]);
    inv_mix_columns(s);
  }
  inv_shift_rows(s);
  inv_sub_bytes(s);
  add_round_key(s, round_keys_[0]);
  return s;
}

Block aes128_encrypt_block(const Key128& key, std::span<const Byte> block) {
  return Aes128(key).encrypt_block(to_block(block));
}

Block aes128_decrypt_block(const Key128& key, std::span<const Byte> block) {
  return Aes128(key).decrypt_block(to_block(block));
}

Bytes pkcs7_pad(std::span<const Byte> data) {
  const std::size_t pad = kBlockSize - data.size() % kBlockSize;
  Bytes out(data.begin(), data.end());
  out.insert(out.end(), pad, static_cast<Byte>(pad));
  return out;
}

Bytes pkcs7_unpad(std::span<const Byte> padded) {
  if (padded.empty() || padded.size() % kBlockSize != 0) {
    throw CryptoError(CryptoError::Kind::Size, "padded data must be a positive multiple of 16 bytes");
  }
  const Byte pad = padded.back();
  if (pad == 0 || pad > kBlockSize) throw CryptoError(CryptoError::Kind::Padding, "bad padding length");
  for (std::size_t i = padded.size() - pad; i < padded.size(); ++i) {
    if (padded[i] != pad) throw CryptoError(CryptoError::Kind::Padding, "inconsistent padding bytes");
  }
  return Bytes(padded.begin(), padded.end() - pad);
}

Bytes cbc_encrypt(const Key128& key, const Iv& iv, std::span<const Byte> plaintext) {
  const Aes128 aes(key);
  const Bytes padded = pkcs7_pad(plaintext);
  Bytes out(padded.size());
  Block chain = iv.bytes;
  for (std::size_t off = 0; off < padded.size(); off += kBlockSize) {
    Block b;
    for (std::size_t i = 0; i < kBlockSize; ++i) b[i] = padded[off + i] ^ chain[i];
    chain = aes.encrypt_block(b);
    std::copy(chain.begin(), chain.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
  }
  return out;
}

Bytes cbc_decrypt(const Key128& key, const Iv& iv, std::span<const Byte> ciphertext) {
  if (ciphertext.empty() || ciphertext.size() % kBlockSize != 0) {
    throw CryptoError(CryptoError::Kind::Size, "ciphertext must be a positive multiple of 16 bytes");
  }
  const Aes128 aes(key);
  Bytes out(ciphertext.size());
  Block chain = iv.bytes;
  for (std::size_t off = 0; off < ciphertext.size(); off += kBlockSize) {
    const Block c = to_block(ciphertext.subspan(off, kBlockSize));
    const Block p = aes.decrypt_block(c);
    for (std::size_t i = 0; i < kBlockSize; ++i) out[off + i] = p[i] ^ chain[i];
    chain = c;
  }
  return pkcs7_unpad(out);
}

Envelope seal(const Key128& key, std::span<const Byte> plaintext, Rng& rng) {
  Iv iv;
  rng.fill(iv.bytes);
  return seal_with_iv(key, iv, plaintext);
}

Envelope seal_with_iv(const Key128& key, const Iv& iv, std::span<const Byte> plaintext) {
  return Envelope{iv, cbc_encrypt(key, iv, plaintext)};
}

Bytes open(const Key128& key, const Envelope& envelope) {
  return cbc_decrypt(key, envelope.iv, envelope.ciphertext);
}

std::string_view to_string(TextEncoding encoding) {
  return encoding == TextEncoding::Hex ? "hex" : "base64";
}

TextEncoding parse_text_encoding(std::string_view name) {
  if (name == "hex") return TextEncoding::Hex;
  if (name == "base64") return TextEncoding::Base64;
  throw std::invalid_argument("unknown text encoding: " + std::string(name));
}

std::string encode_text(std::span<const Byte> bytes, TextEncoding encoding) {
  return encoding == TextEncoding::Hex ? to_hex(bytes) : base64_encode(bytes);
}

Bytes decode_text(std::string_view text, TextEncoding encoding) {
  if (encoding == TextEncoding::Base64) return base64_decode(text);
  if (text.size() % 2 != 0) throw CryptoError(CryptoError::Kind::Encoding, "odd hex length");
  Bytes out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    const int hi = hex_value(text[i]);
    const int lo = hex_value(text[i + 1]);
    if (hi < 0 || lo < 0) throw CryptoError(CryptoError::Kind::Encoding, "invalid hex character");
    out.push_back(static_cast<Byte>(hi * 16 + lo));
  }
  return out;
}

}  // namespace medsec::crypto
