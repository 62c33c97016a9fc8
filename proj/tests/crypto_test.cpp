#include <gtest/gtest.h>

#include <set>

#include "medsec/crypto.hpp"
#include "openssl_oracle.hpp"

using namespace medsec;
using namespace medsec::crypto;

namespace {

Bytes from_hex(std::string_view hex) { return decode_text(hex, TextEncoding::Hex); }

Iv iv_from_hex(std::string_view hex) {
  Iv iv;
  const Bytes b = from_hex(hex);
  std::copy(b.begin(), b.end(), iv.bytes.begin());
  return iv;
}

const Key128 kCbcKey = Key128::from_hex("2b7e151628aed2a6abf7158809cf4f3c");
const Iv kCbcIv = iv_from_hex("000102030405060708090a0b0c0d0e0f");
constexpr std::string_view kMessage = R"({"HeartRate":78,"Temperature":98.6,"Id":"esp8266-01","Seq":1})";

}  // namespace

// Frozen outputs, computed with an independent implementation.
TEST(Aes128, Fips197AppendixC1) {
  const Key128 key = Key128::from_hex("000102030405060708090a0b0c0d0e0f");
  const Bytes pt = from_hex("00112233445566778899aabbccddeeff");
  const Block ct = aes128_encrypt_block(key, pt);
  EXPECT_EQ(to_hex(ct), "69c4e0d86a7b0430d8cdb78070b4c55a");
  EXPECT_EQ(to_hex(aes128_decrypt_block(key, ct)), "00112233445566778899aabbccddeeff");
}

TEST(Aes128, AllZeroKeyAndBlock) {
  const Block ct = aes128_encrypt_block(Key128{}, Bytes(16, 0));
  EXPECT_EQ(to_hex(ct), "66e94bd4ef8a2c3b884cfa59ca342b2e");
}

TEST(Aes128, RejectsWrongBlockSize) {
  EXPECT_THROW(aes128_encrypt_block(Key128{}, Bytes(15, 0)), CryptoError);
  EXPECT_THROW(aes128_decrypt_block(Key128{}, Bytes(17, 0)), CryptoError);
}

TEST(Aes128, MatchesOracleOnRandomBlocks) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Key128 key;
    Block block;
    rng.fill(key.bytes);
    rng.fill(block);
    ASSERT_EQ(to_hex(aes128_encrypt_block(key, block)), to_hex(oracle::block_encrypt(key, block)));
    ASSERT_EQ(Aes128(key).decrypt_block(Aes128(key).encrypt_block(block)), block);
  }
}

TEST(Key128, FromHexValidates) {
  EXPECT_THROW(Key128::from_hex("00"), CryptoError);
  EXPECT_THROW(Key128::from_hex(std::string(32, 'z')), CryptoError);
  EXPECT_EQ(Key128::from_hex("2B7E151628AED2A6ABF7158809CF4F3C"), kCbcKey);
}

TEST(Pkcs7, PadsToNextBlock) {
  EXPECT_EQ(pkcs7_pad({}), Bytes(16, 16));
  const Bytes fifteen(15, 'a');
  Bytes padded = pkcs7_pad(fifteen);
  ASSERT_EQ(padded.size(), 16u);
  EXPECT_EQ(padded.back(), 1);
  EXPECT_EQ(pkcs7_pad(Bytes(16, 'a')).size(), 32u);
  EXPECT_EQ(pkcs7_unpad(padded), fifteen);
}

TEST(Pkcs7, UnpadRejectsBadTrailers) {
  auto kind_of = [](const Bytes& b) {
    try {
      pkcs7_unpad(b);
    } catch (const CryptoError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "accepted";
    return CryptoError::Kind::Encoding;
  };
  Bytes zero(16, 'a');
  zero.back() = 0;
  EXPECT_EQ(kind_of(zero), CryptoError::Kind::Padding);
  Bytes too_big(16, 'a');
  too_big.back() = 17;
  EXPECT_EQ(kind_of(too_big), CryptoError::Kind::Padding);
  Bytes inconsistent(16, 'a');
  inconsistent[15] = 3;
  inconsistent[14] = 3;
  inconsistent[13] = 2;
  EXPECT_EQ(kind_of(inconsistent), CryptoError::Kind::Padding);
  EXPECT_EQ(kind_of(Bytes(15, 1)), CryptoError::Kind::Size);
  EXPECT_EQ(kind_of(Bytes{}), CryptoError::Kind::Size);
}

TEST(Cbc, FrozenMessageVector) {
  const Bytes ct = cbc_encrypt(kCbcKey, kCbcIv, to_bytes(kMessage));
  EXPECT_EQ(to_hex(ct),
            "a482b23c780c0b1faf70ea5ab956cdfdc0b8b32e0f9d59d5bf9f9d5e8bc54bdc"
            "5730e08f2160853c73fca753af5364845fa4863df5d4a85659e20b763f5b49b0");
  EXPECT_EQ(to_string(cbc_decrypt(kCbcKey, kCbcIv, ct)), kMessage);
}

TEST(Cbc, FrozenEighteenByteVector) {
  const Bytes ct = cbc_encrypt(kCbcKey, kCbcIv, to_bytes("0123456789abcdefgh"));
  EXPECT_EQ(to_hex(ct), "64768548007aef9f3d258e5c34cdc21b688fa3d7d1351574bfd07705e6d89a53");
}

TEST(Cbc, MatchesOracleOnRandomTriples) {
  Rng rng(2024);
  for (int i = 0; i < 100; ++i) {
    Key128 key;
    Iv iv;
    rng.fill(key.bytes);
    rng.fill(iv.bytes);
    Bytes pt(rng.uniform(0, 100));
    rng.fill(pt);
    ASSERT_EQ(to_hex(cbc_encrypt(key, iv, pt)), to_hex(oracle::cbc_encrypt(key, iv, pt))) << "triple " << i;
  }
}

TEST(Cbc, DecryptRejectsUnalignedCiphertext) {
  EXPECT_THROW(cbc_decrypt(kCbcKey, kCbcIv, Bytes(15, 0)), CryptoError);
  EXPECT_THROW(cbc_decrypt(kCbcKey, kCbcIv, Bytes{}), CryptoError);
}

TEST(Seal, RoundTripsAndUsesFreshIvs) {
  Rng rng(5);
  std::set<std::array<Byte, 16>> ivs;
  for (int i = 0; i < 1000; ++i) {
    Bytes pt(rng.uniform(0, 80));
    rng.fill(pt);
    const Envelope env = seal(kCbcKey, pt, rng);
    ASSERT_EQ(open(kCbcKey, env), pt);
    ASSERT_EQ(Envelope::parse(env.serialize()).ciphertext, env.ciphertext);
    ivs.insert(env.iv.bytes);
  }
  EXPECT_EQ(ivs.size(), 1000u);
}

TEST(Seal, IvsPairwiseDistinctOverHundredThousandSeals) {
  Rng rng(77);
  std::set<std::array<Byte, 16>> ivs;
  const Bytes pt = to_bytes(kMessage);
  for (int i = 0; i < 100000; ++i) ivs.insert(seal(kCbcKey, pt, rng).iv.bytes);
  EXPECT_EQ(ivs.size(), 100000u);
}

TEST(Seal, SamePlaintextDifferentCiphertext) {
  Rng rng(1);
  const Envelope a = seal(kCbcKey, to_bytes(kMessage), rng);
  const Envelope b = seal(kCbcKey, to_bytes(kMessage), rng);
  EXPECT_NE(a.ciphertext, b.ciphertext);
}

TEST(Envelope, ParseRequiresTwoAlignedBlocks) {
  EXPECT_THROW(Envelope::parse(Bytes(16, 0)), CryptoError);
  EXPECT_THROW(Envelope::parse(Bytes(33, 0)), CryptoError);
  const Envelope e = Envelope::parse(Bytes(48, 1));
  EXPECT_EQ(e.ciphertext.size(), 32u);
}

TEST(Open, EveryKeyBitFlipFailsToRecoverPlaintext) {
  const Envelope env = seal_with_iv(kCbcKey, kCbcIv, to_bytes(kMessage));
  for (int bit = 0; bit < 128; ++bit) {
    Key128 wrong = kCbcKey;
    wrong.bytes[bit / 8] ^= static_cast<Byte>(0x80 >> (bit % 8));
    try {
      EXPECT_NE(to_string(open(wrong, env)), kMessage) << "bit " << bit;
    } catch (const CryptoError& e) {
      EXPECT_EQ(e.kind(), CryptoError::Kind::Padding);
    }
  }
}

TEST(Open, SingleByteTampersNeverYieldOriginal) {
  const Envelope env = seal_with_iv(kCbcKey, kCbcIv, to_bytes(kMessage));
  std::size_t padding_errors = 0;
  for (std::size_t pos = 0; pos < env.ciphertext.size(); ++pos) {
    for (int x = 1; x < 256; ++x) {
      Envelope t = env;
      t.ciphertext[pos] ^= static_cast<Byte>(x);
      try {
        ASSERT_NE(to_string(open(kCbcKey, t)), kMessage);
      } catch (const CryptoError& e) {
        ASSERT_EQ(e.kind(), CryptoError::Kind::Padding);
        ++padding_errors;
      }
    }
  }
  EXPECT_GT(padding_errors, 0u);
}

TEST(TextEncoding, Base64Rfc4648Vectors) {
  const std::pair<const char*, const char*> cases[] = {
      {"", ""},          {"f", "Zg=="},         {"fo", "Zm8="},         {"foo", "Zm9v"},
      {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"},
  };
  for (const auto& [plain, b64] : cases) {
    EXPECT_EQ(encode_text(to_bytes(plain), TextEncoding::Base64), b64);
    EXPECT_EQ(to_string(decode_text(b64, TextEncoding::Base64)), plain);
  }
  EXPECT_EQ(encode_text(from_hex("3c4a8b"), TextEncoding::Base64), "PEqL");
  EXPECT_EQ(encode_text(from_hex("fafbfcfdfeff"), TextEncoding::Base64), "+vv8/f7/");
}

TEST(TextEncoding, RejectsNonCanonicalInput) {
  for (const char* bad : {"Zg=", "Zg", "Z===", "Zh==", "Zm9v!", "Zm9vYg==Zg=="}) {
    EXPECT_THROW(decode_text(bad, TextEncoding::Base64), CryptoError) << bad;
  }
  EXPECT_THROW(decode_text("abc", TextEncoding::Hex), CryptoError);
  EXPECT_THROW(decode_text("zz", TextEncoding::Hex), CryptoError);
  EXPECT_EQ(decode_text("ABcd", TextEncoding::Hex), (Bytes{0xab, 0xcd}));
  EXPECT_EQ(encode_text(Bytes{0xab, 0xcd}, TextEncoding::Hex), "abcd");
}

TEST(TextEncoding, NamesRoundTrip) {
  EXPECT_EQ(parse_text_encoding("hex"), TextEncoding::Hex);
  EXPECT_EQ(parse_text_encoding(to_string(TextEncoding::Base64)), TextEncoding::Base64);
  EXPECT_THROW(parse_text_encoding("rot13"), std::invalid_argument);
}
