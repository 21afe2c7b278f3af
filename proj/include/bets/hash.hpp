#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>

#include <openssl/evp.h>

#include "bets/error.hpp"

namespace bets {

/// 256-bit digest (SHA-256; the algorithm is fixed per build and recorded in
/// the run manifest).
using Digest = std::array<uint8_t, 32>;

inline constexpr const char* kDigestAlgorithm = "SHA-256";

inline Digest sha256(std::span<const uint8_t> data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw Error("sha256: digest computation failed");
  }
  return out;
}

inline std::string to_hex(const Digest& d) {
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (uint8_t b : d) {
    s.push_back(hex[b >> 4]);
    s.push_back(hex[b & 0xf]);
  }
  return s;
}

inline Digest digest_from_hex(const std::string& s) {
  if (s.size() != 64) throw Error("digest_from_hex: expected 64 hex chars");
  auto nibble = [](char c) -> uint8_t {
    if (c >= '0' && c <= '9') return static_cast<uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<uint8_t>(c - 'A' + 10);
    throw Error("digest_from_hex: invalid hex char");
  };
  Digest d{};
  for (size_t i = 0; i < 32; ++i) {
    d[i] = static_cast<uint8_t>((nibble(s[2 * i]) << 4) | nibble(s[2 * i + 1]));
  }
  return d;
}

struct DigestHash {
  size_t operator()(const Digest& d) const {
    size_t h;
    std::memcpy(&h, d.data(), sizeof(h));
    return h;
  }
};

} // namespace bets
