#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bets/error.hpp"

namespace bets {

// Canonical binary layout shared by transactions and block headers so
// digests are portable across implementations: fixed-width little-endian
// integers, doubles as IEEE-754 bit patterns (u64 LE), byte strings
// length-prefixed with u32.

class CanonicalWriter {
public:
  void put_u8(uint8_t v) { buf_.push_back(v); }

  void put_u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }

  void put_u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }

  void put_f64(double v) { put_u64(std::bit_cast<uint64_t>(v)); }

  void put_bytes(std::span<const uint8_t> b) {
    put_u32(static_cast<uint32_t>(b.size()));
    buf_.insert(buf_.end(), b.begin(), b.end());
  }

  void put_raw(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

  const std::vector<uint8_t>& bytes() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }

private:
  std::vector<uint8_t> buf_;
};

class CanonicalReader {
public:
  explicit CanonicalReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t get_u8() {
    need(1);
    return data_[pos_++];
  }

  uint32_t get_u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_++]) << (8 * i);
    return v;
  }

  uint64_t get_u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }

  double get_f64() { return std::bit_cast<double>(get_u64()); }

  std::vector<uint8_t> get_bytes() {
    uint32_t n = get_u32();
    need(n);
    std::vector<uint8_t> out(data_.begin() + static_cast<ptrdiff_t>(pos_),
                             data_.begin() + static_cast<ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }

  bool exhausted() const { return pos_ == data_.size(); }
  size_t remaining() const { return data_.size() - pos_; }

private:
  void need(size_t n) const {
    if (pos_ + n > data_.size()) throw Error("canonical decode: truncated input");
  }

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

} // namespace bets
