#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "bets/codec.hpp"
#include "bets/error.hpp"
#include "bets/hash.hpp"
#include "bets/rng.hpp"

namespace bets {

// ---------------------------------------------------------------------------
// Transactions

enum class TxKind : uint8_t {
  EmissionRecord = 0,
  Penalty = 1,
  Subsidy = 2,
  TradeBuy = 3,
  TradeSell = 4,
  Settlement = 5,
  BalanceReset = 6,
};

inline const char* to_string(TxKind k) {
  switch (k) {
    case TxKind::EmissionRecord: return "EmissionRecord";
    case TxKind::Penalty: return "Penalty";
    case TxKind::Subsidy: return "Subsidy";
    case TxKind::TradeBuy: return "TradeBuy";
    case TxKind::TradeSell: return "TradeSell";
    case TxKind::Settlement: return "Settlement";
    case TxKind::BalanceReset: return "BalanceReset";
  }
  return "?";
}

// Kind-specific payload records. Encoded field order is the declaration
// order; layout is the canonical one from codec.hpp.

struct EmissionRecordPayload {
  uint32_t vehicle_id = 0;
  double timestamp_s = 0;
  double epsilon_g_per_km = 0;
  double distance_km = 0;
  uint8_t flags = 0; // bit0 all_idle, bit1 period_start
};

struct BalanceAdjustPayload { // Penalty and Subsidy
  uint32_t vehicle_id = 0;
  double timestamp_s = 0;
  double amount = 0; // credits, always >= 0; sign comes from the kind
  double epsilon_g_per_km = 0;
  double balance_after = 0;
};

struct TradePayload { // TradeBuy and TradeSell
  uint32_t buyer = 0;
  uint32_t seller = 0;
  double timestamp_s = 0;
  double amount = 0;
};

struct SettlementPayload {
  uint32_t buyer = 0;
  uint32_t seller = 0;
  double timestamp_s = 0;
  double amount = 0;
  double buyer_balance_after = 0;
  double seller_balance_after = 0;
};

struct BalanceResetPayload {
  uint32_t vehicle_id = 0;
  double timestamp_s = 0;
  double balance = 0;
};

inline std::vector<uint8_t> encode_payload(const EmissionRecordPayload& p) {
  CanonicalWriter w;
  w.put_u32(p.vehicle_id);
  w.put_f64(p.timestamp_s);
  w.put_f64(p.epsilon_g_per_km);
  w.put_f64(p.distance_km);
  w.put_u8(p.flags);
  return w.take();
}

inline std::vector<uint8_t> encode_payload(const BalanceAdjustPayload& p) {
  CanonicalWriter w;
  w.put_u32(p.vehicle_id);
  w.put_f64(p.timestamp_s);
  w.put_f64(p.amount);
  w.put_f64(p.epsilon_g_per_km);
  w.put_f64(p.balance_after);
  return w.take();
}

inline std::vector<uint8_t> encode_payload(const TradePayload& p) {
  CanonicalWriter w;
  w.put_u32(p.buyer);
  w.put_u32(p.seller);
  w.put_f64(p.timestamp_s);
  w.put_f64(p.amount);
  return w.take();
}

inline std::vector<uint8_t> encode_payload(const SettlementPayload& p) {
  CanonicalWriter w;
  w.put_u32(p.buyer);
  w.put_u32(p.seller);
  w.put_f64(p.timestamp_s);
  w.put_f64(p.amount);
  w.put_f64(p.buyer_balance_after);
  w.put_f64(p.seller_balance_after);
  return w.take();
}

inline std::vector<uint8_t> encode_payload(const BalanceResetPayload& p) {
  CanonicalWriter w;
  w.put_u32(p.vehicle_id);
  w.put_f64(p.timestamp_s);
  w.put_f64(p.balance);
  return w.take();
}

inline EmissionRecordPayload decode_emission_record(std::span<const uint8_t> b) {
  CanonicalReader r(b);
  EmissionRecordPayload p;
  p.vehicle_id = r.get_u32();
  p.timestamp_s = r.get_f64();
  p.epsilon_g_per_km = r.get_f64();
  p.distance_km = r.get_f64();
  p.flags = r.get_u8();
  return p;
}

inline BalanceAdjustPayload decode_balance_adjust(std::span<const uint8_t> b) {
  CanonicalReader r(b);
  BalanceAdjustPayload p;
  p.vehicle_id = r.get_u32();
  p.timestamp_s = r.get_f64();
  p.amount = r.get_f64();
  p.epsilon_g_per_km = r.get_f64();
  p.balance_after = r.get_f64();
  return p;
}

inline TradePayload decode_trade(std::span<const uint8_t> b) {
  CanonicalReader r(b);
  TradePayload p;
  p.buyer = r.get_u32();
  p.seller = r.get_u32();
  p.timestamp_s = r.get_f64();
  p.amount = r.get_f64();
  return p;
}

inline SettlementPayload decode_settlement(std::span<const uint8_t> b) {
  CanonicalReader r(b);
  SettlementPayload p;
  p.buyer = r.get_u32();
  p.seller = r.get_u32();
  p.timestamp_s = r.get_f64();
  p.amount = r.get_f64();
  p.buyer_balance_after = r.get_f64();
  p.seller_balance_after = r.get_f64();
  return p;
}

inline BalanceResetPayload decode_balance_reset(std::span<const uint8_t> b) {
  CanonicalReader r(b);
  BalanceResetPayload p;
  p.vehicle_id = r.get_u32();
  p.timestamp_s = r.get_f64();
  p.balance = r.get_f64();
  return p;
}

/// A ledger transaction. The digest covers the canonical encoding of the
/// whole record:
///
///   u8 kind | u32 author | u64 nonce | u32 payload_len | payload bytes
///
/// Including the envelope makes digests unique per (author, nonce), which the
/// replay-protection and distinctness invariants rely on.
struct LedgerTx {
  TxKind kind = TxKind::EmissionRecord;
  uint32_t author = 0;
  uint64_t nonce = 0;
  std::vector<uint8_t> payload;
  Digest digest{};

  std::vector<uint8_t> canonical_encoding() const {
    CanonicalWriter w;
    w.put_u8(static_cast<uint8_t>(kind));
    w.put_u32(author);
    w.put_u64(nonce);
    w.put_bytes(payload);
    return w.take();
  }

  Digest compute_digest() const { return sha256(canonical_encoding()); }
};

inline LedgerTx decode_tx(std::span<const uint8_t> bytes) {
  CanonicalReader r(bytes);
  LedgerTx tx;
  const uint8_t k = r.get_u8();
  if (k > static_cast<uint8_t>(TxKind::BalanceReset)) throw Error("decode_tx: bad kind");
  tx.kind = static_cast<TxKind>(k);
  tx.author = r.get_u32();
  tx.nonce = r.get_u64();
  tx.payload = r.get_bytes();
  if (!r.exhausted()) throw Error("decode_tx: trailing bytes");
  tx.digest = tx.compute_digest();
  return tx;
}

// ---------------------------------------------------------------------------
// Blocks

/// Header layout (hashed, and counted against the block size budget S_B):
///   u64 height | 32B prev_hash | u32 miner_id | f64 timestamp |
///   u32 tx_count | 32B x tx_count digests
/// i.e. 448 + 256 * tx_count bits.
struct LedgerBlock {
  uint64_t height = 0;
  Digest prev_hash{};
  uint32_t miner_id = 0;
  double timestamp_s = 0;
  std::vector<Digest> tx_digests;
  Digest block_hash{};

  std::vector<uint8_t> header_encoding() const {
    CanonicalWriter w;
    w.put_u64(height);
    w.put_raw(prev_hash);
    w.put_u32(miner_id);
    w.put_f64(timestamp_s);
    w.put_u32(static_cast<uint32_t>(tx_digests.size()));
    for (const auto& d : tx_digests) w.put_raw(d);
    return w.take();
  }

  Digest compute_hash() const { return sha256(header_encoding()); }

  uint64_t encoded_bits() const { return 448 + 256 * tx_digests.size(); }
};

inline constexpr uint64_t kBlockHeaderBits = 448;
inline constexpr uint64_t kDigestBits = 256;

inline uint64_t block_capacity_digests(double block_size_bits) {
  if (block_size_bits < kBlockHeaderBits + kDigestBits) {
    throw Error("block_size_SB too small for one digest");
  }
  return static_cast<uint64_t>((block_size_bits - kBlockHeaderBits) / kDigestBits);
}

// ---------------------------------------------------------------------------
// Mining

/// Miner race: M miners run PoW independently, each completing in
/// Exponential(lambda_c) time; the fastest seals the block, so the sealing
/// latency is Exponential(M * lambda_c).
struct MinerPool {
  int miner_count = 1;     // M
  double lambda_c = 1.0;   // 1/s, lambda_c = lambda0 * P_c

  static MinerPool from_rates(double lambda0, double power_watts, int miner_count) {
    if (miner_count < 1) throw Error("MinerPool: miner_count_M must be >= 1");
    const double lc = lambda0 * power_watts;
    if (!(lc > 0)) throw Error("MinerPool: lambda_c must be > 0");
    return MinerPool{miner_count, lc};
  }

  double race_rate() const { return lambda_c * miner_count; }
};

/// Mean latency of the fastest of M miners: integral of the survival
/// function exp(-lambda_c*M*w) over w >= 0, i.e. 1/(lambda_c*M).
inline double expected_comp_latency(const MinerPool& pool) {
  if (!(pool.lambda_c > 0) || pool.miner_count < 1) throw Error("expected_comp_latency: invalid pool");
  return 1.0 / pool.race_rate();
}

/// P(fastest miner still unfinished at w) = (1 - P(W_i < w))^M = exp(-lambda_c*M*w).
inline double survival_fastest(const MinerPool& pool, double w_seconds) {
  if (w_seconds < 0) throw Error("survival_fastest: w must be >= 0");
  return std::exp(-pool.race_rate() * w_seconds);
}

inline double draw_mining_latency(const MinerPool& pool, RngStream& mining) {
  return mining.exponential(pool.race_rate());
}

// ---------------------------------------------------------------------------
// The chain

struct AppendAck {
  Digest digest{};
  size_t queue_position = 0;
};

/// Append-only chain plus the off-chain content store. Only transaction
/// digests live in blocks; payloads are fetched by digest. Appends are
/// single-writer; sealed blocks are immutable.
class Ledger {
public:
  explicit Ledger(double block_size_bits = 1e6)
      : capacity_(block_capacity_digests(block_size_bits)) {}

  /// Builds a tx with the next nonce for this author.
  template <typename Payload>
  LedgerTx make_tx(TxKind kind, uint32_t author, const Payload& payload) {
    LedgerTx tx;
    tx.kind = kind;
    tx.author = author;
    tx.nonce = next_nonce_[author];
    tx.payload = encode_payload(payload);
    tx.digest = tx.compute_digest();
    return tx;
  }

  /// Validates, persists the content off-chain, and queues the digest for the
  /// next block. Rejects replays (stale nonce) and corrupted digests.
  AppendAck append_tx(const LedgerTx& tx) {
    if (tx.compute_digest() != tx.digest) throw Error("append_tx: digest mismatch (corrupted payload)");
    auto& nonce = next_nonce_[tx.author];
    if (tx.nonce < nonce) throw Error("append_tx: duplicate nonce (replay rejected)");
    nonce = tx.nonce + 1;
    store_.emplace(tx.digest, tx.canonical_encoding());
    queue_.push_back(tx.digest);
    return AppendAck{tx.digest, queue_.size() - 1};
  }

  /// Convenience: build, append, return the tx.
  template <typename Payload>
  LedgerTx submit(TxKind kind, uint32_t author, const Payload& payload) {
    LedgerTx tx = make_tx(kind, author, payload);
    append_tx(tx);
    return tx;
  }

  /// Drains up to one block's worth of queued digests and seals them behind a
  /// miner-race latency draw. Returns the block and the sampled latency.
  std::pair<LedgerBlock, double> seal_block(const MinerPool& pool, RngStream& mining,
                                            double timestamp_s) {
    if (queue_.empty()) throw Error("seal_block: empty queue");
    const double latency = draw_mining_latency(pool, mining);
    const uint32_t miner = static_cast<uint32_t>(mining.uniform_index(
        static_cast<uint64_t>(pool.miner_count)));
    LedgerBlock b;
    b.height = blocks_.size();
    b.prev_hash = blocks_.empty() ? Digest{} : blocks_.back().block_hash;
    b.miner_id = miner;
    b.timestamp_s = timestamp_s;
    const size_t n = std::min<size_t>(queue_.size(), capacity_);
    b.tx_digests.assign(queue_.begin(), queue_.begin() + static_cast<ptrdiff_t>(n));
    queue_.erase(queue_.begin(), queue_.begin() + static_cast<ptrdiff_t>(n));
    b.block_hash = b.compute_hash();
    blocks_.push_back(b);
    return {blocks_.back(), latency};
  }

  const std::vector<uint8_t>* fetch(const Digest& d) const {
    auto it = store_.find(d);
    return it == store_.end() ? nullptr : &it->second;
  }

  const std::vector<LedgerBlock>& blocks() const { return blocks_; }
  size_t pending_count() const { return queue_.size(); }
  uint64_t capacity_digests() const { return capacity_; }

  /// Recomputes every hash and the prev_hash linkage.
  bool verify_chain() const {
    for (size_t i = 0; i < blocks_.size(); ++i) {
      const auto& b = blocks_[i];
      if (b.height != i) return false;
      if (b.compute_hash() != b.block_hash) return false;
      const Digest expect_prev = i == 0 ? Digest{} : blocks_[i - 1].block_hash;
      if (b.prev_hash != expect_prev) return false;
      for (const auto& d : b.tx_digests) {
        const auto* content = fetch(d);
        if (!content) return false;
        if (sha256(*content) != d) return false;
      }
    }
    return true;
  }

  /// Sealed transactions in chain order, decoded.
  std::vector<LedgerTx> sealed_txs() const {
    std::vector<LedgerTx> txs;
    for (const auto& b : blocks_) {
      for (const auto& d : b.tx_digests) {
        const auto* content = fetch(d);
        if (!content) throw Error("sealed_txs: missing payload for digest " + to_hex(d));
        txs.push_back(decode_tx(*content));
      }
    }
    return txs;
  }

  /// Writes the header manifest plus a content-addressed payload directory.
  void export_to_dir(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "payloads");
    nlohmann::json manifest;
    manifest["digest_algorithm"] = kDigestAlgorithm;
    manifest["block_count"] = blocks_.size();
    nlohmann::json jblocks = nlohmann::json::array();
    for (const auto& b : blocks_) {
      nlohmann::json jb;
      jb["height"] = b.height;
      jb["prev_hash"] = to_hex(b.prev_hash);
      jb["block_hash"] = to_hex(b.block_hash);
      jb["miner_id"] = b.miner_id;
      jb["timestamp_s"] = b.timestamp_s;
      nlohmann::json digests = nlohmann::json::array();
      for (const auto& d : b.tx_digests) digests.push_back(to_hex(d));
      jb["tx_digests"] = digests;
      jblocks.push_back(jb);
    }
    manifest["blocks"] = jblocks;
    std::ofstream out(dir / "manifest.json");
    if (!out) throw Error("export_to_dir: cannot write manifest");
    out << manifest.dump(2) << "\n";
    for (const auto& b : blocks_) {
      for (const auto& d : b.tx_digests) {
        const auto* content = fetch(d);
        if (!content) throw Error("export_to_dir: missing payload");
        std::ofstream p(dir / "payloads" / (to_hex(d) + ".bin"), std::ios::binary);
        p.write(reinterpret_cast<const char*>(content->data()),
                static_cast<std::streamsize>(content->size()));
      }
    }
  }

private:
  std::vector<LedgerBlock> blocks_;
  std::unordered_map<Digest, std::vector<uint8_t>, DigestHash> store_;
  std::deque<Digest> queue_;
  std::map<uint32_t, uint64_t> next_nonce_;
  uint64_t capacity_;
};

/// Reads an exported chain back as decoded transactions in chain order,
/// verifying digests and linkage along the way.
inline std::vector<LedgerTx> import_chain_txs(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error("import_chain_txs: cannot open manifest");
  nlohmann::json manifest;
  in >> manifest;
  std::vector<LedgerTx> txs;
  Digest prev{};
  for (const auto& jb : manifest.at("blocks")) {
    if (digest_from_hex(jb.at("prev_hash").get<std::string>()) != prev) {
      throw Error("import_chain_txs: broken prev_hash linkage");
    }
    prev = digest_from_hex(jb.at("block_hash").get<std::string>());
    for (const auto& jd : jb.at("tx_digests")) {
      const Digest d = digest_from_hex(jd.get<std::string>());
      std::ifstream p(dir / "payloads" / (to_hex(d) + ".bin"), std::ios::binary);
      if (!p) throw Error("import_chain_txs: missing payload file");
      std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(p)),
                                 std::istreambuf_iterator<char>());
      if (sha256(bytes) != d) throw Error("import_chain_txs: payload digest mismatch");
      txs.push_back(decode_tx(bytes));
    }
  }
  return txs;
}

// ---------------------------------------------------------------------------
// Light client

/// Header-only view held by each vehicle: verifies inclusion of digests but
/// never stores payloads. Forks are out of scope and rejected.
class LightClient {
public:
  struct Header {
    uint64_t height;
    Digest prev_hash;
    Digest block_hash;
    uint32_t miner_id;
    double timestamp_s;
    std::vector<Digest> tx_digests;
  };

  void sync(const Ledger& full) {
    const auto& blocks = full.blocks();
    if (headers_.size() > blocks.size()) {
      throw Error("light_sync: fork detected (client ahead of full chain), forks unsupported");
    }
    // Ancestor check: the client tip must match the full chain at its height.
    if (!headers_.empty()) {
      const auto& tip = headers_.back();
      const auto& at = blocks[tip.height];
      if (at.block_hash != tip.block_hash) {
        throw Error("light_sync: fork detected (tip is not an ancestor), forks unsupported");
      }
    }
    for (size_t i = headers_.size(); i < blocks.size(); ++i) {
      const auto& b = blocks[i];
      headers_.push_back(Header{b.height, b.prev_hash, b.block_hash, b.miner_id,
                                b.timestamp_s, b.tx_digests});
    }
  }

  bool verify_inclusion(const Digest& d) const {
    for (const auto& h : headers_) {
      for (const auto& td : h.tx_digests) {
        if (td == d) return true;
      }
    }
    return false;
  }

  size_t header_count() const { return headers_.size(); }

  /// Bytes held by the view; independent of payload sizes by construction.
  size_t storage_bytes() const {
    size_t total = 0;
    for (const auto& h : headers_) {
      total += sizeof(h.height) + sizeof(h.prev_hash) + sizeof(h.block_hash) +
               sizeof(h.miner_id) + sizeof(h.timestamp_s) + 32 * h.tx_digests.size();
    }
    return total;
  }

private:
  std::vector<Header> headers_;
};

} // namespace bets
