#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bets/emissions.hpp"
#include "bets/error.hpp"
#include "bets/ledger.hpp"

namespace bets {

// ---------------------------------------------------------------------------
// Accounts

enum class AlertState : uint8_t { None = 0, SpeedAlert = 1, RedAlert = 2 };

inline const char* to_string(AlertState s) {
  switch (s) {
    case AlertState::None: return "None";
    case AlertState::SpeedAlert: return "SpeedAlert";
    case AlertState::RedAlert: return "RedAlert";
  }
  return "?";
}

struct AllowanceAccount {
  uint32_t id = 0;
  double balance = 0;
  double last_update_s = 0;
  double last_epsilon_g_per_km = 0;
  AlertState alert = AlertState::None;
};

struct MarketRule {
  double threshold_g_per_km = 160; // T
  double penalty_alpha = 0.05;     // credits per gram over budget
  double subsidy_beta = 0.01;      // credits per gram under budget
  double subsidy_cap = 2;          // max credits per subsidy event
};

/// Exhausting the balance outranks speeding; both clear once resolved.
inline void update_alert(AllowanceAccount& a, const MarketRule& rule) {
  if (a.balance < 0) {
    a.alert = AlertState::RedAlert;
  } else if (a.last_epsilon_g_per_km > rule.threshold_g_per_km) {
    a.alert = AlertState::SpeedAlert;
  } else {
    a.alert = AlertState::None;
  }
}

// ---------------------------------------------------------------------------
// Period reset

/// Refills every account to the period budget B0 and clears alerts. B0 must
/// be positive so each period starts with headroom (Remark 1).
inline std::vector<BalanceResetPayload> reset_period(std::vector<AllowanceAccount>& accounts,
                                                     double initial_balance,
                                                     double timestamp_s) {
  if (!(initial_balance > 0)) {
    throw Error("Remark 1: initial_balance_B0 must be > 0");
  }
  std::vector<BalanceResetPayload> out;
  out.reserve(accounts.size());
  for (auto& a : accounts) {
    a.balance = initial_balance;
    a.last_update_s = timestamp_s;
    a.last_epsilon_g_per_km = 0;
    a.alert = AlertState::None;
    out.push_back(BalanceResetPayload{a.id, timestamp_s, a.balance});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emission control

struct ControlOutcome {
  double penalty = 0;  // credits deducted
  double subsidy = 0;  // credits granted
  bool speed_alert = false;
  bool red_alert = false;
  std::optional<BalanceAdjustPayload> tx; // set when penalty or subsidy is nonzero
  TxKind tx_kind = TxKind::Penalty;
};

/// Applies one emission sample to an account. Over the threshold the account
/// pays alpha * (epsilon - T) * distance and a speed alert is raised; under
/// it the account earns min(cap, beta * (T - epsilon) * distance). Sitting
/// exactly on the threshold is compliant: no penalty, no subsidy, no alert.
inline ControlOutcome apply_emission_control(AllowanceAccount& account,
                                             const EmissionSample& sample,
                                             const MarketRule& rule) {
  if (sample.vehicle_id != account.id) throw Error("emission control: sample/account id mismatch");
  if (sample.timestamp_s < account.last_update_s) {
    throw Error("emission control: stale sample (older than last account update)");
  }
  ControlOutcome out;
  const double over = sample.epsilon_g_per_km - rule.threshold_g_per_km;
  if (over > 0) {
    out.penalty = rule.penalty_alpha * over * sample.distance_km;
    account.balance -= out.penalty;
    out.tx_kind = TxKind::Penalty;
    out.tx = BalanceAdjustPayload{account.id, sample.timestamp_s, out.penalty,
                                  sample.epsilon_g_per_km, account.balance};
  } else if (over < 0) {
    out.subsidy = std::min(rule.subsidy_cap, rule.subsidy_beta * (-over) * sample.distance_km);
    account.balance += out.subsidy;
    if (out.subsidy > 0) {
      out.tx_kind = TxKind::Subsidy;
      out.tx = BalanceAdjustPayload{account.id, sample.timestamp_s, out.subsidy,
                                    sample.epsilon_g_per_km, account.balance};
    }
  }
  account.last_update_s = sample.timestamp_s;
  account.last_epsilon_g_per_km = sample.epsilon_g_per_km;
  update_alert(account, rule);
  out.speed_alert = account.alert == AlertState::SpeedAlert;
  out.red_alert = account.alert == AlertState::RedAlert;
  return out;
}

// ---------------------------------------------------------------------------
// Trading

enum class TradeStatus : uint8_t { Proposed, SellerConfirmed, Settled, Aborted };

inline const char* to_string(TradeStatus s) {
  switch (s) {
    case TradeStatus::Proposed: return "Proposed";
    case TradeStatus::SellerConfirmed: return "SellerConfirmed";
    case TradeStatus::Settled: return "Settled";
    case TradeStatus::Aborted: return "Aborted";
  }
  return "?";
}

struct TradeOrder {
  uint32_t buyer = 0;
  uint32_t seller = 0;
  double amount = 0; // allowance credits e
  double timestamp_s = 0;
  TradeStatus status = TradeStatus::Proposed;
  std::string abort_reason;
};

/// Step 3a: a deficit account asks a peer for credits.
inline TradeOrder propose_trade(const AllowanceAccount& buyer, uint32_t seller_id,
                                double amount, double timestamp_s) {
  if (!(buyer.balance < 0)) throw Error("propose_trade: buyer not in deficit");
  if (!(amount > 0)) throw Error("propose_trade: amount must be > 0");
  if (buyer.id == seller_id) throw Error("propose_trade: buyer and seller must differ");
  return TradeOrder{buyer.id, seller_id, amount, timestamp_s, TradeStatus::Proposed, {}};
}

/// Step 3b: the seller accepts only if it can cover the full amount from its
/// own balance (Remark 2: e <= B_j, boundary allowed).
inline void confirm_trade(TradeOrder& order, const AllowanceAccount& seller) {
  if (order.status != TradeStatus::Proposed) throw Error("confirm_trade: order not in Proposed state");
  if (seller.id != order.seller) throw Error("confirm_trade: wrong seller account");
  if (order.amount <= seller.balance) {
    order.status = TradeStatus::SellerConfirmed;
  } else {
    order.status = TradeStatus::Aborted;
    order.abort_reason = "Remark 2: amount exceeds seller balance";
  }
}

/// Step 4: moves the credits if the confirmation reached the buyer inside the
/// contact window. The cover condition is rechecked because the seller's
/// balance may have moved between confirmation and settlement.
inline std::optional<SettlementPayload> settle_trade(TradeOrder& order,
                                                     AllowanceAccount& buyer,
                                                     AllowanceAccount& seller,
                                                     const MarketRule& rule,
                                                     bool delivered,
                                                     double timestamp_s) {
  if (order.status != TradeStatus::SellerConfirmed) {
    throw Error("settle_trade: order not in SellerConfirmed state");
  }
  if (buyer.id != order.buyer || seller.id != order.seller) {
    throw Error("settle_trade: account ids do not match order");
  }
  if (!delivered) {
    order.status = TradeStatus::Aborted;
    order.abort_reason = "confirmation missed the contact window";
    return std::nullopt;
  }
  if (order.amount > seller.balance) {
    order.status = TradeStatus::Aborted;
    order.abort_reason = "Remark 2: amount exceeds seller balance at settlement";
    return std::nullopt;
  }
  buyer.balance += order.amount;
  seller.balance -= order.amount;
  buyer.last_update_s = timestamp_s;
  seller.last_update_s = timestamp_s;
  update_alert(buyer, rule);
  update_alert(seller, rule);
  order.status = TradeStatus::Settled;
  order.timestamp_s = timestamp_s;
  return SettlementPayload{order.buyer, order.seller, timestamp_s, order.amount,
                           buyer.balance, seller.balance};
}

// ---------------------------------------------------------------------------
// Replay

/// Rebuilds every balance from a chain-ordered transaction stream, applying
/// the same operations in the same order as the live market. Checks each
/// recorded balance_after against the recomputed value and demands bitwise
/// agreement, which holds because the arithmetic is replayed verbatim.
inline std::map<uint32_t, double> replay_balances(const std::vector<LedgerTx>& txs) {
  std::map<uint32_t, double> balances;
  auto check = [](double got, double want, const char* what) {
    if (got != want) {
      throw Error(std::string("replay_balances: recorded ") + what +
                  " does not match recomputed value");
    }
  };
  for (const auto& tx : txs) {
    switch (tx.kind) {
      case TxKind::BalanceReset: {
        const auto p = decode_balance_reset(tx.payload);
        balances[p.vehicle_id] = p.balance;
        break;
      }
      case TxKind::Penalty: {
        const auto p = decode_balance_adjust(tx.payload);
        auto& b = balances[p.vehicle_id];
        b -= p.amount;
        check(b, p.balance_after, "penalty balance_after");
        break;
      }
      case TxKind::Subsidy: {
        const auto p = decode_balance_adjust(tx.payload);
        auto& b = balances[p.vehicle_id];
        b += p.amount;
        check(b, p.balance_after, "subsidy balance_after");
        break;
      }
      case TxKind::Settlement: {
        const auto p = decode_settlement(tx.payload);
        auto& bb = balances[p.buyer];
        auto& sb = balances[p.seller];
        bb += p.amount;
        sb -= p.amount;
        check(bb, p.buyer_balance_after, "buyer balance_after");
        check(sb, p.seller_balance_after, "seller balance_after");
        break;
      }
      case TxKind::EmissionRecord:
      case TxKind::TradeBuy:
      case TxKind::TradeSell:
        break; // informational; no balance effect
    }
  }
  return balances;
}

} // namespace bets
