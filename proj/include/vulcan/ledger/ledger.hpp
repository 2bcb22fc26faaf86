// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vulcan/common/bytes.hpp"

namespace vulcan::ledger {

/// Mainchain account names. Clients and validators use "acct:<pubkey hex>"; the contract
/// holds pegged coins in kFrozen and challenge wagers in kEscrow.
using AccountName = std::string;

inline const AccountName kFrozen = "contract:frozen";
inline const AccountName kEscrow = "contract:escrow";
inline const AccountName kTreasury = "contract:treasury";

AccountName account_for(ByteView public_key);

struct Movement {
    AccountName from;
    AccountName to;
    Coins amount = 0;
};

struct MainchainTx {
    std::uint64_t id = 0;
    std::string kind;
    AccountName submitter;
    /// Applied atomically at finalization, or not at all.
    std::vector<Movement> moves;
    Digest payload_digest;
    Tick submit_time = 0;
    Tick finalize_time = 0;
};

struct Finalized {
    MainchainTx tx;
    bool applied = false;
    /// Empty when applied.
    std::string void_reason;
};

/// Mainchain with a fixed finalization delay.
///
/// A transaction submitted at t takes effect exactly at t + delay, in submission order.
/// A transaction whose moves would overdraw any account is voided as a whole. Σ of all
/// balances is constant after genesis.
class Ledger {
  public:
    explicit Ledger(Tick delay) : delay_(delay) {}

    [[nodiscard]] Tick delay() const { return delay_; }
    [[nodiscard]] Tick now() const { return now_; }

    /// Genesis funding; only allowed before the first submit.
    void endow(const AccountName& account, Coins amount);

    /// Returns the assigned id.
    std::uint64_t submit(MainchainTx tx, Tick now);

    /// Finalizes everything due at or before t and moves the clock to t.
    std::vector<Finalized> advance_to(Tick t);

    /// Balance as of time t (t <= now); unknown accounts read 0.
    [[nodiscard]] Coins read(const AccountName& account, Tick t) const;
    [[nodiscard]] Coins balance(const AccountName& account) const;

    [[nodiscard]] const std::deque<MainchainTx>& in_flight() const { return queue_; }
    [[nodiscard]] std::optional<Tick> next_finalization() const;

    [[nodiscard]] Coins supply() const { return supply_; }
    [[nodiscard]] Coins sum_of_balances() const;
    [[nodiscard]] const std::map<AccountName, Coins>& balances() const { return current_; }

  private:
    void set_balance(const AccountName& account, Coins value);

    Tick delay_;
    Tick now_ = 0;
    std::uint64_t next_id_ = 1;
    bool started_ = false;
    Coins supply_ = 0;
    std::deque<MainchainTx> queue_;
    std::map<AccountName, Coins> current_;
    std::map<AccountName, std::vector<std::pair<Tick, Coins>>> history_;
};

}  // namespace vulcan::ledger
