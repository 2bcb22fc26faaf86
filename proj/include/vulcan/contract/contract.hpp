// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "vulcan/chain/checkpoint.hpp"
#include "vulcan/chain/types.hpp"

namespace vulcan::contract {

using chain::AccountId;

struct ContractConfig {
    std::size_t n = 1;
    std::size_t f = 0;
    Tick delta = 10;
    Coins wager = 10;
    /// Last epoch that may be finalized; afterwards the contract only serves exits.
    Epoch validity_endpoint = ~Epoch{0};
};

// ---- Calls, delivered when the carrying mainchain transaction finalizes ----

/// The ledger has already moved `amount` into the frozen pot.
struct DepositCall {
    AccountId client;
    Coins amount = 0;
};

struct CommitCall {
    crypto::PublicKey submitter;
    Epoch epoch = 0;
    chain::Checkpoint cp;
};

struct WithdrawCall {
    AccountId client;
    Coins amount = 0;
    chain::ProofOfPossession pop;
};

struct ExitCall {
    AccountId client;
    chain::ProofOfPossession pop;
};

/// Disputes the pending checkpoint. `prior` names the previous finalized checkpoint
/// (zero digest for epoch 0). The wager is already in escrow.
struct CheckpointChallenge {
    crypto::PublicKey challenger;
    Epoch epoch = 0;
    Digest prior;
    chain::Checkpoint disputed;
    Coins wager = 0;
};

/// Votes of more than f validators that the leader of (epoch, slot) stalled.
struct LeaderChallenge {
    crypto::PublicKey challenger;
    Epoch epoch = 0;
    std::size_t slot = 0;
    crypto::PublicKey leader;
    crypto::AggregateSignature votes;
    crypto::SignerIndex index;
    Coins wager = 0;
};

/// A transfer plus the epoch leader's inclusion receipt.
struct CoSignedTx {
    chain::Transaction tx;
    crypto::Signature receipt;
};

/// Opens an interactive exit; `prev_pop` is against the last finalized checkpoint.
struct ExitRequestCall {
    AccountId client;
    chain::ProofOfPossession prev_pop;
};

/// Evidence for an open session: from the leader (with its Merkle path under the pending
/// checkpoint) or from the client (transactions only).
struct ExitResponseCall {
    crypto::PublicKey responder;
    AccountId client;
    std::optional<chain::ProofOfPossession> path;
    std::vector<CoSignedTx> txs;
};

using Call = std::variant<DepositCall, CommitCall, WithdrawCall, ExitCall, CheckpointChallenge,
                          LeaderChallenge, ExitRequestCall, ExitResponseCall>;

std::string call_kind(const Call& call);
Digest call_digest(const Call& call);

// ---- Outputs ----

enum class NoticeKind {
    DepositReceived,
    CannotDeposit,
    BlockReceived,
    CommitRejected,
    WithdrawOk,
    WithdrawNotOk,
    ExitOk,
    CannotExit,
    ChallengeValid,
    ChallengeInvalid,
    ChallengeStale,
    CheckpointVoided,
    LeaderReplaced,
    EpochChanged,
    Halted,
    MassExit,
    ExecutionEnd,
    InteractiveExitOpened,
    InteractiveExitResolved,
    InteractiveExitRefused,
};

std::string to_string(NoticeKind kind);

struct Notice {
    NoticeKind kind = NoticeKind::DepositReceived;
    Epoch epoch = 0;
    std::optional<AccountId> party;
    Coins amount = 0;
    std::size_t slot = 0;
    bool flag = false;
    std::string detail;
};

/// Coins leaving a contract pot; carried out as a further Δ-delayed mainchain transaction.
enum class Pot { Frozen, Escrow };

struct Release {
    Pot from = Pot::Frozen;
    /// Empty means the treasury.
    std::optional<crypto::PublicKey> to;
    Coins amount = 0;
    std::string reason;
};

struct Outputs {
    std::vector<Notice> notices;
    std::vector<Release> releases;

    void append(Outputs other);
};

/// A balance-change record kept by the contract.
struct Record {
    Epoch epoch = 0;
    chain::Transaction change;
    /// Set when the checkpoint the request was verified against is voided.
    bool cancelled = false;
    /// Withdrawals and exits: coins leave the frozen pot once their checkpoint finalizes.
    bool awaiting_payout = false;
};

struct InteractiveExit {
    AccountId client;
    Epoch epoch = 0;
    crypto::PublicKey leader;
    Coins prev_balance = 0;
    Tick opened = 0;
    Tick respond_by = 0;
    Tick resolve_at = 0;
    std::optional<chain::ProofOfPossession> leader_path;
    std::map<Digest, chain::Transaction> txs;
};

struct PendingCheckpoint {
    chain::Checkpoint cp;
    std::size_t slot = 0;
    Tick committed_at = 0;
    Tick deadline = 0;
};

/// Produces the public key of a fresh validator for a vacated slot.
using ReplacementFactory = std::function<crypto::PublicKey(std::size_t slot)>;

/// The mainchain contract: lazy checkpoint commits, the pending-term window, disputes,
/// deposits, withdrawals, exits, interactive exits and mass exit.
class Contract {
  public:
    /// Throws ContractError if roster size differs from n or n < 2f + 1.
    Contract(ContractConfig config, const crypto::SignatureScheme& scheme,
             std::vector<crypto::PublicKey> roster, ReplacementFactory replace);

    /// Handles a finalized call. `submitted` is the carrying transaction's submit time.
    Outputs apply(const Call& call, Tick submitted, Tick now);

    /// Expires the pending term (unless a dispute is still in flight or a session is open)
    /// and resolves interactive exits that reached their deadline.
    Outputs on_tick(Tick now, bool dispute_in_flight);

    // ---- Public state, readable by every party without delay ----
    [[nodiscard]] const ContractConfig& config() const { return config_; }
    [[nodiscard]] Epoch epoch() const { return epoch_; }
    [[nodiscard]] std::size_t leader_slot() const { return epoch_ % config_.n; }
    [[nodiscard]] const std::vector<crypto::PublicKey>& roster() const { return roster_; }
    [[nodiscard]] const std::set<AccountId>& clients() const { return clients_; }
    [[nodiscard]] const std::optional<PendingCheckpoint>& pending() const { return pending_; }
    [[nodiscard]] const std::vector<chain::Checkpoint>& finalized() const { return finalized_; }
    /// Roster under which finalized checkpoint e was judged.
    [[nodiscard]] const std::vector<crypto::PublicKey>& roster_at(Epoch e) const { return rosters_.at(e); }
    [[nodiscard]] Coins total_balance() const { return total_balance_; }
    [[nodiscard]] bool halted() const { return halted_; }
    [[nodiscard]] bool mass_exit() const { return mass_exit_; }
    [[nodiscard]] std::optional<bool> execution_end() const { return execution_end_; }
    [[nodiscard]] const std::vector<Record>& records() const { return records_; }
    [[nodiscard]] const std::map<AccountId, InteractiveExit>& sessions() const { return sessions_; }
    [[nodiscard]] Tick deadline_extensions() const { return extensions_; }

    /// Balance-change records that block `e` must open with (those recorded under e - 1).
    [[nodiscard]] std::vector<chain::Transaction> adjustments_for_block(Epoch e) const;

    /// Net effect of live records for `client` recorded under epochs >= `from`.
    [[nodiscard]] std::int64_t unreflected(const AccountId& client, Epoch from) const;

    /// Digest of the previous finalized checkpoint for the current epoch (zero at epoch 0).
    [[nodiscard]] Digest prior_checkpoint() const;

  private:
    Outputs deposit(const DepositCall& c);
    Outputs commit(const CommitCall& c, Tick now);
    Outputs withdraw(const WithdrawCall& c);
    Outputs exit(const ExitCall& c);
    Outputs challenge(const CheckpointChallenge& c);
    Outputs challenge(const LeaderChallenge& c);
    Outputs exit_request(const ExitRequestCall& c, Tick now);
    Outputs exit_response(const ExitResponseCall& c, Tick submitted);

    Outputs finalize_pending();
    Outputs void_pending(const std::string& why);
    Outputs replace_leader(std::size_t slot);
    Outputs resolve_session(const InteractiveExit& s);
    Outputs trigger_mass_exit(const std::string& why);
    Outputs record_exit(const AccountId& client, Coins amount, bool pay_now);
    Outputs maybe_end();
    Release refund_wager(const crypto::PublicKey& to, Coins amount) const;

    ContractConfig config_;
    const crypto::SignatureScheme* scheme_;
    std::vector<crypto::PublicKey> roster_;
    ReplacementFactory replace_;

    Epoch epoch_ = 0;
    std::set<AccountId> clients_;
    std::set<AccountId> requested_this_term_;
    std::optional<PendingCheckpoint> pending_;
    bool committed_this_tenure_ = false;
    std::vector<chain::Checkpoint> finalized_;
    std::vector<std::vector<crypto::PublicKey>> rosters_;
    std::vector<Record> records_;
    std::map<AccountId, InteractiveExit> sessions_;
    Coins total_balance_ = 0;
    bool halted_ = false;
    bool mass_exit_ = false;
    bool any_exit_ = false;
    std::optional<bool> execution_end_;
    Tick extensions_ = 0;
};

}  // namespace vulcan::contract
