// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vulcan/chain/block.hpp"
#include "vulcan/contract/contract.hpp"
#include "vulcan/validator/messages.hpp"

namespace vulcan::validator {

struct ProtocolConfig {
    std::size_t n = 1;
    std::size_t f = 0;
    Tick delta = 10;
    Tick tau = 1;
    std::size_t n_max = 64;
    Tick t_max = 4;
    std::uint32_t max_rounds = 3;
    bool overlap = true;
    Coins wager = 10;

    /// Throws ConfigError unless n >= 2f + 1, max_rounds >= 1 and delta, tau, t_max > 0.
    void validate() const;
    /// Time a leader waits for approvals after proposing: one round trip.
    [[nodiscard]] Tick reply_timeout() const { return 2 * tau; }
    /// Followers vote the leader out if no commit is visible this long after the leader
    /// could have proposed: proposal and approvals (2 tau), mainchain delay, one tau of
    /// start-time skew and one tau of slack.
    [[nodiscard]] Tick progress_timeout() const { return delta + 4 * tau; }
};

/// Public data-availability board. Honest validators post every block they propose or
/// approve; anyone may fetch by header hash.
class Board {
  public:
    void publish(const chain::Block& block) { blocks_.try_emplace(block.hash(), block); }
    [[nodiscard]] const chain::Block* find(const Digest& hash) const;
    [[nodiscard]] std::size_t size() const { return blocks_.size(); }

  private:
    std::map<Digest, chain::Block> blocks_;
};

/// What a handler may read: the contract's public state (instantly), the board and the clock.
struct World {
    const contract::Contract* contract = nullptr;
    const Board* board = nullptr;
    Tick now = 0;
};

enum class Term { Collecting, Proposing, Committing, Pending };
std::string_view to_string(Term term);

enum class Strategy {
    Honest,
    /// Sends its block only to the coalition and commits it, forging the signer index
    /// when the coalition cannot supply a quorum. Never posts the block.
    WithholdAndCommit,
    /// Sends two different valid blocks to disjoint halves of the followers.
    Equivocate,
    /// Never proposes and never restarts.
    SilentLeader,
    /// Moves the target's balance (or inflates the first account) in its proposals.
    TamperBalances,
    /// Approves every block it receives and posts none.
    ApproveAnything,
    /// Ignores transfers sent by the target client.
    DropClientTxs,
};

std::string_view to_string(Strategy s);
/// Throws ConfigError on an unknown name.
Strategy strategy_from_string(std::string_view name);

struct StrategyWindow {
    Strategy strategy = Strategy::Honest;
    Epoch from = 0;
    Epoch until = ~Epoch{0};
    std::optional<chain::AccountId> target;

    [[nodiscard]] bool covers(Epoch e) const { return from <= e && e <= until; }
};

// ---- Outbound effects of a handler ----

struct ToValidator {
    std::size_t slot = 0;
};
struct ToAllValidators {};
struct ToClient {
    chain::AccountId client;
};
using Recipient = std::variant<ToValidator, ToAllValidators, ToClient>;

struct Send {
    Recipient to;
    Message msg;
};

/// A mainchain transaction carrying a contract call; `wager` moves into escrow with it.
struct Submit {
    contract::Call call;
    Coins wager = 0;
};

enum class TimerKind { CollectDeadline, ReplyTimeout, ProgressDeadline };
std::string_view to_string(TimerKind kind);

struct Timer {
    TimerKind kind = TimerKind::CollectDeadline;
    Tick at = 0;
    /// Matches the validator's reset counter when set; stale timers are ignored.
    std::uint64_t generation = 0;
};

/// Protocol milestones the harness turns into metrics.
struct Trace {
    std::string kind;
    Epoch epoch = 0;
    std::uint32_t round = 1;
    Tick at = 0;
};

struct Outbox {
    std::vector<Send> sends;
    std::vector<Submit> submits;
    std::vector<Timer> timers;
    std::vector<chain::Block> publish;
    std::vector<Trace> traces;
};

/// Who sent a message: a validator slot or a client account.
struct FromValidator {
    std::size_t slot = 0;
};
struct FromClient {
    chain::AccountId client;
};
using Origin = std::variant<FromValidator, FromClient>;

/// Accepted-but-uncommitted transfers for one epoch plus the sent/received accumulators
/// checked against a base balance map.
struct Collector {
    Epoch epoch = 0;
    Tick started = 0;
    Digest base_block;
    std::size_t base_records = ~std::size_t{0};
    chain::Balances base;
    std::map<chain::AccountId, Coins> sent;
    std::map<chain::AccountId, Coins> received;
    struct Entry {
        Tick arrival = 0;
        chain::Transaction tx;
    };
    std::vector<Entry> queue;
    std::set<Digest> hashes;

    [[nodiscard]] Coins available(const chain::AccountId& account) const;
};

/// One validator's epoch state machine.
///
/// Invariants: an honest instance signs at most one approval per (epoch, round); the
/// leader of epoch e is roster slot e mod n; balances change only when a checkpoint
/// finalizes.
class Validator {
  public:
    Validator(ProtocolConfig config, const crypto::SignatureScheme& scheme, std::size_t slot,
              crypto::KeyPair keys, std::vector<StrategyWindow> strategies = {},
              std::set<std::size_t> coalition = {});

    /// Genesis, or bootstrap of a replacement from the contract and the board. `round` is
    /// the epoch's attempt counter as seen by the rest of the committee.
    Outbox start(const World& w, std::uint32_t round = 1);
    Outbox on_message(const World& w, const Origin& from, const Message& m);
    Outbox on_notice(const World& w, const contract::Notice& notice);
    Outbox on_timer(const World& w, const Timer& t);

    /// Stops all activity, e.g. after this instance's slot was handed to a replacement.
    void retire() { retired_ = true; }

    [[nodiscard]] std::size_t slot() const { return slot_; }
    [[nodiscard]] const crypto::PublicKey& public_key() const { return keys_.public_key; }
    [[nodiscard]] Epoch epoch() const { return epoch_; }
    [[nodiscard]] std::uint32_t round() const { return round_; }
    [[nodiscard]] Term term() const { return term_; }
    [[nodiscard]] bool retired() const { return retired_; }
    [[nodiscard]] const Collector& collector() const { return collector_; }
    /// Post-state of the last finalized block (B(id, e) for the current epoch).
    [[nodiscard]] const chain::Balances& balances() const;
    [[nodiscard]] const std::optional<chain::Block>& finalized_tip() const { return tip_; }
    /// Every approval this instance signed, keyed by (epoch, round).
    [[nodiscard]] const std::multimap<std::pair<Epoch, std::uint32_t>, Digest>& signed_approvals() const {
        return signed_;
    }
    /// A block this instance holds: its finalized tip or a candidate of the epoch in flight.
    [[nodiscard]] const chain::Block* find_block(const Digest& hash) const;
    /// True while some non-honest strategy governs `e`.
    [[nodiscard]] bool byzantine_at(Epoch e) const;

  private:
    [[nodiscard]] bool active(Strategy s, Epoch e) const;
    [[nodiscard]] const StrategyWindow* window(Strategy s, Epoch e) const;
    [[nodiscard]] std::size_t leader_slot(const World& w) const;
    [[nodiscard]] bool is_leader(const World& w) const;

    // Collection.
    void begin_collecting(const World& w, Epoch e, Outbox& out);
    void refresh_base(const World& w);
    [[nodiscard]] std::string intake_check(const World& w, const chain::Transaction& tx) const;
    void admit(const World& w, Tick arrival, const chain::Transaction& tx);
    void on_transfer(const World& w, const Origin& from, Tick arrival, const chain::Transaction& tx,
                     Outbox& out);
    void clear_epoch_state();
    void on_leader_change(const World& w, Outbox& out);
    void on_restart(const World& w, const EpochRestart& r, std::size_t from, Outbox& out);

    // Leader side.
    void maybe_propose(const World& w, Outbox& out);
    [[nodiscard]] std::optional<chain::BlockContext> context_for(const World& w, Epoch e) const;
    chain::Block build(const World& w, const chain::BlockContext& ctx, const std::vector<chain::Transaction>& q) const;
    void propose(const World& w, Outbox& out);
    void on_vote(const World& w, const BlockVote& v, std::size_t from, Outbox& out);
    void finish_round(const World& w, Outbox& out);
    void commit(const World& w, const chain::Checkpoint& cp, const chain::Block& block, Outbox& out);

    // Follower side.
    void on_proposal(const World& w, const ProposedBlock& p, std::size_t from, Outbox& out);
    void arm_progress_deadline(const World& w, Outbox& out);
    [[nodiscard]] bool ready_for_leader(const World& w) const;
    void vote_out(const World& w, Outbox& out);
    void on_leader_vote(const World& w, const LeaderVote& v, Outbox& out);

    // Contract-driven transitions.
    void on_block_received(const World& w, Outbox& out);
    void on_epoch_changed(const World& w, const contract::Notice& n, Outbox& out);
    void on_exit_session(const World& w, const contract::Notice& n, Outbox& out);

    [[nodiscard]] const chain::Block* known_block(const World& w, const Digest& hash) const;

    ProtocolConfig config_;
    const crypto::SignatureScheme* scheme_;
    std::size_t slot_;
    crypto::KeyPair keys_;
    std::vector<StrategyWindow> strategies_;
    std::set<std::size_t> coalition_;
    bool retired_ = false;
    bool halted_ = false;

    Epoch epoch_ = 0;
    /// Attempts at the current epoch, across leaders.
    std::uint32_t round_ = 1;
    /// Attempts by the current leader; carried in proposals and restarts.
    std::uint32_t tenure_round_ = 1;
    Term term_ = Term::Collecting;
    std::uint64_t collect_gen_ = 0;
    std::uint64_t reply_gen_ = 0;
    std::uint64_t progress_gen_ = 0;
    /// When the previous checkpoint finalized (or the current leader took office).
    Tick finalized_at_ = 0;

    std::optional<chain::Block> tip_;
    /// Blocks seen for the epoch in flight, by hash.
    std::map<Digest, chain::Block> candidates_;
    std::optional<Digest> committed_hash_;

    Collector collector_;
    bool collecting_ = true;
    struct Buffered {
        Tick arrival = 0;
        chain::Transaction tx;
        bool from_client = false;
    };
    std::vector<Buffered> buffer_;

    // Leader bookkeeping for the round in flight.
    std::vector<chain::Block> proposals_;
    std::vector<chain::Approval> approvals_;
    std::set<std::size_t> replied_;
    std::size_t expected_replies_ = 0;
    bool round_open_ = false;
    bool committed_this_epoch_ = false;

    std::multimap<std::pair<Epoch, std::uint32_t>, Digest> signed_;
    std::map<std::size_t, crypto::Signature> votes_;
    bool voted_ = false;
    bool challenged_ = false;
    bool vote_submitted_ = false;
};

/// Applies balance-change records without failing: debits saturate at zero. Used for the
/// tentative intake base; block building applies them strictly.
chain::Balances apply_records_lenient(chain::Balances balances, const std::vector<chain::Transaction>& records);

}  // namespace vulcan::validator
