// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/contract/contract.hpp"

#include "vulcan/chain/block.hpp"
#include "vulcan/common/codec.hpp"
#include "vulcan/common/error.hpp"
#include "vulcan/crypto/hash.hpp"

namespace vulcan::contract {

namespace {

void write_pop(ByteWriter& w, const chain::ProofOfPossession& pop) {
    w.raw(pop.header.encode()).u64(pop.balance).var(pop.path.key).u64(pop.path.value);
    w.raw(ByteView{pop.path.branch_mask.bits.data(), pop.path.branch_mask.bits.size()});
    w.u32(static_cast<std::uint32_t>(pop.path.siblings.size()));
    for (const auto& s : pop.path.siblings) w.digest(s);
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Notice notice(NoticeKind kind, Epoch epoch, std::string detail = {}) {
    Notice n;
    n.kind = kind;
    n.epoch = epoch;
    n.detail = std::move(detail);
    return n;
}

Notice party_notice(NoticeKind kind, Epoch epoch, const AccountId& party, Coins amount,
                    std::string detail = {}) {
    Notice n = notice(kind, epoch, std::move(detail));
    n.party = party;
    n.amount = amount;
    return n;
}

std::int64_t signed_effect(const chain::Transaction& change) {
    const auto amt = static_cast<std::int64_t>(change.amount);
    return change.kind == chain::TxKind::Deposit ? amt : -amt;
}

}  // namespace

std::string call_kind(const Call& call) {
    return std::visit(Overloaded{
                          [](const DepositCall&) { return std::string("deposit"); },
                          [](const CommitCall&) { return std::string("commit"); },
                          [](const WithdrawCall&) { return std::string("withdraw"); },
                          [](const ExitCall&) { return std::string("exit"); },
                          [](const CheckpointChallenge&) { return std::string("challenge-cp"); },
                          [](const LeaderChallenge&) { return std::string("challenge-ncp"); },
                          [](const ExitRequestCall&) { return std::string("interactive-exit"); },
                          [](const ExitResponseCall&) { return std::string("interactive-exit-response"); },
                      },
                      call);
}

Digest call_digest(const Call& call) {
    ByteWriter w;
    w.var(call_kind(call));
    std::visit(Overloaded{
                   [&](const DepositCall& c) { w.var(c.client.bytes).u64(c.amount); },
                   [&](const CommitCall& c) { w.var(c.submitter.bytes).u64(c.epoch).raw(c.cp.encode()); },
                   [&](const WithdrawCall& c) {
                       w.var(c.client.bytes).u64(c.amount);
                       write_pop(w, c.pop);
                   },
                   [&](const ExitCall& c) {
                       w.var(c.client.bytes);
                       write_pop(w, c.pop);
                   },
                   [&](const CheckpointChallenge& c) {
                       w.var(c.challenger.bytes).u64(c.epoch).digest(c.prior).raw(c.disputed.encode()).u64(c.wager);
                   },
                   [&](const LeaderChallenge& c) {
                       w.var(c.challenger.bytes).u64(c.epoch).u64(c.slot).var(c.leader.bytes);
                       w.var(c.votes.bytes).u32(static_cast<std::uint32_t>(c.index.n)).u64(c.index.value).u64(c.wager);
                   },
                   [&](const ExitRequestCall& c) {
                       w.var(c.client.bytes);
                       write_pop(w, c.prev_pop);
                   },
                   [&](const ExitResponseCall& c) {
                       w.var(c.responder.bytes).var(c.client.bytes).u8(c.path ? 1 : 0);
                       if (c.path) write_pop(w, *c.path);
                       w.u32(static_cast<std::uint32_t>(c.txs.size()));
                       for (const auto& t : c.txs) w.raw(t.tx.encode()).var(t.receipt.bytes);
                   },
               },
               call);
    return crypto::sha256(w.bytes());
}

std::string to_string(NoticeKind kind) {
    switch (kind) {
        case NoticeKind::DepositReceived: return "depositReceived";
        case NoticeKind::CannotDeposit: return "cannotDeposit";
        case NoticeKind::BlockReceived: return "blockReceived";
        case NoticeKind::CommitRejected: return "commitRejected";
        case NoticeKind::WithdrawOk: return "withdrawOK";
        case NoticeKind::WithdrawNotOk: return "withdrawNotOK";
        case NoticeKind::ExitOk: return "exitOK";
        case NoticeKind::CannotExit: return "cannotExit";
        case NoticeKind::ChallengeValid: return "challengeValid";
        case NoticeKind::ChallengeInvalid: return "challengeInvalid";
        case NoticeKind::ChallengeStale: return "challengeStale";
        case NoticeKind::CheckpointVoided: return "checkpointVoided";
        case NoticeKind::LeaderReplaced: return "leaderReplaced";
        case NoticeKind::EpochChanged: return "epochChanged";
        case NoticeKind::Halted: return "halted";
        case NoticeKind::MassExit: return "massExit";
        case NoticeKind::ExecutionEnd: return "executionEnd";
        case NoticeKind::InteractiveExitOpened: return "interactiveExitOpened";
        case NoticeKind::InteractiveExitResolved: return "interactiveExitResolved";
        case NoticeKind::InteractiveExitRefused: return "interactiveExitRefused";
    }
    return "unknown";
}

void Outputs::append(Outputs other) {
    for (auto& n : other.notices) notices.push_back(std::move(n));
    for (auto& r : other.releases) releases.push_back(std::move(r));
}

Contract::Contract(ContractConfig config, const crypto::SignatureScheme& scheme,
                   std::vector<crypto::PublicKey> roster, ReplacementFactory replace)
    : config_(config), scheme_(&scheme), roster_(std::move(roster)), replace_(std::move(replace)) {
    if (config_.n < 2 * config_.f + 1) throw ContractError("n must be at least 2f + 1");
    if (roster_.size() != config_.n) throw ContractError("roster size differs from n");
    if (config_.n > crypto::kMaxValidators) throw ContractError("too many validators");
}

Outputs Contract::apply(const Call& call, Tick submitted, Tick now) {
    return std::visit(Overloaded{
                          [&](const DepositCall& c) { return deposit(c); },
                          [&](const CommitCall& c) { return commit(c, now); },
                          [&](const WithdrawCall& c) { return withdraw(c); },
                          [&](const ExitCall& c) { return exit(c); },
                          [&](const CheckpointChallenge& c) { return challenge(c); },
                          [&](const LeaderChallenge& c) { return challenge(c); },
                          [&](const ExitRequestCall& c) { return exit_request(c, now); },
                          [&](const ExitResponseCall& c) { return exit_response(c, submitted); },
                      },
                      call);
}

Outputs Contract::on_tick(Tick now, bool dispute_in_flight) {
    Outputs out;
    std::vector<InteractiveExit> due;
    for (const auto& [client, s] : sessions_) {
        if (s.resolve_at <= now) due.push_back(s);
    }
    for (const auto& s : due) {
        if (!sessions_.contains(s.client)) continue;
        out.append(resolve_session(s));
    }
    if (pending_ && !halted_ && now >= pending_->deadline && !dispute_in_flight && sessions_.empty()) {
        out.append(finalize_pending());
    }
    return out;
}

std::vector<chain::Transaction> Contract::adjustments_for_block(Epoch e) const {
    std::vector<chain::Transaction> out;
    if (e == 0) return out;
    for (const auto& r : records_) {
        if (r.epoch == e - 1 && !r.cancelled) out.push_back(r.change);
    }
    return out;
}

std::int64_t Contract::unreflected(const AccountId& client, Epoch from) const {
    std::int64_t sum = 0;
    for (const auto& r : records_) {
        if (r.epoch < from || r.cancelled || !(chain::adjustment_account(r.change) == client)) continue;
        sum += signed_effect(r.change);
    }
    return sum;
}

Digest Contract::prior_checkpoint() const {
    if (finalized_.empty()) return Digest{};
    return finalized_.back().block_hash;
}

Release Contract::refund_wager(const crypto::PublicKey& to, Coins amount) const {
    return {Pot::Escrow, to, amount, "wager refund"};
}

Outputs Contract::deposit(const DepositCall& c) {
    Outputs out;
    if (halted_ || c.amount == 0) {
        out.notices.push_back(party_notice(NoticeKind::CannotDeposit, epoch_, c.client, c.amount,
                                           halted_ ? "halted" : "zero amount"));
        if (c.amount > 0) out.releases.push_back({Pot::Frozen, c.client, c.amount, "deposit refund"});
        return out;
    }
    records_.push_back({epoch_, chain::make_adjustment(chain::TxKind::Deposit, c.client, c.amount, epoch_)});
    clients_.insert(c.client);
    total_balance_ += c.amount;
    out.notices.push_back(party_notice(NoticeKind::DepositReceived, epoch_, c.client, c.amount));
    return out;
}

Outputs Contract::commit(const CommitCall& c, Tick now) {
    Outputs out;
    auto reject = [&](std::string why) {
        Notice n = notice(NoticeKind::CommitRejected, epoch_, std::move(why));
        n.party = c.submitter;
        out.notices.push_back(std::move(n));
        return out;
    };
    if (halted_) return reject("halted");
    if (!(c.submitter == roster_[leader_slot()])) return reject("submitter is not the current leader");
    if (c.epoch != epoch_) return reject("wrong epoch");
    if (pending_) return reject("a checkpoint is already pending");
    if (committed_this_tenure_) return reject("leader already committed in this tenure");

    pending_ = PendingCheckpoint{c.cp, leader_slot(), now, now + config_.delta};
    committed_this_tenure_ = true;
    requested_this_term_.clear();
    Notice n = notice(NoticeKind::BlockReceived, epoch_);
    n.slot = leader_slot();
    out.notices.push_back(std::move(n));
    return out;
}

Outputs Contract::withdraw(const WithdrawCall& c) {
    Outputs out;
    auto reject = [&](std::string why) {
        out.notices.push_back(party_notice(NoticeKind::WithdrawNotOk, epoch_, c.client, c.amount, std::move(why)));
        return out;
    };
    if (halted_) return reject("halted; exits only");
    if (!pending_) return reject("no pending term; retry later");
    if (!clients_.contains(c.client)) return reject("not a client");
    if (c.amount == 0) return reject("zero amount");
    if (requested_this_term_.contains(c.client)) return reject("one request per pending term");
    if (c.pop.path.key != c.client.bytes) return reject("proof names another account");
    if (!chain::verify_pop(pending_->cp, c.pop, c.amount)) return reject("invalid proof of possession");

    Record r{epoch_, chain::make_adjustment(chain::TxKind::Withdraw, c.client, c.amount, epoch_)};
    r.awaiting_payout = true;
    records_.push_back(std::move(r));
    requested_this_term_.insert(c.client);
    out.notices.push_back(party_notice(NoticeKind::WithdrawOk, epoch_, c.client, c.amount));
    return out;
}

Outputs Contract::record_exit(const AccountId& client, Coins amount, bool pay_now) {
    Outputs out;
    Record r{epoch_, chain::make_adjustment(chain::TxKind::Exit, client, amount, epoch_)};
    if (pay_now) {
        if (amount > 0) out.releases.push_back({Pot::Frozen, client, amount, "exit"});
        total_balance_ -= amount;
    } else {
        r.awaiting_payout = true;
    }
    records_.push_back(std::move(r));
    clients_.erase(client);
    any_exit_ = true;
    out.notices.push_back(party_notice(NoticeKind::ExitOk, epoch_, client, amount));
    return out;
}

Outputs Contract::exit(const ExitCall& c) {
    Outputs out;
    auto reject = [&](std::string why) {
        out.notices.push_back(party_notice(NoticeKind::CannotExit, epoch_, c.client, 0, std::move(why)));
        return out;
    };
    if (!clients_.contains(c.client)) return reject("not a client");
    if (sessions_.contains(c.client)) return reject("interactive exit in progress");

    if (halted_) {
        std::int64_t amount = 0;
        if (finalized_.empty()) {
            amount = unreflected(c.client, 0);
        } else {
            if (c.pop.path.key != c.client.bytes) return reject("proof names another account");
            if (!chain::verify_pop(finalized_.back(), c.pop, c.pop.balance)) {
                return reject("invalid proof against the last finalized checkpoint");
            }
            amount = static_cast<std::int64_t>(c.pop.balance) + unreflected(c.client, finalized_.size() - 1);
        }
        if (amount < 0) return reject("negative exit balance");
        out = record_exit(c.client, static_cast<Coins>(amount), true);
        out.append(maybe_end());
        return out;
    }

    if (!pending_) return reject("no pending term; retry later");
    if (requested_this_term_.contains(c.client)) return reject("one request per pending term");
    if (c.pop.path.key != c.client.bytes) return reject("proof names another account");
    if (!chain::verify_pop(pending_->cp, c.pop, c.pop.balance)) return reject("invalid proof of possession");
    const std::int64_t amount = static_cast<std::int64_t>(c.pop.balance) + unreflected(c.client, epoch_);
    if (amount < 0) return reject("negative exit balance");
    requested_this_term_.insert(c.client);
    return record_exit(c.client, static_cast<Coins>(amount), false);
}

Outputs Contract::challenge(const CheckpointChallenge& c) {
    Outputs out;
    auto with_notice = [&](NoticeKind kind, std::string why) {
        Notice n = notice(kind, epoch_, std::move(why));
        n.party = c.challenger;
        n.amount = c.wager;
        out.notices.push_back(std::move(n));
    };
    if (!pending_ || halted_ || c.epoch != epoch_ || !(c.disputed == pending_->cp)) {
        if (c.wager > 0) out.releases.push_back(refund_wager(c.challenger, c.wager));
        with_notice(NoticeKind::ChallengeStale, "no such pending checkpoint");
        return out;
    }
    const bool malformed = c.wager != config_.wager || c.prior != prior_checkpoint();
    if (malformed || chain::verify_checkpoint(*scheme_, pending_->cp, roster_)) {
        if (c.wager > 0) out.releases.push_back({Pot::Escrow, std::nullopt, c.wager, "wager forfeited"});
        pending_->deadline += config_.delta;
        extensions_ += config_.delta;
        with_notice(NoticeKind::ChallengeInvalid, malformed ? "malformed evidence" : "checkpoint verifies");
        return out;
    }
    out.releases.push_back(refund_wager(c.challenger, c.wager));
    with_notice(NoticeKind::ChallengeValid, "checkpoint fails verification");
    const std::size_t slot = pending_->slot;
    out.append(void_pending("invalid checkpoint"));
    out.append(replace_leader(slot));
    return out;
}

Outputs Contract::challenge(const LeaderChallenge& c) {
    Outputs out;
    auto with_notice = [&](NoticeKind kind, std::string why) {
        Notice n = notice(kind, epoch_, std::move(why));
        n.party = c.challenger;
        n.amount = c.wager;
        n.slot = c.slot;
        out.notices.push_back(std::move(n));
    };
    if (halted_ || c.epoch != epoch_ || c.slot != leader_slot() || !(roster_[c.slot] == c.leader) || pending_) {
        if (c.wager > 0) out.releases.push_back(refund_wager(c.challenger, c.wager));
        with_notice(NoticeKind::ChallengeStale, "leader already replaced or committed");
        return out;
    }
    bool valid = c.wager == config_.wager && c.index.n == config_.n;
    if (valid) {
        try {
            auto voters = crypto::decode_signers(c.index);
            std::vector<crypto::PublicKey> keys;
            for (auto j : voters) keys.push_back(roster_[j]);
            valid = voters.size() > config_.f &&
                    scheme_->verify_same(chain::vote_out_message(c.epoch, c.slot, c.leader), keys, c.votes);
        } catch (const Error&) {
            valid = false;
        }
    }
    if (!valid) {
        if (c.wager > 0) out.releases.push_back({Pot::Escrow, std::nullopt, c.wager, "wager forfeited"});
        with_notice(NoticeKind::ChallengeInvalid, "vote aggregate rejected");
        return out;
    }
    out.releases.push_back(refund_wager(c.challenger, c.wager));
    with_notice(NoticeKind::ChallengeValid, "leader voted out");
    out.append(replace_leader(c.slot));
    return out;
}

Outputs Contract::exit_request(const ExitRequestCall& c, Tick now) {
    Outputs out;
    auto refuse = [&](std::string why) {
        out.notices.push_back(party_notice(NoticeKind::InteractiveExitRefused, epoch_, c.client, 0, std::move(why)));
        return out;
    };
    if (halted_ || !pending_ || finalized_.empty()) return refuse("no pending term with a finalized predecessor");
    if (!clients_.contains(c.client)) return refuse("not a client");
    if (requested_this_term_.contains(c.client) || sessions_.contains(c.client)) {
        return refuse("one request per pending term");
    }
    if (c.prev_pop.path.key != c.client.bytes ||
        !chain::verify_pop(finalized_.back(), c.prev_pop, c.prev_pop.balance)) {
        return refuse("previous balance does not verify against the last finalized checkpoint");
    }
    InteractiveExit s;
    s.client = c.client;
    s.epoch = epoch_;
    s.leader = roster_[pending_->slot];
    s.prev_balance = c.prev_pop.balance;
    s.opened = now;
    s.respond_by = now + config_.delta;
    s.resolve_at = now + 2 * config_.delta;
    sessions_.emplace(c.client, std::move(s));
    requested_this_term_.insert(c.client);
    Notice n = party_notice(NoticeKind::InteractiveExitOpened, epoch_, c.client, c.prev_pop.balance);
    n.slot = pending_->slot;
    out.notices.push_back(std::move(n));
    return out;
}

Outputs Contract::exit_response(const ExitResponseCall& c, Tick submitted) {
    auto it = sessions_.find(c.client);
    if (it == sessions_.end() || submitted > it->second.respond_by) return {};
    auto& s = it->second;
    const bool from_leader = c.responder == s.leader;
    if (!from_leader && !(c.responder == s.client)) return {};

    if (from_leader && c.path && !s.leader_path && pending_ && c.path->path.key == s.client.bytes &&
        chain::verify_pop(pending_->cp, *c.path, c.path->balance)) {
        s.leader_path = c.path;
    }
    for (const auto& co : c.txs) {
        const auto& tx = co.tx;
        if (tx.kind != chain::TxKind::Transfer || tx.amount == 0 || tx.sender == tx.receiver) continue;
        if (!(tx.sender == s.client) && !(tx.receiver == s.client)) continue;
        if (!chain::epoch_tag_ok(s.epoch, tx.epoch_tag)) continue;
        if (!scheme_->verify(tx.signing_bytes(), tx.signature, tx.sender)) continue;
        const Digest h = tx.hash();
        if (!scheme_->verify(chain::receipt_message(s.epoch, h), co.receipt, s.leader)) continue;
        s.txs.emplace(h, tx);
    }
    return {};
}

Outputs Contract::resolve_session(const InteractiveExit& s) {
    sessions_.erase(s.client);
    if (!s.leader_path) return trigger_mass_exit("leader did not reveal the account path");

    std::int64_t recomputed = static_cast<std::int64_t>(s.prev_balance);
    for (const auto& r : records_) {
        if (r.epoch + 1 == s.epoch && !r.cancelled && chain::adjustment_account(r.change) == s.client) {
            recomputed += signed_effect(r.change);
        }
    }
    for (const auto& [h, tx] : s.txs) {
        const auto amt = static_cast<std::int64_t>(tx.amount);
        if (tx.receiver == s.client) recomputed += amt;
        if (tx.sender == s.client) recomputed -= amt;
    }
    if (recomputed < 0 || static_cast<Coins>(recomputed) != s.leader_path->balance) {
        return trigger_mass_exit("recomputed balance does not match the pending checkpoint");
    }
    const std::int64_t amount = recomputed + unreflected(s.client, epoch_);
    Outputs out;
    out.notices.push_back(party_notice(NoticeKind::InteractiveExitResolved, epoch_, s.client,
                                       static_cast<Coins>(recomputed)));
    out.append(record_exit(s.client, static_cast<Coins>(amount), false));
    return out;
}

Outputs Contract::trigger_mass_exit(const std::string& why) {
    Outputs out;
    mass_exit_ = true;
    out.append(void_pending("mass exit"));
    sessions_.clear();
    halted_ = true;
    out.notices.push_back(notice(NoticeKind::MassExit, epoch_, why));
    out.notices.push_back(notice(NoticeKind::Halted, epoch_, "mass exit"));
    return out;
}

Outputs Contract::void_pending(const std::string& why) {
    Outputs out;
    if (!pending_) return out;
    for (auto& r : records_) {
        if (r.epoch != epoch_ || r.cancelled || r.change.kind == chain::TxKind::Deposit) continue;
        r.cancelled = true;
        r.awaiting_payout = false;
        if (r.change.kind == chain::TxKind::Exit) clients_.insert(r.change.sender);
    }
    sessions_.clear();
    requested_this_term_.clear();
    pending_.reset();
    out.notices.push_back(notice(NoticeKind::CheckpointVoided, epoch_, why));
    return out;
}

Outputs Contract::replace_leader(std::size_t slot) {
    Outputs out;
    roster_[slot] = replace_(slot);
    committed_this_tenure_ = false;
    Notice n = notice(NoticeKind::LeaderReplaced, epoch_);
    n.slot = slot;
    out.notices.push_back(std::move(n));
    return out;
}

Outputs Contract::finalize_pending() {
    Outputs out;
    finalized_.push_back(pending_->cp);
    rosters_.push_back(roster_);
    for (auto& r : records_) {
        if (r.epoch != epoch_ || !r.awaiting_payout || r.cancelled) continue;
        r.awaiting_payout = false;
        const auto& client = r.change.sender;
        if (r.change.amount > 0) {
            out.releases.push_back({Pot::Frozen, client, r.change.amount, std::string(chain::to_string(r.change.kind))});
        }
        total_balance_ -= r.change.amount;
    }
    Notice n = notice(NoticeKind::EpochChanged, epoch_);
    n.slot = pending_->slot;
    out.notices.push_back(std::move(n));
    const Epoch done = epoch_;
    ++epoch_;
    pending_.reset();
    committed_this_tenure_ = false;
    requested_this_term_.clear();
    if (done >= config_.validity_endpoint) {
        halted_ = true;
        out.notices.push_back(notice(NoticeKind::Halted, epoch_, "validity endpoint reached"));
    }
    out.append(maybe_end());
    return out;
}

Outputs Contract::maybe_end() {
    Outputs out;
    if (!any_exit_ || !clients_.empty() || execution_end_) return out;
    for (const auto& r : records_) {
        if (r.awaiting_payout) return out;
    }
    execution_end_ = total_balance_ == 0;
    halted_ = true;
    Notice n = notice(NoticeKind::ExecutionEnd, epoch_);
    n.flag = *execution_end_;
    n.amount = total_balance_;
    out.notices.push_back(std::move(n));
    return out;
}

}  // namespace vulcan::contract
