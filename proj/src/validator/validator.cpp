// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/validator/validator.hpp"

#include <algorithm>

#include "vulcan/chain/checkpoint.hpp"
#include "vulcan/common/error.hpp"

namespace vulcan::validator {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const chain::Balances kNoBalances;

}  // namespace

void ProtocolConfig::validate() const {
    if (n < 2 * f + 1) throw ConfigError("n must be at least 2f + 1");
    if (n > crypto::kMaxValidators) throw ConfigError("at most 64 validators");
    if (max_rounds < 1) throw ConfigError("max_rounds must be at least 1");
    if (delta == 0 || tau == 0 || t_max == 0) throw ConfigError("delta, tau and t_max must be positive");
    if (n_max == 0) throw ConfigError("n_max must be positive");
    if (wager == 0) throw ConfigError("wager must be positive");
}

const chain::Block* Board::find(const Digest& hash) const {
    auto it = blocks_.find(hash);
    return it == blocks_.end() ? nullptr : &it->second;
}

std::string_view to_string(Term term) {
    switch (term) {
        case Term::Collecting: return "collecting";
        case Term::Proposing: return "proposing";
        case Term::Committing: return "committing";
        case Term::Pending: return "pending";
    }
    return "unknown";
}

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::Honest: return "Honest";
        case Strategy::WithholdAndCommit: return "WithholdAndCommit";
        case Strategy::Equivocate: return "Equivocate";
        case Strategy::SilentLeader: return "SilentLeader";
        case Strategy::TamperBalances: return "TamperBalances";
        case Strategy::ApproveAnything: return "ApproveAnything";
        case Strategy::DropClientTxs: return "DropClientTxs";
    }
    return "unknown";
}

Strategy strategy_from_string(std::string_view name) {
    for (auto s : {Strategy::Honest, Strategy::WithholdAndCommit, Strategy::Equivocate, Strategy::SilentLeader,
                   Strategy::TamperBalances, Strategy::ApproveAnything, Strategy::DropClientTxs}) {
        if (to_string(s) == name) return s;
    }
    throw ConfigError("unknown strategy: " + std::string(name));
}

std::string_view to_string(TimerKind kind) {
    switch (kind) {
        case TimerKind::CollectDeadline: return "collect-deadline";
        case TimerKind::ReplyTimeout: return "reply-timeout";
        case TimerKind::ProgressDeadline: return "progress-deadline";
    }
    return "unknown";
}

Coins Collector::available(const chain::AccountId& account) const {
    auto get = [&](const auto& m) -> Coins {
        auto it = m.find(account);
        return it == m.end() ? 0 : it->second;
    };
    const Coins have = get(base) + get(received);
    const Coins out = get(sent);
    return have > out ? have - out : 0;
}

chain::Balances apply_records_lenient(chain::Balances balances, const std::vector<chain::Transaction>& records) {
    for (const auto& r : records) {
        const auto& who = chain::adjustment_account(r);
        if (r.kind == chain::TxKind::Deposit) {
            balances[who] += r.amount;
        } else if (r.kind == chain::TxKind::Exit) {
            balances.erase(who);
        } else {
            auto& b = balances[who];
            b = b > r.amount ? b - r.amount : 0;
        }
    }
    return balances;
}

Validator::Validator(ProtocolConfig config, const crypto::SignatureScheme& scheme, std::size_t slot,
                     crypto::KeyPair keys, std::vector<StrategyWindow> strategies, std::set<std::size_t> coalition)
    : config_(config),
      scheme_(&scheme),
      slot_(slot),
      keys_(std::move(keys)),
      strategies_(std::move(strategies)),
      coalition_(std::move(coalition)) {
    config_.validate();
    coalition_.erase(slot_);
}

const chain::Balances& Validator::balances() const { return tip_ ? tip_->accounts : kNoBalances; }

const StrategyWindow* Validator::window(Strategy s, Epoch e) const {
    for (const auto& w : strategies_) {
        if (w.strategy == s && w.covers(e)) return &w;
    }
    return nullptr;
}

bool Validator::active(Strategy s, Epoch e) const { return window(s, e) != nullptr; }

bool Validator::byzantine_at(Epoch e) const {
    return std::any_of(strategies_.begin(), strategies_.end(),
                       [&](const StrategyWindow& w) { return w.strategy != Strategy::Honest && w.covers(e); });
}

std::size_t Validator::leader_slot(const World& w) const { return epoch_ % w.contract->roster().size(); }

bool Validator::is_leader(const World& w) const {
    return !retired_ && leader_slot(w) == slot_ && w.contract->roster()[slot_] == keys_.public_key;
}

const chain::Block* Validator::find_block(const Digest& hash) const {
    if (tip_ && tip_->hash() == hash) return &*tip_;
    auto it = candidates_.find(hash);
    return it == candidates_.end() ? nullptr : &it->second;
}

const chain::Block* Validator::known_block(const World& w, const Digest& hash) const {
    if (const auto* b = find_block(hash)) return b;
    return w.board->find(hash);
}

// ---- Lifecycle ----

Outbox Validator::start(const World& w, std::uint32_t round) {
    Outbox out;
    const auto& c = *w.contract;
    epoch_ = c.epoch();
    round_ = round;
    tenure_round_ = 1;
    finalized_at_ = w.now;
    if (!c.finalized().empty()) {
        if (const auto* b = w.board->find(c.prior_checkpoint())) tip_ = *b;
    }
    begin_collecting(w, epoch_, out);
    arm_progress_deadline(w, out);
    return out;
}

void Validator::clear_epoch_state() {
    candidates_.clear();
    committed_hash_.reset();
    committed_this_epoch_ = false;
    proposals_.clear();
    approvals_.clear();
    replied_.clear();
    round_open_ = false;
    votes_.clear();
    voted_ = false;
    challenged_ = false;
    vote_submitted_ = false;
    term_ = Term::Collecting;
}

Outbox Validator::on_notice(const World& w, const contract::Notice& n) {
    Outbox out;
    if (retired_ || halted_) return out;
    using contract::NoticeKind;
    switch (n.kind) {
        case NoticeKind::BlockReceived:
            if (n.epoch == epoch_) on_block_received(w, out);
            break;
        case NoticeKind::EpochChanged:
            if (n.epoch == epoch_) on_epoch_changed(w, n, out);
            break;
        case NoticeKind::LeaderReplaced:
            if (n.epoch == epoch_) on_leader_change(w, out);
            break;
        case NoticeKind::CheckpointVoided:
            if (n.epoch == epoch_) {
                candidates_.clear();
                committed_hash_.reset();
            }
            break;
        case NoticeKind::InteractiveExitOpened:
            on_exit_session(w, n, out);
            break;
        case NoticeKind::Halted:
            halted_ = true;
            break;
        default:
            break;
    }
    return out;
}

Outbox Validator::on_timer(const World& w, const Timer& t) {
    Outbox out;
    if (retired_ || halted_) return out;
    switch (t.kind) {
        case TimerKind::CollectDeadline:
            if (t.generation == collect_gen_) maybe_propose(w, out);
            break;
        case TimerKind::ReplyTimeout:
            if (t.generation == reply_gen_ && round_open_) finish_round(w, out);
            break;
        case TimerKind::ProgressDeadline: {
            if (t.generation != progress_gen_) break;
            const auto& c = *w.contract;
            const bool stalled = c.epoch() == epoch_ && !c.pending() && !c.halted();
            if (stalled && !is_leader(w)) vote_out(w, out);
            break;
        }
    }
    return out;
}

Outbox Validator::on_message(const World& w, const Origin& from, const Message& m) {
    Outbox out;
    if (retired_ || halted_) return out;
    const std::size_t peer = std::holds_alternative<FromValidator>(from) ? std::get<FromValidator>(from).slot : ~std::size_t{0};
    std::visit(Overloaded{
                   [&](const TransferFunds& x) { on_transfer(w, from, w.now, x.tx, out); },
                   [&](const TxRequest& x) { on_transfer(w, from, w.now, x.tx, out); },
                   [&](const TxReply&) {},
                   [&](const ProposedBlock& x) { on_proposal(w, x, peer, out); },
                   [&](const BlockVote& x) { on_vote(w, x, peer, out); },
                   [&](const CommitEcho& x) {
                       if (x.epoch == epoch_ && peer == leader_slot(w) && config_.overlap &&
                           collector_.epoch == epoch_ && !is_leader(w)) {
                           if (known_block(w, x.cp.block_hash)) committed_hash_ = x.cp.block_hash;
                           begin_collecting(w, epoch_ + 1, out);
                       }
                   },
                   [&](const EpochRestart& x) { on_restart(w, x, peer, out); },
                   [&](const LeaderVote& x) { on_leader_vote(w, x, out); },
                   [&](const Receipt&) {},
               },
               m);
    return out;
}

// ---- Collection ----

void Validator::begin_collecting(const World& w, Epoch e, Outbox& out) {
    collector_ = Collector{};
    collector_.epoch = e;
    collector_.started = w.now;
    collecting_ = true;
    refresh_base(w);
    ++collect_gen_;
    out.traces.push_back({"collect", e, round_, w.now});

    auto pending = std::move(buffer_);
    buffer_.clear();
    for (const auto& b : pending) {
        const Origin origin = b.from_client ? Origin{FromClient{b.tx.sender}} : Origin{FromValidator{slot_}};
        on_transfer(w, origin, b.arrival, b.tx, out);
    }
    out.timers.push_back({TimerKind::CollectDeadline, w.now + config_.t_max, collect_gen_});
}

void Validator::refresh_base(const World& w) {
    const Epoch e = collector_.epoch;
    const chain::Block* prev = nullptr;
    if (e > 0) {
        if (tip_ && tip_->header.epoch == e - 1) {
            prev = &*tip_;
        } else if (committed_hash_) {
            prev = known_block(w, *committed_hash_);
        }
    }
    const Digest prev_hash = prev ? prev->hash() : Digest{};
    const std::size_t records = w.contract->records().size();
    if (prev_hash == collector_.base_block && records == collector_.base_records) return;
    collector_.base_block = prev_hash;
    collector_.base_records = records;
    collector_.base = apply_records_lenient(prev ? prev->accounts : chain::Balances{},
                                            w.contract->adjustments_for_block(e));
}

std::string Validator::intake_check(const World& w, const chain::Transaction& tx) const {
    if (tx.kind != chain::TxKind::Transfer) return "not a transfer";
    if (tx.amount == 0) return "zero amount";
    if (tx.sender == tx.receiver) return "self-transfer";
    if (!chain::epoch_tag_ok(collector_.epoch, tx.epoch_tag)) return "stale epoch tag";
    if (!scheme_->verify(tx.signing_bytes(), tx.signature, tx.sender)) return "bad signature";
    if (collector_.epoch > 0 && tip_ && tip_->header.epoch + 1 == collector_.epoch) {
        const Digest h = tx.hash();
        for (const auto& prev : tip_->txs) {
            if (prev.hash() == h) return "replay";
        }
    }
    (void)w;
    if (collector_.available(tx.sender) < tx.amount) return "insufficient balance";
    return {};
}

void Validator::on_transfer(const World& w, const Origin& from, Tick arrival, const chain::Transaction& tx,
                            Outbox& out) {
    const bool from_client = std::holds_alternative<FromClient>(from);
    const Epoch e = collecting_ ? collector_.epoch : epoch_;
    if (const auto* drop = window(Strategy::DropClientTxs, e); drop && (!drop->target || *drop->target == tx.sender)) {
        return;
    }
    if (!collecting_) {
        buffer_.push_back({arrival, tx, from_client});
        return;
    }
    auto reply = [&](bool ok, std::string why) {
        TxReply r{tx.hash(), ok, std::move(why)};
        if (from_client) {
            out.sends.push_back({ToClient{std::get<FromClient>(from).client}, r});
        } else if (std::get<FromValidator>(from).slot != slot_) {
            out.sends.push_back({ToValidator{std::get<FromValidator>(from).slot}, r});
        }
    };
    const Digest h = tx.hash();
    if (collector_.hashes.contains(h)) {
        reply(true, "duplicate");
        return;
    }
    refresh_base(w);
    if (auto why = intake_check(w, tx); !why.empty()) {
        reply(false, why);
        return;
    }
    collector_.queue.push_back({arrival, tx});
    collector_.hashes.insert(h);
    collector_.sent[tx.sender] += tx.amount;
    collector_.received[tx.receiver] += tx.amount;
    reply(true, {});
    if (from_client) out.sends.push_back({ToAllValidators{}, TxRequest{tx}});
    if (collector_.queue.size() >= config_.n_max) maybe_propose(w, out);
}

// ---- Leader ----

bool Validator::ready_for_leader(const World& w) const {
    const auto& c = *w.contract;
    return c.epoch() == epoch_ && !c.pending() && !c.halted();
}

void Validator::maybe_propose(const World& w, Outbox& out) {
    if (!is_leader(w) || !collecting_ || collector_.epoch != epoch_ || term_ != Term::Collecting) return;
    if (committed_this_epoch_ || round_open_ || !ready_for_leader(w)) return;
    if (active(Strategy::SilentLeader, epoch_)) return;
    if (tenure_round_ > config_.max_rounds) return;
    const bool full = collector_.queue.size() >= config_.n_max;
    const bool timed_out = w.now >= collector_.started + config_.t_max;
    if (full || timed_out) propose(w, out);
}

std::optional<chain::BlockContext> Validator::context_for(const World& w, Epoch e) const {
    const auto& c = *w.contract;
    if (c.epoch() != e) return std::nullopt;
    chain::BlockContext ctx;
    ctx.scheme = scheme_;
    ctx.epoch = e;
    if (e > 0) {
        const Digest prior = c.prior_checkpoint();
        const chain::Block* prev = known_block(w, prior);
        if (!prev) return std::nullopt;
        ctx.prev_header_hash = prior;
        ctx.last_checkpoint = prior;
        ctx.prev_balances = prev->accounts;
        for (const auto& tx : prev->txs) {
            if (!tx.is_adjustment()) ctx.prev_tx_hashes.insert(tx.hash());
        }
    }
    ctx.adjustments = c.adjustments_for_block(e);
    return ctx;
}

chain::Block Validator::build(const World& w, const chain::BlockContext& ctx,
                              const std::vector<chain::Transaction>& q) const {
    (void)w;
    chain::Block block = chain::build_block(ctx, q);
    const auto* tamper = window(Strategy::TamperBalances, ctx.epoch);
    if (!tamper) return block;

    auto& acc = block.accounts;
    auto victim = tamper->target ? acc.find(*tamper->target) : acc.end();
    if (victim != acc.end() && victim->second > 0) {
        auto thief = std::find_if(acc.begin(), acc.end(), [&](const auto& kv) { return !(kv.first == victim->first); });
        if (thief != acc.end()) {
            thief->second += victim->second;
            victim->second = 0;
        } else {
            victim->second += 1000;
        }
    } else if (!acc.empty()) {
        acc.begin()->second += 1000;
    } else {
        acc[keys_.public_key] = 1000;
    }
    block.trie = chain::build_trie(acc);
    block.header.account_root = block.trie.root();
    return block;
}

void Validator::propose(const World& w, Outbox& out) {
    auto ctx = context_for(w, epoch_);
    if (!ctx) return;

    auto entries = collector_.queue;
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        if (a.tx.sender != b.tx.sender) return a.tx.sender < b.tx.sender;
        return a.tx.signature < b.tx.signature;
    });
    std::vector<chain::Transaction> queue;
    queue.reserve(entries.size());
    for (auto& e : entries) queue.push_back(std::move(e.tx));

    proposals_.clear();
    proposals_.push_back(build(w, *ctx, queue));
    const bool equivocate = active(Strategy::Equivocate, epoch_);
    if (equivocate && !queue.empty()) {
        queue.pop_back();
        chain::Block other = build(w, *ctx, queue);
        if (other.hash() != proposals_.front().hash()) proposals_.push_back(std::move(other));
    }

    term_ = Term::Proposing;
    collecting_ = false;
    round_open_ = true;
    approvals_.clear();
    replied_.clear();
    for (const auto& b : proposals_) {
        approvals_.push_back(chain::make_approval(*scheme_, slot_, keys_.secret_key, b.hash()));
        signed_.emplace(std::make_pair(epoch_, round_), b.hash());
        candidates_.emplace(b.hash(), b);
    }

    const std::size_t n = w.contract->roster().size();
    std::vector<std::size_t> followers;
    for (std::size_t j = 0; j < n; ++j) {
        if (j != slot_) followers.push_back(j);
    }
    std::set<std::size_t> recipients;
    auto send = [&](std::size_t to, const chain::Block& b) {
        out.sends.push_back({ToValidator{to}, ProposedBlock{epoch_, tenure_round_, b}});
        recipients.insert(to);
    };
    if (active(Strategy::WithholdAndCommit, epoch_)) {
        for (auto j : coalition_) {
            if (j < n) send(j, proposals_.front());
        }
    } else if (proposals_.size() == 2) {
        std::vector<std::size_t> outsiders;
        for (auto j : followers) {
            if (coalition_.contains(j)) {
                send(j, proposals_[0]);
                send(j, proposals_[1]);
            } else {
                outsiders.push_back(j);
            }
        }
        for (std::size_t i = 0; i < outsiders.size(); ++i) send(outsiders[i], proposals_[i < outsiders.size() / 2 ? 0 : 1]);
    } else {
        for (auto j : followers) send(j, proposals_.front());
        out.publish.push_back(proposals_.front());
    }
    expected_replies_ = recipients.size();
    ++reply_gen_;
    out.traces.push_back({"propose", epoch_, round_, w.now});
    if (expected_replies_ == 0) {
        finish_round(w, out);
    } else {
        out.timers.push_back({TimerKind::ReplyTimeout, w.now + config_.reply_timeout(), reply_gen_});
    }
}

void Validator::on_vote(const World& w, const BlockVote& v, std::size_t from, Outbox& out) {
    if (!round_open_ || v.epoch != epoch_ || v.round != tenure_round_) return;
    replied_.insert(from);
    if (v.approval && v.approval->validator == from) approvals_.push_back(*v.approval);

    if (active(Strategy::Equivocate, epoch_)) {
        const auto& roster = w.contract->roster();
        for (const auto& b : proposals_) {
            try {
                auto cp = chain::make_checkpoint(*scheme_, b.hash(), approvals_, roster);
                round_open_ = false;
                commit(w, cp, b, out);
                return;
            } catch (const ChainError&) {
            }
        }
    }
    if (replied_.size() >= expected_replies_) finish_round(w, out);
}

void Validator::finish_round(const World& w, Outbox& out) {
    round_open_ = false;
    const auto& roster = w.contract->roster();
    for (const auto& b : proposals_) {
        try {
            auto cp = chain::make_checkpoint(*scheme_, b.hash(), approvals_, roster);
            commit(w, cp, b, out);
            return;
        } catch (const ChainError&) {
        }
    }

    if (active(Strategy::WithholdAndCommit, epoch_)) {
        // Claim a quorum the signatures do not support.
        const auto& block = proposals_.front();
        const auto msg = chain::approval_message(block.hash());
        std::map<std::size_t, crypto::Signature> real;
        for (const auto& a : approvals_) {
            if (a.block_hash == block.hash() && a.validator < roster.size() &&
                scheme_->verify(msg, a.signature, roster[a.validator])) {
                real.emplace(a.validator, a.signature);
            }
        }
        std::vector<crypto::PublicKey> keys;
        std::vector<crypto::Signature> sigs;
        std::set<std::size_t> claimed;
        for (const auto& [j, s] : real) {
            keys.push_back(roster[j]);
            sigs.push_back(s);
            claimed.insert(j);
        }
        for (std::size_t j = 0; claimed.size() < chain::quorum(roster.size()) && j < roster.size(); ++j) {
            claimed.insert(j);
        }
        chain::Checkpoint cp{block.hash(), scheme_->combine_same(msg, keys, sigs),
                             crypto::encode_signers(claimed, roster.size())};
        commit(w, cp, block, out);
        return;
    }

    // Too few approvals: restart with an empty queue. After the last permitted attempt the
    // same message announces that this leader gives up, and followers vote it out.
    const bool give_up = tenure_round_ >= config_.max_rounds;
    ++tenure_round_;
    if (!give_up) ++round_;
    candidates_.clear();
    proposals_.clear();
    buffer_.clear();
    term_ = Term::Collecting;
    out.sends.push_back({ToAllValidators{}, EpochRestart{epoch_, tenure_round_}});
    out.traces.push_back({give_up ? "give-up" : "restart", epoch_, round_, w.now});
    begin_collecting(w, epoch_, out);
}

void Validator::commit(const World& w, const chain::Checkpoint& cp, const chain::Block& block, Outbox& out) {
    out.submits.push_back({contract::CommitCall{keys_.public_key, epoch_, cp}, 0});
    committed_this_epoch_ = true;
    committed_hash_ = block.hash();
    candidates_.insert_or_assign(block.hash(), block);
    term_ = Term::Committing;
    if (!active(Strategy::WithholdAndCommit, epoch_)) out.publish.push_back(block);
    for (const auto& tx : block.txs) {
        if (tx.is_adjustment()) continue;
        Receipt r{epoch_, tx, keys_.public_key,
                  scheme_->sign(chain::receipt_message(epoch_, tx.hash()), keys_.secret_key)};
        out.sends.push_back({ToClient{tx.sender}, r});
        out.sends.push_back({ToClient{tx.receiver}, r});
    }
    out.sends.push_back({ToAllValidators{}, CommitEcho{epoch_, cp}});
    out.traces.push_back({"commit", epoch_, round_, w.now});
    if (config_.overlap) begin_collecting(w, epoch_ + 1, out);
}

// ---- Follower ----

void Validator::on_proposal(const World& w, const ProposedBlock& p, std::size_t from, Outbox& out) {
    if (from != leader_slot(w) || p.epoch != epoch_) return;
    const Digest h = p.block.hash();
    auto vote = [&](bool approve) {
        BlockVote v{epoch_, p.round, h, std::nullopt};
        if (approve) {
            v.approval = chain::make_approval(*scheme_, slot_, keys_.secret_key, h);
            signed_.emplace(std::make_pair(epoch_, round_), h);
        }
        out.sends.push_back({ToValidator{from}, v});
    };

    if (active(Strategy::ApproveAnything, epoch_)) {
        candidates_.insert_or_assign(h, p.block);
        vote(true);
        return;
    }
    if (p.round != tenure_round_ || committed_hash_) {
        vote(false);
        return;
    }
    // Never a second approval in one (epoch, round); a repeat of the same block is ignored.
    if (auto it = signed_.find(std::make_pair(epoch_, round_)); it != signed_.end()) {
        if (it->second != h) vote(false);
        return;
    }
    auto ctx = context_for(w, epoch_);
    if (!ctx || !chain::validate_block(p.block, *ctx)) {
        vote(false);
        return;
    }
    candidates_.insert_or_assign(h, p.block);
    vote(true);
    out.publish.push_back(p.block);
    term_ = Term::Committing;
    collecting_ = false;
}

void Validator::arm_progress_deadline(const World& w, Outbox& out) {
    if (is_leader(w) || !ready_for_leader(w) || collector_.epoch != epoch_) return;
    const Tick ready = std::max(collector_.started + config_.t_max, finalized_at_);
    ++progress_gen_;
    out.timers.push_back({TimerKind::ProgressDeadline, ready + config_.progress_timeout(), progress_gen_});
}

void Validator::on_restart(const World& w, const EpochRestart& r, std::size_t from, Outbox& out) {
    if (from != leader_slot(w) || r.epoch != epoch_ || r.round <= tenure_round_ || committed_hash_) return;
    // A round past max_rounds is the leader giving up, not a new attempt.
    round_ += std::min<std::uint32_t>(r.round, config_.max_rounds) - std::min(tenure_round_, config_.max_rounds);
    tenure_round_ = r.round;
    candidates_.clear();
    buffer_.clear();
    term_ = Term::Collecting;
    begin_collecting(w, epoch_, out);
    if (tenure_round_ > config_.max_rounds) {
        vote_out(w, out);
    } else {
        arm_progress_deadline(w, out);
    }
}

void Validator::vote_out(const World& w, Outbox& out) {
    if (voted_ || byzantine_at(epoch_)) return;
    voted_ = true;
    const std::size_t ls = leader_slot(w);
    const auto& leader = w.contract->roster()[ls];
    LeaderVote v{epoch_, ls, leader, slot_,
                 scheme_->sign(chain::vote_out_message(epoch_, ls, leader), keys_.secret_key)};
    out.sends.push_back({ToAllValidators{}, v});
    out.traces.push_back({"vote", epoch_, round_, w.now});
    on_leader_vote(w, v, out);
}

void Validator::on_leader_vote(const World& w, const LeaderVote& v, Outbox& out) {
    if (byzantine_at(epoch_) || v.epoch != epoch_) return;
    const auto& roster = w.contract->roster();
    const std::size_t ls = leader_slot(w);
    if (v.slot != ls || !(v.leader == roster[ls]) || v.voter >= roster.size() || v.voter == ls) return;
    if (!scheme_->verify(chain::vote_out_message(v.epoch, v.slot, v.leader), v.signature, roster[v.voter])) return;
    votes_.emplace(v.voter, v.signature);
    if (vote_submitted_ || votes_.size() <= config_.f) return;

    vote_submitted_ = true;
    std::vector<crypto::PublicKey> keys;
    std::vector<crypto::Signature> sigs;
    std::set<std::size_t> voters;
    for (const auto& [j, s] : votes_) {
        keys.push_back(roster[j]);
        sigs.push_back(s);
        voters.insert(j);
    }
    const auto msg = chain::vote_out_message(v.epoch, v.slot, v.leader);
    contract::LeaderChallenge ch{keys_.public_key, epoch_, ls, v.leader, scheme_->combine_same(msg, keys, sigs),
                                 crypto::encode_signers(voters, roster.size()), config_.wager};
    out.submits.push_back({ch, config_.wager});
    out.traces.push_back({"challenge-ncp", epoch_, round_, w.now});
}

// ---- Contract-driven ----

void Validator::on_block_received(const World& w, Outbox& out) {
    const auto& c = *w.contract;
    if (!c.pending()) return;
    term_ = Term::Pending;
    const auto& cp = c.pending()->cp;
    if (c.pending()->slot == slot_ && c.roster()[slot_] == keys_.public_key) return;

    if (!chain::verify_checkpoint(*scheme_, cp, c.roster())) {
        if (!byzantine_at(epoch_) && !challenged_) {
            challenged_ = true;
            contract::CheckpointChallenge ch{keys_.public_key, epoch_, c.prior_checkpoint(), cp, config_.wager};
            out.submits.push_back({ch, config_.wager});
            out.traces.push_back({"challenge-cp", epoch_, round_, w.now});
        }
        return;
    }
    // A certified block wins even over one this validator approved or rejected.
    if (const auto* b = known_block(w, cp.block_hash)) {
        candidates_.insert_or_assign(cp.block_hash, *b);
        committed_hash_ = cp.block_hash;
    }
    if (config_.overlap && collector_.epoch == epoch_) {
        begin_collecting(w, epoch_ + 1, out);
    } else if (collector_.epoch == epoch_ + 1) {
        refresh_base(w);
    }
}

void Validator::on_epoch_changed(const World& w, const contract::Notice& n, Outbox& out) {
    (void)n;
    const auto& c = *w.contract;
    if (const auto* b = known_block(w, c.prior_checkpoint())) {
        tip_ = *b;
    } else {
        tip_.reset();
    }
    ++epoch_;
    round_ = 1;
    tenure_round_ = 1;
    clear_epoch_state();
    finalized_at_ = w.now;
    if (collector_.epoch != epoch_) {
        buffer_.clear();
        begin_collecting(w, epoch_, out);
    } else {
        collecting_ = true;
        refresh_base(w);
    }
    maybe_propose(w, out);
    arm_progress_deadline(w, out);
}

void Validator::on_leader_change(const World& w, Outbox& out) {
    ++round_;
    tenure_round_ = 1;
    clear_epoch_state();
    buffer_.clear();
    finalized_at_ = w.now;
    begin_collecting(w, epoch_, out);
    arm_progress_deadline(w, out);
}

void Validator::on_exit_session(const World& w, const contract::Notice& n, Outbox& out) {
    const auto& c = *w.contract;
    if (!n.party || n.slot != slot_ || !(c.roster()[slot_] == keys_.public_key)) return;
    if (!committed_this_epoch_ || !committed_hash_ || n.epoch != epoch_) return;
    const auto it = candidates_.find(*committed_hash_);
    if (it == candidates_.end()) return;
    const chain::Block& block = it->second;
    const auto& client = *n.party;

    contract::ExitResponseCall resp{keys_.public_key, client, std::nullopt, {}};
    if (block.accounts.contains(client)) resp.path = chain::make_pop(client, block);
    for (const auto& tx : block.txs) {
        if (tx.is_adjustment() || !(tx.sender == client || tx.receiver == client)) continue;
        resp.txs.push_back({tx, scheme_->sign(chain::receipt_message(epoch_, tx.hash()), keys_.secret_key)});
    }
    out.submits.push_back({resp, 0});
    out.traces.push_back({"exit-response", epoch_, round_, w.now});
}

}  // namespace vulcan::validator
