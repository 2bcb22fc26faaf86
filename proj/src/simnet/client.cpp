// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/simnet/client.hpp"

#include <algorithm>

#include "vulcan/chain/checkpoint.hpp"

namespace vulcan::simnet {

using contract::NoticeKind;

Client::Client(ClientSpec spec, const crypto::SignatureScheme& scheme, crypto::KeyPair keys)
    : spec_(std::move(spec)), scheme_(&scheme), keys_(std::move(keys)) {}

ClientOutbox Client::genesis() const {
    ClientOutbox out;
    out.submits.push_back({contract::DepositCall{keys_.public_key, spec_.deposit}, 0});
    out.deposit = spec_.deposit;
    return out;
}

std::optional<Coins> Client::finalized_balance(const ClientView& v) const {
    const auto& c = *v.contract;
    if (c.finalized().empty()) return Coins{0};
    const auto* block = v.board->find(c.prior_checkpoint());
    if (!block) return std::nullopt;
    auto it = block->accounts.find(keys_.public_key);
    return it == block->accounts.end() ? 0 : it->second;
}

std::optional<std::int64_t> Client::expected_balance(const ClientView& v) const {
    const auto& c = *v.contract;
    if (!c.pending()) return std::nullopt;
    const auto base = finalized_balance(v);
    if (!base) return std::nullopt;
    auto balance = static_cast<std::int64_t>(*base);
    for (const auto& adj : c.adjustments_for_block(c.epoch())) {
        if (!(chain::adjustment_account(adj) == keys_.public_key)) continue;
        const auto amt = static_cast<std::int64_t>(adj.amount);
        switch (adj.kind) {
            case chain::TxKind::Deposit: balance += amt; break;
            case chain::TxKind::Withdraw: balance -= amt; break;
            case chain::TxKind::Exit: balance = 0; break;
            case chain::TxKind::Transfer: break;
        }
    }
    const auto& leader = c.roster()[c.pending()->slot];
    if (auto it = receipts_.find({c.epoch(), leader}); it != receipts_.end()) {
        for (const auto& [h, co] : it->second) {
            const auto amt = static_cast<std::int64_t>(co.tx.amount);
            if (co.tx.receiver == keys_.public_key) balance += amt;
            if (co.tx.sender == keys_.public_key) balance -= amt;
        }
    }
    return balance;
}

ClientOutbox Client::on_turn(const ClientView& v, Rng& rng, const Workload& w,
                             const std::vector<crypto::PublicKey>& peers) {
    ClientOutbox out;
    const auto& c = *v.contract;
    if (!online() || !joined_ || exited_ || exit_requested_ || session_requested_ || c.halted()) return out;
    if (!rng.chance(w.transfer_prob) || peers.empty()) return out;

    Coins avail = finalized_balance(v).value_or(0);
    for (Epoch e : {c.epoch(), c.epoch() + 1}) {
        for (const auto& adj : c.adjustments_for_block(e)) {
            if (adj.kind == chain::TxKind::Deposit && adj.receiver == keys_.public_key) avail += adj.amount;
        }
    }
    avail = avail > sent_this_epoch_ ? avail - sent_this_epoch_ : 0;
    const auto& receiver = peers[rng.below(peers.size())];
    const std::size_t slot = rng.below(v.n);

    if (spec_.behavior == ClientBehavior::DoubleSpender && peers.size() >= 2 && avail > 0) {
        // Spend the whole balance twice, through two different validators.
        const crypto::PublicKey* other = &receiver;
        while (*other == receiver) other = &peers[rng.below(peers.size())];
        out.sends.push_back({slot, validator::TransferFunds{chain::make_transfer(*scheme_, keys_, receiver, avail, c.epoch())}});
        out.sends.push_back({(slot + 1) % v.n,
                             validator::TransferFunds{chain::make_transfer(*scheme_, keys_, *other, avail, c.epoch())}});
        out.double_spends = 1;
        sent_this_epoch_ += avail;
        return out;
    }
    const Coins amount = rng.between(w.amount_min, w.amount_max);
    if (amount > avail) return out;
    out.sends.push_back({slot, validator::TransferFunds{chain::make_transfer(*scheme_, keys_, receiver, amount, c.epoch())}});
    sent_this_epoch_ += amount;
    return out;
}

ClientOutbox Client::on_message(const ClientView& v, const validator::Message& m) {
    (void)v;
    ClientOutbox out;
    const auto* r = std::get_if<validator::Receipt>(&m);
    if (!r) return out;
    const auto& tx = r->tx;
    if (!(tx.sender == keys_.public_key) && !(tx.receiver == keys_.public_key)) return out;
    const Digest h = tx.hash();
    if (!scheme_->verify(chain::receipt_message(r->epoch, h), r->signature, r->leader)) return out;
    receipts_[{r->epoch, r->leader}].emplace(h, contract::CoSignedTx{tx, r->signature});
    return out;
}

void Client::request_exit(const ClientView& v, ClientOutbox& out) {
    if (!joined_ || exited_ || exit_requested_) return;
    const auto& c = *v.contract;
    contract::ExitCall call{keys_.public_key, {}};
    if (!c.finalized().empty()) {
        const auto* block = v.board->find(c.prior_checkpoint());
        if (block && block->accounts.contains(keys_.public_key)) {
            call.pop = chain::make_pop(keys_.public_key, *block);
            proof_sizes_.push_back(call.pop.path.siblings.size());
        }
    }
    exit_requested_ = true;
    out.submits.push_back({call, 0});
}

void Client::open_interactive_exit(const ClientView& v, ClientOutbox& out) {
    const auto& c = *v.contract;
    if (session_requested_ || c.finalized().empty()) return;
    const auto* prev = v.board->find(c.prior_checkpoint());
    if (!prev || !prev->accounts.contains(keys_.public_key)) return;
    contract::ExitRequestCall call{keys_.public_key, chain::make_pop(keys_.public_key, *prev)};
    proof_sizes_.push_back(call.prev_pop.path.siblings.size());
    session_requested_ = true;
    out.submits.push_back({call, 0});
}

void Client::audit_pending(const ClientView& v, Rng& rng, const Workload& w, ClientOutbox& out) {
    const auto& c = *v.contract;
    if (!online() || !joined_ || exited_ || exit_requested_ || session_requested_ || !c.pending()) return;
    const auto& cp = c.pending()->cp;
    if (!chain::verify_checkpoint(*scheme_, cp, c.roster())) {
        if (v.mainchain >= v.wager) {
            out.submits.push_back(
                {contract::CheckpointChallenge{keys_.public_key, c.epoch(), c.prior_checkpoint(), cp, v.wager}, v.wager});
        }
        return;
    }
    const auto expected = expected_balance(v);
    if (!expected) return;
    const auto* block = v.board->find(cp.block_hash);
    std::optional<Coins> actual;
    if (block) {
        auto it = block->accounts.find(keys_.public_key);
        actual = it == block->accounts.end() ? 0 : it->second;
    }
    if (!actual || static_cast<std::int64_t>(*actual) != *expected) {
        open_interactive_exit(v, out);
        return;
    }

    // The pending term is the only time withdrawals and top-ups are handled.
    if (*actual > 0 && rng.chance(w.withdraw_prob)) {
        const Coins amount = rng.between(1, std::min(*actual, w.amount_max));
        contract::WithdrawCall call{keys_.public_key, amount, chain::make_pop(keys_.public_key, *block)};
        proof_sizes_.push_back(call.pop.path.siblings.size());
        out.submits.push_back({call, 0});
    } else if (rng.chance(w.deposit_prob)) {
        const Coins amount = rng.between(1, spec_.deposit);
        if (amount <= v.mainchain) {
            out.submits.push_back({contract::DepositCall{keys_.public_key, amount}, 0});
            out.deposit = amount;
        }
    }
}

ClientOutbox Client::on_notice(const ClientView& v, const contract::Notice& n, Rng& rng, const Workload& w) {
    ClientOutbox out;
    if (exited_) return out;
    const bool mine = n.party && *n.party == keys_.public_key;
    switch (n.kind) {
        case NoticeKind::DepositReceived:
            if (mine) joined_ = true;
            break;
        case NoticeKind::BlockReceived:
            audit_pending(v, rng, w, out);
            break;
        case NoticeKind::EpochChanged:
            sent_this_epoch_ = 0;
            break;
        case NoticeKind::Halted:
            request_exit(v, out);
            break;
        case NoticeKind::ExitOk:
            if (mine) exited_ = true;
            break;
        case NoticeKind::CannotExit:
            if (mine) exit_requested_ = false;
            break;
        case NoticeKind::CheckpointVoided:
            // Exits recorded against the voided checkpoint were cancelled.
            if (exit_requested_ && !v.contract->halted()) exit_requested_ = false;
            break;
        case NoticeKind::InteractiveExitRefused:
            if (mine) session_requested_ = false;
            break;
        case NoticeKind::InteractiveExitOpened:
            if (mine) {
                const auto& leader = v.contract->roster()[n.slot];
                contract::ExitResponseCall resp{keys_.public_key, keys_.public_key, std::nullopt, {}};
                if (auto it = receipts_.find({n.epoch, leader}); it != receipts_.end()) {
                    for (const auto& [h, co] : it->second) resp.txs.push_back(co);
                }
                out.submits.push_back({resp, 0});
            }
            break;
        default:
            break;
    }
    return out;
}

}  // namespace vulcan::simnet
