// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/ledger/ledger.hpp"

#include <algorithm>

#include "vulcan/common/error.hpp"

namespace vulcan::ledger {

AccountName account_for(ByteView public_key) { return "acct:" + to_hex(public_key); }

void Ledger::endow(const AccountName& account, Coins amount) {
    if (started_) throw Error("endowments are only allowed at genesis");
    set_balance(account, balance(account) + amount);
    supply_ += amount;
}

std::uint64_t Ledger::submit(MainchainTx tx, Tick now) {
    if (now < now_) throw Error("ledger submit in the past");
    started_ = true;
    now_ = now;
    tx.id = next_id_++;
    tx.submit_time = now;
    tx.finalize_time = now + delay_;
    queue_.push_back(std::move(tx));
    return queue_.back().id;
}

std::vector<Finalized> Ledger::advance_to(Tick t) {
    if (t < now_) throw Error("ledger clock cannot move backwards");
    started_ = true;
    now_ = t;
    std::vector<Finalized> out;
    while (!queue_.empty() && queue_.front().finalize_time <= t) {
        Finalized f{std::move(queue_.front()), false, {}};
        queue_.pop_front();

        std::map<AccountName, Coins> scratch;
        auto get = [&](const AccountName& a) -> Coins& {
            auto it = scratch.find(a);
            if (it == scratch.end()) it = scratch.emplace(a, balance(a)).first;
            return it->second;
        };
        for (const auto& m : f.tx.moves) {
            Coins& from = get(m.from);
            if (from < m.amount) {
                f.void_reason = "insufficient funds in " + m.from;
                break;
            }
            from -= m.amount;
            get(m.to) += m.amount;
        }
        if (f.void_reason.empty()) {
            // Apply in name order so history entries are deterministic.
            for (const auto& [a, v] : scratch) {
                if (v != balance(a)) set_balance(a, v);
            }
            f.applied = true;
        }
        out.push_back(std::move(f));
    }
    return out;
}

void Ledger::set_balance(const AccountName& account, Coins value) {
    current_[account] = value;
    auto& h = history_[account];
    if (!h.empty() && h.back().first == now_) {
        h.back().second = value;
    } else {
        h.emplace_back(now_, value);
    }
}

Coins Ledger::read(const AccountName& account, Tick t) const {
    if (t > now_) throw Error("cannot read the ledger in the future");
    auto it = history_.find(account);
    if (it == history_.end()) return 0;
    const auto& h = it->second;
    auto pos = std::upper_bound(h.begin(), h.end(), t,
                                [](Tick x, const std::pair<Tick, Coins>& e) { return x < e.first; });
    if (pos == h.begin()) return 0;
    return std::prev(pos)->second;
}

Coins Ledger::balance(const AccountName& account) const {
    auto it = current_.find(account);
    return it == current_.end() ? 0 : it->second;
}

std::optional<Tick> Ledger::next_finalization() const {
    if (queue_.empty()) return std::nullopt;
    return queue_.front().finalize_time;
}

Coins Ledger::sum_of_balances() const {
    Coins s = 0;
    for (const auto& [a, v] : current_) s += v;
    return s;
}

}  // namespace vulcan::ledger
