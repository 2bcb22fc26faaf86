// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/simnet/audit.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>

#include <json.hpp>

#include "vulcan/crypto/hash.hpp"
#include "vulcan/crypto/signature.hpp"

namespace vulcan::simnet {

void AuditLog::append(std::string line) {
    text_ += line;
    text_ += '\n';
    ++lines_;
}

namespace {

using nlohmann::json;

// ---- Canonical encodings, written out independently of the chain module ----

struct Buf {
    Bytes b;
    Buf& u8(std::uint8_t v) {
        b.push_back(v);
        return *this;
    }
    Buf& be(std::uint64_t v, int width) {
        for (int i = width - 1; i >= 0; --i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        return *this;
    }
    Buf& var(ByteView d) {
        be(d.size(), 4);
        b.insert(b.end(), d.begin(), d.end());
        return *this;
    }
    Buf& var(std::string_view s) { return var(as_view(s)); }
    Buf& raw(ByteView d) {
        b.insert(b.end(), d.begin(), d.end());
        return *this;
    }
};

Digest H(const Buf& buf) { return crypto::sha256(ByteView{buf.b}); }

struct Tx {
    std::uint8_t kind = 0;
    Bytes sender;
    Bytes receiver;
    Coins amount = 0;
    Epoch tag = 0;
    Bytes sig;

    [[nodiscard]] Bytes signing() const {
        Buf w;
        w.var("vulcan-tx").u8(kind).var(sender).var(receiver).be(amount, 8).be(tag, 8);
        return w.b;
    }
    [[nodiscard]] Digest hash() const {
        Buf w;
        w.raw(signing()).var(sig);
        return H(w);
    }
};

constexpr std::uint8_t kTransfer = 0;
constexpr std::uint8_t kDeposit = 1;
constexpr std::uint8_t kWithdraw = 2;
constexpr std::uint8_t kExit = 3;

struct Header {
    Epoch epoch = 0;
    Digest prev;
    Digest last_cp;
    Digest tx_root;
    Digest account_root;

    [[nodiscard]] Digest hash() const {
        Buf w;
        w.var("vulcan-header").be(epoch, 8).raw(prev.view()).raw(last_cp.view()).raw(tx_root.view()).raw(account_root.view());
        return H(w);
    }
};

Digest pair_hash(const Digest& l, const Digest& r) {
    Buf w;
    w.u8(0x01).raw(l.view()).raw(r.view());
    return H(w);
}

/// Binary tree over transfer hashes; odd levels repeat their last node and a lone leaf is
/// paired with itself.
Digest tx_root(std::vector<Digest> level) {
    if (level.empty()) return crypto::sha256(std::string_view{});
    bool bottom = true;
    while (bottom || level.size() > 1) {
        if (level.size() % 2 == 1) level.push_back(level.back());
        std::vector<Digest> up;
        for (std::size_t i = 0; i < level.size(); i += 2) up.push_back(pair_hash(level[i], level[i + 1]));
        level = std::move(up);
        bottom = false;
    }
    return level.front();
}

/// Bit d of a 256-bit key, most significant bit of byte 0 first.
bool bit(const Digest& k, std::size_t d) { return ((k.bytes[d / 8] >> (7 - d % 8)) & 1U) != 0; }

Digest trie_node(const std::vector<std::pair<Digest, Coins>>& s, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
        Buf w;
        w.u8(0x00).raw(s[lo].first.view()).be(s[lo].second, 8);
        return H(w);
    }
    // Sorted keys: the first differing bit of the extremes is where the set splits.
    std::size_t d = 0;
    while (bit(s[lo].first, d) == bit(s[hi - 1].first, d)) ++d;
    const auto mid = static_cast<std::size_t>(
        std::partition_point(s.begin() + static_cast<std::ptrdiff_t>(lo), s.begin() + static_cast<std::ptrdiff_t>(hi),
                             [&](const auto& kv) { return !bit(kv.first, d); }) -
        s.begin());
    Buf w;
    w.u8(0x01).be(d, 2).raw(trie_node(s, lo, mid).view()).raw(trie_node(s, mid, hi).view());
    return H(w);
}

Digest trie_root(const std::map<Bytes, Coins>& accounts) {
    if (accounts.empty()) return crypto::sha256(std::string_view{});
    std::vector<std::pair<Digest, Coins>> s;
    s.reserve(accounts.size());
    for (const auto& [k, v] : accounts) s.emplace_back(crypto::sha256(ByteView{k}), v);
    std::sort(s.begin(), s.end());
    return trie_node(s, 0, s.size());
}

/// Signer bits: validator j of n is bit n - 1 - j.
std::optional<std::vector<std::size_t>> signers(std::uint64_t value, std::size_t n) {
    if (n == 0 || n > 64) return std::nullopt;
    if (n < 64 && (value >> n) != 0) return std::nullopt;
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
        if ((value >> (n - 1 - j)) & 1U) out.push_back(j);
    }
    return out;
}

// ---- Log decoding ----

Digest digest_of(const json& j) { return Digest::from_hex(j.get<std::string>()); }
Bytes bytes_of(const json& j) { return from_hex(j.get<std::string>()); }

Tx tx_of(const json& j) {
    Tx t;
    t.kind = j.at("kind").get<std::uint8_t>();
    t.sender = bytes_of(j.at("sender"));
    t.receiver = bytes_of(j.at("receiver"));
    t.amount = j.at("amount").get<Coins>();
    t.tag = j.at("tag").get<Epoch>();
    t.sig = bytes_of(j.at("sig"));
    return t;
}

struct Record {
    std::size_t index = 0;
    Epoch epoch = 0;
    std::uint8_t kind = 0;
    Bytes account;
    Coins amount = 0;
    bool halted = false;
    bool cancelled = false;
};

std::uint8_t record_kind(const std::string& s) {
    if (s == "deposit") return kDeposit;
    if (s == "withdraw") return kWithdraw;
    if (s == "exit") return kExit;
    throw std::invalid_argument("unknown record kind " + s);
}

std::string short_hex(const Bytes& b) { return to_hex(ByteView{b}.first(std::min<std::size_t>(b.size(), 8))); }

class Auditor {
  public:
    AuditReport run(std::string_view log) {
        std::size_t pos = 0;
        while (pos < log.size()) {
            auto end = log.find('\n', pos);
            if (end == std::string_view::npos) end = log.size();
            const auto line = log.substr(pos, end - pos);
            pos = end + 1;
            if (line.empty()) continue;
            ++report_.lines;
            try {
                consume(json::parse(line));
            } catch (const std::exception& e) {
                diverge(next_epoch_, "malformed-log", "line " + std::to_string(report_.lines) + ": " + e.what());
            }
        }
        check_exits();
        for (const auto& d : report_.divergences) {
            if (!report_.first_divergent_epoch || d.epoch < *report_.first_divergent_epoch) {
                report_.first_divergent_epoch = d.epoch;
            }
        }
        return std::move(report_);
    }

  private:
    void diverge(Epoch e, std::string kind, std::string detail) {
        report_.divergences.push_back({e, std::move(kind), std::move(detail)});
    }

    void consume(const json& line) {
        const auto kind = line.at("kind").get<std::string>();
        const auto& data = line.at("data");
        if (kind == "run.start") {
            scheme_ = crypto::make_scheme(data.at("scheme").get<std::string>());
        } else if (kind == "contract.record") {
            Record r;
            r.index = data.at("index").get<std::size_t>();
            r.epoch = data.at("epoch").get<Epoch>();
            r.kind = record_kind(data.at("kind").get<std::string>());
            r.account = bytes_of(data.at("account"));
            r.amount = data.at("amount").get<Coins>();
            r.halted = data.at("halted").get<bool>();
            if (r.index != records_.size()) throw std::invalid_argument("record index out of sequence");
            records_.push_back(std::move(r));
            ++report_.records;
        } else if (kind == "contract.record_cancelled") {
            records_.at(data.at("index").get<std::size_t>()).cancelled = true;
        } else if (kind == "checkpoint.finalized") {
            checkpoint(data);
        }
    }

    void checkpoint(const json& data) {
        const Epoch k = data.at("epoch").get<Epoch>();
        ++report_.checkpoints;
        if (k != next_epoch_) {
            diverge(k, "linkage", "expected checkpoint for epoch " + std::to_string(next_epoch_));
        }
        next_epoch_ = k + 1;
        if (!scheme_) throw std::invalid_argument("checkpoint before run.start");

        const auto& cp = data.at("cp");
        const Digest named = digest_of(cp.at("block_hash"));
        std::vector<Bytes> roster;
        for (const auto& pk : data.at("roster")) roster.push_back(bytes_of(pk));

        // Certificate: more than half of the roster signed the raw block hash.
        const auto n = cp.at("n").get<std::size_t>();
        const auto who = signers(cp.at("signers").get<std::uint64_t>(), n);
        bool qc_ok = who && n == roster.size() && who->size() >= n / 2 + 1;
        if (qc_ok) {
            std::vector<crypto::PublicKey> keys;
            for (auto j : *who) keys.push_back({roster[j]});
            qc_ok = scheme_->verify_same(named.view(), keys, {bytes_of(cp.at("qc"))});
        }
        if (!qc_ok) diverge(k, "invalid-checkpoint", "certificate does not verify against the roster");

        // Records settled under k - 1 open block k.
        std::vector<const Record*> adjustments;
        if (k > 0) {
            for (const auto& r : records_) {
                if (r.epoch == k - 1 && !r.cancelled) adjustments.push_back(&r);
            }
        }

        const auto& jb = data.at("block");
        if (jb.is_null()) {
            diverge(k, "block-unavailable", "no party holds the finalized block");
            // Keep replaying as if the records alone had been applied.
            std::map<Bytes, Coins> next = state_;
            for (const auto* r : adjustments) apply_record(next, *r, k);
            advance(k, named, Digest{}, std::move(next), {}, adjustments);
            return;
        }

        Header h;
        const auto& jh = jb.at("header");
        h.epoch = jh.at("epoch").get<Epoch>();
        h.prev = digest_of(jh.at("prev"));
        h.last_cp = digest_of(jh.at("last_cp"));
        h.tx_root = digest_of(jh.at("tx_root"));
        h.account_root = digest_of(jh.at("account_root"));
        const Digest hh = h.hash();
        if (hh != named) diverge(k, "invalid-checkpoint", "checkpoint names a different header");
        if (h.epoch != k) diverge(k, "linkage", "header epoch " + std::to_string(h.epoch));
        if (h.prev != prev_header_ || h.last_cp != prev_named_) {
            diverge(k, "linkage", "header does not extend the previous finalized block");
        }

        std::vector<Tx> txs;
        for (const auto& jt : jb.at("txs")) txs.push_back(tx_of(jt));
        std::map<Bytes, Coins> logged;
        for (const auto& row : jb.at("accounts")) logged[bytes_of(row.at(0))] = row.at(1).get<Coins>();

        std::vector<Digest> leaves;
        for (const auto& t : txs) leaves.push_back(t.hash());
        if (tx_root(leaves) != h.tx_root) diverge(k, "root-mismatch", "transaction root");
        if (trie_root(logged) != h.account_root) diverge(k, "root-mismatch", "account root");

        // Flat replay: records first, then transfers.
        std::map<Bytes, Coins> next = state_;
        if (txs.size() < adjustments.size()) {
            diverge(k, "invalid-record", "block omits contract records");
        }
        for (std::size_t i = 0; i < adjustments.size(); ++i) {
            const auto& r = *adjustments[i];
            if (i < txs.size()) {
                const auto& t = txs[i];
                const bool deposit = r.kind == kDeposit;
                const bool same = t.kind == r.kind && t.amount == r.amount && t.tag == k - 1 && t.sig.empty() &&
                                  (deposit ? t.receiver == r.account && t.sender.empty()
                                           : t.sender == r.account && t.receiver.empty());
                if (!same) diverge(k, "invalid-record", "block record " + std::to_string(i) + " differs from the contract's");
            }
            apply_record(next, r, k);
        }
        std::set<Digest> seen = prev_transfers_;
        std::set<Digest> mine;
        for (std::size_t i = adjustments.size(); i < txs.size(); ++i) {
            const auto& t = txs[i];
            const Digest th = t.hash();
            std::string why;
            if (t.kind != kTransfer) {
                why = "record outside the record prefix";
            } else if (t.amount == 0 || t.sender == t.receiver) {
                why = "degenerate transfer";
            } else if (!(t.tag == k || (k > 0 && t.tag == k - 1))) {
                why = "epoch tag " + std::to_string(t.tag);
            } else if (!scheme_->verify(ByteView{t.signing()}, {t.sig}, {t.sender})) {
                why = "bad signature";
            } else if (!seen.insert(th).second) {
                why = "replayed transfer";
            } else if (next[t.sender] < t.amount) {
                why = "overdraft by " + short_hex(t.sender);
            }
            if (!why.empty()) {
                diverge(k, "invalid-transfer", why);
                continue;
            }
            next[t.sender] -= t.amount;
            next[t.receiver] += t.amount;
            mine.insert(th);
        }
        // Zero-balance entries exist only for accounts the block touched.
        for (auto it = next.begin(); it != next.end();) {
            if (it->second == 0 && !logged.contains(it->first)) {
                it = next.erase(it);
            } else {
                ++it;
            }
        }
        if (next != logged) {
            std::string who_differs;
            for (const auto& [acct, v] : next) {
                auto it = logged.find(acct);
                if (it == logged.end() || it->second != v) {
                    who_differs = short_hex(acct);
                    break;
                }
            }
            if (who_differs.empty()) {
                for (const auto& [acct, v] : logged) {
                    if (!next.contains(acct)) {
                        who_differs = short_hex(acct);
                        break;
                    }
                }
            }
            diverge(k, "balance-mismatch", "replayed balance of " + who_differs + " differs from the block");
        }
        advance(k, named, hh, std::move(next), std::move(mine), adjustments);
    }

    void apply_record(std::map<Bytes, Coins>& s, const Record& r, Epoch k) {
        switch (r.kind) {
            case kDeposit:
                s[r.account] += r.amount;
                pegged_ += static_cast<std::int64_t>(r.amount);
                break;
            case kWithdraw: {
                auto& b = s[r.account];
                if (b < r.amount) {
                    diverge(k, "invalid-record", "withdrawal exceeds balance of " + short_hex(r.account));
                    b = 0;
                } else {
                    b -= r.amount;
                }
                pegged_ -= static_cast<std::int64_t>(r.amount);
                break;
            }
            case kExit: {
                const Coins have = s.contains(r.account) ? s.at(r.account) : 0;
                if (have != r.amount) diverge(k, "invalid-record", "exit does not empty " + short_hex(r.account));
                s.erase(r.account);
                pegged_ -= static_cast<std::int64_t>(r.amount);
                break;
            }
            default:
                break;
        }
    }

    void advance(Epoch k, const Digest& named, const Digest& header, std::map<Bytes, Coins> next,
                 std::set<Digest> transfers, const std::vector<const Record*>& applied) {
        (void)applied;
        state_ = std::move(next);
        std::int64_t total = 0;
        for (const auto& [acct, v] : state_) total += static_cast<std::int64_t>(v);
        const std::int64_t residual = total - pegged_;
        report_.residual_per_epoch.push_back(residual);
        report_.max_abs_residual = std::max(report_.max_abs_residual, residual < 0 ? -residual : residual);
        if (residual != 0) diverge(k, "conservation", "residual " + std::to_string(residual));
        snapshots_.push_back(state_);
        prev_header_ = header.is_zero() ? named : header;
        prev_named_ = named;
        prev_transfers_ = std::move(transfers);
    }

    /// Each settled exit must pay the replayed balance after block min(e, L) plus the
    /// account's later records.
    void check_exits() {
        if (snapshots_.empty() && records_.empty()) return;
        const bool any_block = !snapshots_.empty();
        const Epoch last = any_block ? snapshots_.size() - 1 : 0;
        for (const auto& r : records_) {
            if (r.kind != kExit || r.cancelled) continue;
            Epoch base_epoch = r.epoch;
            if (!any_block || r.epoch > last) {
                if (!r.halted) continue;  // Its checkpoint never settled.
                base_epoch = last;
            }
            std::int64_t expect = 0;
            if (any_block) {
                const auto& snap = snapshots_[base_epoch];
                if (auto it = snap.find(r.account); it != snap.end()) expect = static_cast<std::int64_t>(it->second);
            }
            for (const auto& o : records_) {
                if (o.index >= r.index || o.cancelled || o.account != r.account) continue;
                if (any_block ? o.epoch < base_epoch : false) continue;
                if (o.kind == kDeposit) expect += static_cast<std::int64_t>(o.amount);
                if (o.kind == kWithdraw) expect -= static_cast<std::int64_t>(o.amount);
            }
            ++report_.exits_checked;
            if (expect != static_cast<std::int64_t>(r.amount)) {
                diverge(r.epoch, "exit-balance-mismatch",
                        short_hex(r.account) + " received " + std::to_string(r.amount) + ", replay says " +
                            std::to_string(expect));
            }
        }
    }

    AuditReport report_;
    std::unique_ptr<crypto::SignatureScheme> scheme_;
    std::vector<Record> records_;
    std::map<Bytes, Coins> state_;
    std::vector<std::map<Bytes, Coins>> snapshots_;
    std::int64_t pegged_ = 0;
    Epoch next_epoch_ = 0;
    Digest prev_header_;
    Digest prev_named_;
    std::set<Digest> prev_transfers_;
};

}  // namespace

AuditReport independent_audit(std::string_view log) { return Auditor{}.run(log); }

}  // namespace vulcan::simnet
