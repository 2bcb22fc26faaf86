// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/simnet/simulation.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>
#include <tuple>
#include <variant>

#include <json.hpp>

#include "vulcan/chain/checkpoint.hpp"
#include "vulcan/common/error.hpp"
#include "vulcan/crypto/hash.hpp"
#include "vulcan/ledger/ledger.hpp"
#include "vulcan/simnet/client.hpp"

namespace vulcan::simnet {

namespace {

using json = nlohmann::ordered_json;
using validator::Message;
using validator::Origin;

struct ToInstance {
    std::size_t instance = 0;
};
struct ToClientIndex {
    std::size_t index = 0;
};
using Target = std::variant<ToInstance, ToClientIndex>;

struct Deliver {
    Target to;
    Origin from;
    std::string from_name;
    Message msg;
};
struct Fire {
    std::size_t instance = 0;
    validator::Timer timer;
};
struct Turn {};
struct NoticeEvent {
    contract::Notice notice;
    /// For LeaderReplaced: the key the contract installed.
    std::optional<crypto::PublicKey> replacement;
};
using Payload = std::variant<Deliver, Fire, Turn, NoticeEvent>;

/// Same-time ordering: messages and turns, then contract notices, then timers. A message
/// that arrives exactly at a deadline is on time.
constexpr int kPrioNetwork = 1;
constexpr int kPrioNotice = 2;
constexpr int kPrioTimer = 3;

using EventKey = std::tuple<Tick, int, std::uint64_t>;

json block_json(const chain::Block& b) {
    json txs = json::array();
    for (const auto& tx : b.txs) {
        txs.push_back({{"kind", static_cast<int>(tx.kind)},
                       {"sender", tx.sender.hex()},
                       {"receiver", tx.receiver.hex()},
                       {"amount", tx.amount},
                       {"tag", tx.epoch_tag},
                       {"sig", to_hex(tx.signature.bytes)}});
    }
    json accounts = json::array();
    for (const auto& [id, v] : b.accounts) accounts.push_back(json::array({id.hex(), v}));
    return {{"header",
             {{"epoch", b.header.epoch},
              {"prev", b.header.prev_block_hash.hex()},
              {"last_cp", b.header.last_checkpoint.hex()},
              {"tx_root", b.header.tx_root.hex()},
              {"account_root", b.header.account_root.hex()}}},
            {"txs", std::move(txs)},
            {"accounts", std::move(accounts)}};
}

json notice_json(const contract::Notice& n) {
    json j = {{"kind", contract::to_string(n.kind)}, {"epoch", n.epoch}};
    if (n.party) j["party"] = n.party->hex();
    j["amount"] = n.amount;
    j["slot"] = n.slot;
    j["flag"] = n.flag;
    j["detail"] = n.detail;
    return j;
}

Digest digest_of(const json& j) { return crypto::sha256(j.dump()); }

class Simulation {
  public:
    explicit Simulation(const ScenarioConfig& cfg)
        : cfg_(cfg),
          proto_(cfg.protocol()),
          scheme_(crypto::make_scheme(cfg.scheme)),
          ledger_(cfg.delta),
          rng_(cfg.seed) {}

    RunResult run() {
        RunResult result;
        result.config = cfg_;
        genesis();
        loop(result);
        finish(result);
        return result;
    }

  private:
    struct Instance {
        std::unique_ptr<validator::Validator> v;
        std::string name;
    };

    // ---- Setup ----

    void genesis() {
        const std::size_t n = cfg_.n;
        std::vector<crypto::PublicKey> roster;
        std::vector<crypto::KeyPair> vkeys;
        for (std::size_t i = 0; i < n; ++i) {
            vkeys.push_back(scheme_->keygen(crypto::derive_seed("validator", i)));
            roster.push_back(vkeys.back().public_key);
        }
        const std::size_t pool = n + cfg_.f + 4;
        for (std::size_t k = 0; k < pool; ++k) replacement_key(k);
        for (std::size_t i = 0; i < cfg_.clients.size(); ++i) {
            auto keys = scheme_->keygen(crypto::derive_seed("client", i));
            client_index_.emplace(keys.public_key, i);
            clients_.emplace_back(cfg_.clients[i], *scheme_, std::move(keys));
        }

        contract::ContractConfig cc{n, cfg_.f, cfg_.delta, cfg_.wager, cfg_.epochs_target - 1};
        contract_ = std::make_unique<contract::Contract>(cc, *scheme_, roster, [this](std::size_t) {
            return replacement_key(next_replacement_++).public_key;
        });

        for (const auto& k : vkeys) ledger_.endow(ledger::account_for(k.public_key.bytes), cfg_.validator_endowment);
        for (std::size_t k = 0; k < pool; ++k) {
            ledger_.endow(ledger::account_for(pool_[k].public_key.bytes), cfg_.validator_endowment);
        }
        for (const auto& c : clients_) ledger_.endow(ledger::account_for(c.public_key().bytes), c.spec().endowment);

        json clients = json::array();
        for (const auto& c : clients_) {
            clients.push_back({{"id", c.id()}, {"pk", c.public_key().hex()}, {"behavior", to_string(c.spec().behavior)}});
        }
        json rj = json::array();
        for (const auto& pk : roster) rj.push_back(pk.hex());
        json start = {{"scheme", scheme_->name()},
                      {"hash", crypto::kHashName},
                      {"config", json::parse(to_json(cfg_))},
                      {"roster", std::move(rj)},
                      {"clients", std::move(clients)},
                      {"supply", ledger_.supply()}};
        log("env", "run.start", std::move(start));

        std::set<std::size_t> coalition;
        for (const auto& b : cfg_.byzantine) {
            if (b.strategy != validator::Strategy::Honest) coalition.insert(b.validator);
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<validator::StrategyWindow> windows;
            for (const auto& b : cfg_.byzantine) {
                if (b.validator != i) continue;
                validator::StrategyWindow w{b.strategy, b.from_epoch, b.until_epoch, std::nullopt};
                if (b.target_client) w.target = clients_[client_of(*b.target_client)].public_key();
                windows.push_back(w);
            }
            auto v = std::make_unique<validator::Validator>(proto_, *scheme_, i, vkeys[i], windows, coalition);
            slot_instance_.push_back(instances_.size());
            instances_.push_back({std::move(v), "v" + std::to_string(i)});
        }
        replacements_per_slot_.assign(n, 0);

        for (std::size_t i = 0; i < clients_.size(); ++i) dispatch_client(i, clients_[i].genesis());
        for (std::size_t i = 0; i < instances_.size(); ++i) dispatch(i, instances_[i].v->start(world()));
        schedule(cfg_.workload.turn_interval, kPrioNetwork, Turn{});
    }

    const crypto::KeyPair& replacement_key(std::size_t k) {
        while (pool_.size() <= k) {
            pool_.push_back(scheme_->keygen(crypto::derive_seed("replacement", pool_.size())));
            pool_by_pk_.emplace(pool_.back().public_key, pool_.size() - 1);
        }
        return pool_[k];
    }

    std::size_t client_of(const std::string& id) const {
        for (std::size_t i = 0; i < cfg_.clients.size(); ++i) {
            if (cfg_.clients[i].id == id) return i;
        }
        throw ConfigError("unknown client " + id);
    }

    [[nodiscard]] validator::World world() const { return {contract_.get(), &board_, now_}; }

    [[nodiscard]] ClientView view_for(std::size_t i) const {
        return {contract_.get(), &board_, now_,
                ledger_.balance(ledger::account_for(clients_[i].public_key().bytes)), cfg_.wager, cfg_.n};
    }

    // ---- Audit log ----

    void log(std::string_view entity, std::string_view kind, json data, std::optional<Digest> digest = std::nullopt) {
        const Digest d = digest ? *digest : digest_of(data);
        json line;
        line["t"] = now_;
        line["entity"] = entity;
        line["kind"] = kind;
        line["digest"] = d.hex();
        line["data"] = std::move(data);
        log_.append(line.dump());
    }

    // ---- Scheduling ----

    void schedule(Tick at, int prio, Payload p) { queue_.emplace(EventKey{at, prio, seq_++}, std::move(p)); }

    void send_to_instance(std::size_t inst, const Origin& from, const std::string& from_name, Message m) {
        schedule(now_ + cfg_.tau, kPrioNetwork, Deliver{ToInstance{inst}, from, from_name, std::move(m)});
    }

    void dispatch(std::size_t i, validator::Outbox out) {
        auto& inst = instances_[i];
        const std::size_t slot = inst.v->slot();
        const Origin from = validator::FromValidator{slot};
        for (auto& s : out.sends) {
            if (const auto* to = std::get_if<validator::ToValidator>(&s.to)) {
                if (to->slot < slot_instance_.size()) send_to_instance(slot_instance_[to->slot], from, inst.name, s.msg);
            } else if (std::holds_alternative<validator::ToAllValidators>(s.to)) {
                for (std::size_t j = 0; j < slot_instance_.size(); ++j) {
                    if (slot_instance_[j] != i) send_to_instance(slot_instance_[j], from, inst.name, s.msg);
                }
            } else {
                const auto& pk = std::get<validator::ToClient>(s.to).client;
                if (auto it = client_index_.find(pk); it != client_index_.end()) {
                    schedule(now_ + cfg_.tau, kPrioNetwork, Deliver{ToClientIndex{it->second}, from, inst.name, s.msg});
                }
            }
        }
        for (auto& sub : out.submits) {
            submit(ledger::account_for(inst.v->public_key().bytes), inst.name, sub.call, sub.wager, 0);
        }
        for (const auto& t : out.timers) schedule(t.at, kPrioTimer, Fire{i, t});
        for (const auto& b : out.publish) board_.publish(b);
        for (const auto& tr : out.traces) on_trace(inst.name, tr);
    }

    void dispatch_client(std::size_t i, ClientOutbox out) {
        const auto& c = clients_[i];
        const Origin from = validator::FromClient{c.public_key()};
        for (auto& [slot, m] : out.sends) {
            if (slot < slot_instance_.size()) send_to_instance(slot_instance_[slot], from, c.id(), std::move(m));
        }
        for (auto& sub : out.submits) {
            const Coins dep = std::holds_alternative<contract::DepositCall>(sub.call) ? out.deposit : 0;
            submit(ledger::account_for(c.public_key().bytes), c.id(), sub.call, sub.wager, dep);
        }
        metrics_.double_spend_attempts += out.double_spends;
    }

    void submit(const ledger::AccountName& account, const std::string& entity, const contract::Call& call, Coins wager,
                Coins deposit) {
        ledger::MainchainTx tx;
        tx.kind = contract::call_kind(call);
        tx.submitter = account;
        if (wager > 0) tx.moves.push_back({account, ledger::kEscrow, wager});
        if (deposit > 0) tx.moves.push_back({account, ledger::kFrozen, deposit});
        tx.payload_digest = contract::call_digest(call);
        json moves = json::array();
        for (const auto& m : tx.moves) moves.push_back({{"from", m.from}, {"to", m.to}, {"amount", m.amount}});
        const Digest d = tx.payload_digest;
        const std::string kind = tx.kind;
        const auto id = ledger_.submit(std::move(tx), now_);
        calls_.emplace(id, call);
        if (std::holds_alternative<contract::CheckpointChallenge>(call) ||
            std::holds_alternative<contract::LeaderChallenge>(call)) {
            ++metrics_.challenges_raised;
        }
        log(entity, "ledger.submit", {{"id", id}, {"call", kind}, {"moves", std::move(moves)}}, d);
    }

    void release(const contract::Release& r) {
        ledger::MainchainTx tx;
        tx.kind = "release";
        tx.submitter = "contract";
        const auto from = r.from == contract::Pot::Frozen ? ledger::kFrozen : ledger::kEscrow;
        const auto to = r.to ? ledger::account_for(r.to->bytes) : ledger::kTreasury;
        tx.moves.push_back({from, to, r.amount});
        json data = {{"from", from}, {"to", to}, {"amount", r.amount}, {"reason", r.reason}};
        tx.payload_digest = digest_of(data);
        const auto id = ledger_.submit(std::move(tx), now_);
        data["id"] = id;
        log("contract", "ledger.submit", std::move(data));
    }

    // ---- Contract output handling ----

    void sync_records() {
        const auto& recs = contract_->records();
        for (std::size_t i = cancelled_.size(); i < recs.size(); ++i) {
            const auto& r = recs[i];
            json data = {{"index", i},
                         {"epoch", r.epoch},
                         {"kind", chain::to_string(r.change.kind)},
                         {"account", chain::adjustment_account(r.change).hex()},
                         {"amount", r.change.amount},
                         {"halted", contract_->halted()}};
            log("contract", "contract.record", std::move(data), r.change.hash());
            cancelled_.push_back(false);
        }
        for (std::size_t i = 0; i < recs.size(); ++i) {
            if (recs[i].cancelled && !cancelled_[i]) {
                cancelled_[i] = true;
                log("contract", "contract.record_cancelled", {{"index", i}});
            }
        }
    }

    const chain::Block* find_block(const Digest& h) const {
        if (const auto* b = board_.find(h)) return b;
        for (const auto& inst : instances_) {
            if (const auto* b = inst.v->find_block(h)) return b;
        }
        return nullptr;
    }

    EpochMetrics& epoch_metrics(Epoch e) {
        auto [it, fresh] = epochs_.try_emplace(e);
        if (fresh) it->second.epoch = e;
        return it->second;
    }

    void on_checkpoint_finalized(Epoch e) {
        const auto& cp = contract_->finalized().back();
        json roster = json::array();
        for (const auto& pk : contract_->roster_at(e)) roster.push_back(pk.hex());
        const auto* block = find_block(cp.block_hash);
        json data = {{"epoch", e},
                     {"cp",
                      {{"block_hash", cp.block_hash.hex()},
                       {"qc", to_hex(cp.qc.bytes)},
                       {"n", cp.index.n},
                       {"signers", cp.index.value}}},
                     {"roster", std::move(roster)},
                     {"block", block ? block_json(*block) : json(nullptr)}};
        log("contract", "checkpoint.finalized", std::move(data), cp.hash());

        auto& m = epoch_metrics(e);
        m.finalized = true;
        m.finalized_at = now_;
        m.units = now_ - last_finalized_at_;
        last_finalized_at_ = now_;
        if (block) {
            m.transfers = static_cast<std::size_t>(
                std::count_if(block->txs.begin(), block->txs.end(), [](const auto& tx) { return !tx.is_adjustment(); }));
        }
        ++metrics_.checkpoints_finalized;
    }

    void handle(contract::Outputs out) {
        sync_records();
        using contract::NoticeKind;
        for (auto& n : out.notices) {
            log("contract", "contract.notice", notice_json(n));
            switch (n.kind) {
                case NoticeKind::EpochChanged: on_checkpoint_finalized(n.epoch); break;
                case NoticeKind::ChallengeValid: ++metrics_.challenges_valid; break;
                case NoticeKind::ChallengeInvalid: ++metrics_.challenges_invalid; break;
                case NoticeKind::ChallengeStale: ++metrics_.challenges_stale; break;
                case NoticeKind::LeaderReplaced:
                    ++metrics_.leaders_removed;
                    ++epoch_metrics(n.epoch).replacements;
                    break;
                case NoticeKind::WithdrawOk: ++metrics_.withdrawals_served; break;
                case NoticeKind::ExitOk: ++metrics_.exits; break;
                case NoticeKind::InteractiveExitOpened: ++metrics_.interactive_exits_opened; break;
                case NoticeKind::InteractiveExitResolved: ++metrics_.interactive_exits_resolved; break;
                default: break;
            }
            NoticeEvent ev{n, std::nullopt};
            if (n.kind == NoticeKind::LeaderReplaced) ev.replacement = contract_->roster()[n.slot];
            schedule(now_, kPrioNotice, std::move(ev));
        }
        for (const auto& r : out.releases) release(r);
    }

    /// Mainchain finalizations due now, then the contract's clock.
    void settle() {
        for (auto& f : ledger_.advance_to(now_)) {
            log("ledger", "ledger.finalize",
                {{"id", f.tx.id}, {"call", f.tx.kind}, {"applied", f.applied}, {"reason", f.void_reason}},
                f.tx.payload_digest);
            auto it = calls_.find(f.tx.id);
            if (it == calls_.end()) continue;
            const contract::Call call = std::move(it->second);
            calls_.erase(it);
            if (f.applied) {
                handle(contract_->apply(call, f.tx.submit_time, now_));
            } else if (const auto* d = std::get_if<contract::DepositCall>(&call)) {
                contract::Notice n;
                n.kind = contract::NoticeKind::CannotDeposit;
                n.epoch = contract_->epoch();
                n.party = d->client;
                n.amount = d->amount;
                n.detail = "mainchain transfer voided: " + f.void_reason;
                handle(contract::Outputs{{n}, {}});
            }
        }
        bool dispute = false;
        if (const auto& p = contract_->pending()) {
            for (const auto& tx : ledger_.in_flight()) {
                if ((tx.kind == "challenge-cp" || tx.kind == "interactive-exit") && tx.submit_time <= p->deadline) {
                    dispute = true;
                }
            }
        }
        handle(contract_->on_tick(now_, dispute));
    }

    // ---- Event processing ----

    void deliver_notice(const NoticeEvent& ev) {
        const auto& n = ev.notice;
        const std::size_t n_slots = slot_instance_.size();
        std::optional<std::size_t> retired;
        if (n.kind == contract::NoticeKind::LeaderReplaced && ev.replacement) {
            retired = slot_instance_[n.slot];
            instances_[*retired].v->retire();
            log(instances_[*retired].name, "validator.retired", {{"slot", n.slot}, {"epoch", n.epoch}});
        }
        const std::size_t lead = contract_->leader_slot();
        for (std::size_t k = 0; k < n_slots; ++k) {
            const std::size_t inst = slot_instance_[(lead + k) % n_slots];
            if (retired && inst == *retired) continue;
            dispatch(inst, instances_[inst].v->on_notice(world(), n));
        }
        if (retired) spawn_replacement(n.slot, *ev.replacement);
        for (std::size_t i = 0; i < clients_.size(); ++i) {
            dispatch_client(i, clients_[i].on_notice(view_for(i), n, rng_, cfg_.workload));
        }
    }

    void spawn_replacement(std::size_t slot, const crypto::PublicKey& pk) {
        const auto& keys = pool_[pool_by_pk_.at(pk)];
        std::uint32_t hint = 1;
        for (std::size_t j = 0; j < slot_instance_.size(); ++j) {
            const auto& v = *instances_[slot_instance_[j]].v;
            if (j != slot && !v.retired() && !v.byzantine_at(v.epoch())) {
                hint = v.round();
                break;
            }
        }
        auto v = std::make_unique<validator::Validator>(proto_, *scheme_, slot, keys);
        const std::string name = "v" + std::to_string(slot) + "." + std::to_string(++replacements_per_slot_[slot]);
        const std::size_t idx = instances_.size();
        instances_.push_back({std::move(v), name});
        slot_instance_[slot] = idx;
        log(name, "validator.joined", {{"slot", slot}, {"pk", pk.hex()}, {"round", hint}});
        dispatch(idx, instances_[idx].v->start(world(), hint));
    }

    void on_trace(const std::string& who, const validator::Trace& tr) {
        log(who, "trace." + tr.kind, {{"epoch", tr.epoch}, {"round", tr.round}});
        auto& m = epoch_metrics(tr.epoch);
        if (tr.kind == "collect") {
            if (m.collect_at == 0 || tr.at < m.collect_at) m.collect_at = tr.at;
        } else if (tr.kind == "propose") {
            m.propose_at = tr.at;
        } else if (tr.kind == "commit") {
            m.commit_at = tr.at;
        } else if (tr.kind == "restart") {
            ++m.restarts;
        }
    }

    void process(Payload& p) {
        if (auto* d = std::get_if<Deliver>(&p)) {
            ++metrics_.messages;
            const auto kind = validator::message_kind(d->msg);
            const Digest digest = validator::message_digest(d->msg);
            if (const auto* ti = std::get_if<ToInstance>(&d->to)) {
                log(instances_[ti->instance].name, "msg", {{"type", kind}, {"from", d->from_name}}, digest);
                dispatch(ti->instance, instances_[ti->instance].v->on_message(world(), d->from, d->msg));
            } else {
                const auto idx = std::get<ToClientIndex>(d->to).index;
                log(clients_[idx].id(), "msg", {{"type", kind}, {"from", d->from_name}}, digest);
                dispatch_client(idx, clients_[idx].on_message(view_for(idx), d->msg));
            }
        } else if (auto* f = std::get_if<Fire>(&p)) {
            dispatch(f->instance, instances_[f->instance].v->on_timer(world(), f->timer));
        } else if (std::holds_alternative<Turn>(p)) {
            for (std::size_t i = 0; i < clients_.size(); ++i) {
                std::vector<crypto::PublicKey> peers;
                for (std::size_t j = 0; j < clients_.size(); ++j) {
                    if (j != i && clients_[j].joined() && !clients_[j].exited()) peers.push_back(clients_[j].public_key());
                }
                dispatch_client(i, clients_[i].on_turn(view_for(i), rng_, cfg_.workload, peers));
            }
            if (!contract_->halted()) schedule(now_ + cfg_.workload.turn_interval, kPrioNetwork, Turn{});
        } else {
            deliver_notice(std::get<NoticeEvent>(p));
        }
    }

    [[nodiscard]] std::optional<Tick> next_time() const {
        std::optional<Tick> t;
        auto consider = [&](Tick x) {
            if (!t || x < *t) t = x;
        };
        if (!queue_.empty()) consider(std::get<0>(queue_.begin()->first));
        if (auto f = ledger_.next_finalization()) consider(*f);
        if (const auto& p = contract_->pending(); p && !contract_->halted() && p->deadline > now_) consider(p->deadline);
        for (const auto& [client, s] : contract_->sessions()) {
            if (s.resolve_at > now_) consider(s.resolve_at);
        }
        return t;
    }

    void loop(RunResult& result) {
        const Tick budget = cfg_.time_budget();
        while (true) {
            const auto t = next_time();
            if (!t) break;
            if (*t > budget) {
                result.timed_out = !contract_->halted();
                break;
            }
            now_ = *t;
            settle();
            while (!queue_.empty() && std::get<0>(queue_.begin()->first) == now_) {
                auto node = queue_.extract(queue_.begin());
                process(node.mapped());
            }
        }
    }

    // ---- Wrap-up ----

    void finish(RunResult& r) {
        auto& m = metrics_;
        m.end_time = now_;
        m.halted = contract_->halted();
        m.mass_exit = contract_->mass_exit();
        m.execution_end = contract_->execution_end();
        std::size_t sum = 0;
        for (const auto& c : clients_) {
            for (auto s : c.proof_sizes()) {
                sum += s;
                ++m.pop_samples;
                m.pop_siblings_max = std::max(m.pop_siblings_max, s);
            }
        }
        m.pop_siblings_mean = m.pop_samples ? static_cast<double>(sum) / static_cast<double>(m.pop_samples) : 0.0;
        for (auto& [e, em] : epochs_) {
            em.rounds = 1 + em.restarts + em.replacements;
            m.epochs.push_back(em);
        }

        json end = {{"epoch", contract_->epoch()},
                    {"finalized", contract_->finalized().size()},
                    {"halted", m.halted},
                    {"mass_exit", m.mass_exit},
                    {"frozen", ledger_.balance(ledger::kFrozen)},
                    {"escrow", ledger_.balance(ledger::kEscrow)},
                    {"treasury", ledger_.balance(ledger::kTreasury)}};
        log("env", "run.end", std::move(end));

        r.audit_log = log_.text();
        r.audit = independent_audit(r.audit_log);
        m.conservation_residual = r.audit.max_abs_residual;
        r.metrics = m;
        collect_violations(r);
    }

    void collect_violations(RunResult& r) {
        auto add = [&](std::string kind, Epoch e, std::string detail) {
            r.violations.push_back({std::move(kind), e, std::move(detail)});
        };
        for (const auto& d : r.audit.divergences) {
            std::string kind = "invalid-checkpoint-finalized";
            if (d.kind == "balance-mismatch" || d.kind == "conservation" || d.kind == "malformed-log") {
                kind = "audit-divergence";
            } else if (d.kind == "exit-balance-mismatch") {
                kind = "exit-balance-mismatch";
            }
            add(kind, d.epoch, d.kind + ": " + d.detail);
        }
        if (cfg_.safety) {
            for (const auto& em : r.metrics.epochs) {
                if (em.rounds > cfg_.max_rounds + 1) {
                    add("round-bound", em.epoch, std::to_string(em.rounds) + " rounds");
                }
            }
            if (r.timed_out) add("timeout", contract_->epoch(), "time budget exhausted before the contract halted");
        }
        for (const auto& inst : instances_) {
            const auto& signed_ = inst.v->signed_approvals();
            for (auto it = signed_.begin(); it != signed_.end();) {
                const auto key = it->first;
                std::set<Digest> distinct;
                for (; it != signed_.end() && it->first == key; ++it) distinct.insert(it->second);
                if (distinct.size() > 1 && !inst.v->byzantine_at(key.first)) {
                    add("double-approval", key.first, inst.name + " approved two blocks in round " + std::to_string(key.second));
                }
            }
        }
        if (contract_->halted() && !contract_->clients().empty()) {
            add("clients-not-exited", contract_->epoch(),
                std::to_string(contract_->clients().size()) + " clients still hold sidechain balances");
        }
        if (contract_->execution_end() == false) {
            add("execution-end-residual", contract_->epoch(),
                "residual balance " + std::to_string(contract_->total_balance()));
        }
        if (ledger_.sum_of_balances() != ledger_.supply()) {
            add("ledger-conservation", contract_->epoch(), "mainchain supply changed");
        }
        if (contract_->execution_end() && ledger_.in_flight().empty() && ledger_.balance(ledger::kFrozen) != 0) {
            add("audit-divergence", contract_->epoch(),
                "frozen pot holds " + std::to_string(ledger_.balance(ledger::kFrozen)) + " after every client left");
        }
    }

    ScenarioConfig cfg_;
    validator::ProtocolConfig proto_;
    std::unique_ptr<crypto::SignatureScheme> scheme_;
    ledger::Ledger ledger_;
    validator::Board board_;
    std::unique_ptr<contract::Contract> contract_;
    std::vector<Instance> instances_;
    std::vector<std::size_t> slot_instance_;
    std::vector<std::size_t> replacements_per_slot_;
    std::vector<crypto::KeyPair> pool_;
    std::map<crypto::PublicKey, std::size_t> pool_by_pk_;
    std::size_t next_replacement_ = 0;
    std::vector<Client> clients_;
    std::map<crypto::PublicKey, std::size_t> client_index_;
    Rng rng_;
    AuditLog log_;
    std::map<EventKey, Payload> queue_;
    std::uint64_t seq_ = 0;
    Tick now_ = 0;
    std::map<std::uint64_t, contract::Call> calls_;
    std::vector<bool> cancelled_;
    std::map<Epoch, EpochMetrics> epochs_;
    Tick last_finalized_at_ = 0;
    Metrics metrics_;
};

json sweep_json(const std::vector<SweepPoint>& pts) {
    json arr = json::array();
    for (const auto& p : pts) {
        arr.push_back({{"accounts", p.accounts},
                       {"samples", p.samples},
                       {"mean_siblings", p.mean_siblings},
                       {"max_siblings", p.max_siblings}});
    }
    return arr;
}

RunResult run_sweep(const ScenarioConfig& cfg) {
    RunResult r;
    r.config = cfg;
    r.metrics.sweep = proof_size_sweep(*cfg.sweep, cfg.seed);
    AuditLog log;
    json start = {{"t", 0},
                  {"entity", "env"},
                  {"kind", "run.start"},
                  {"digest", crypto::sha256(to_json(cfg)).hex()},
                  {"data", {{"scheme", cfg.scheme}, {"config", json::parse(to_json(cfg))}}}};
    log.append(start.dump());
    for (const auto& p : r.metrics.sweep) {
        json d = {{"accounts", p.accounts}, {"samples", p.samples}, {"mean_siblings", p.mean_siblings},
                  {"max_siblings", p.max_siblings}};
        json line = {{"t", 0}, {"entity", "env"}, {"kind", "sweep.point"}, {"digest", digest_of(d).hex()}, {"data", d}};
        log.append(line.dump());
    }
    r.audit_log = log.text();
    r.audit = independent_audit(r.audit_log);
    return r;
}

}  // namespace

std::vector<SweepPoint> proof_size_sweep(const SweepSpec& spec, std::uint64_t seed) {
    std::vector<SweepPoint> out;
    Rng rng(seed);
    for (const std::size_t m : spec.accounts) {
        merkle::AccountTrie trie;
        std::vector<Bytes> keys;
        keys.reserve(m);
        while (keys.size() < m) {
            Bytes k(32);
            for (std::size_t i = 0; i < k.size(); i += 8) {
                const auto word = rng.next();
                for (std::size_t b = 0; b < 8; ++b) k[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
            }
            if (trie.contains(k)) continue;
            trie = trie.set(k, rng.between(1, 1000));
            keys.push_back(std::move(k));
        }
        SweepPoint p;
        p.accounts = m;
        p.samples = spec.samples;
        std::size_t total = 0;
        for (std::size_t s = 0; s < spec.samples; ++s) {
            const auto siblings = trie.prove(keys[rng.below(keys.size())]).siblings.size();
            total += siblings;
            p.max_siblings = std::max(p.max_siblings, siblings);
        }
        p.mean_siblings = static_cast<double>(total) / static_cast<double>(spec.samples);
        out.push_back(p);
    }
    return out;
}

RunResult run_scenario(const ScenarioConfig& config) {
    config.validate();
    if (config.kind == "proof_size_sweep") return run_sweep(config);
    return Simulation(config).run();
}

std::string metrics_json(const RunResult& r) {
    const auto& c = r.config;
    const auto& m = r.metrics;
    json epochs = json::array();
    for (const auto& e : m.epochs) {
        epochs.push_back({{"epoch", e.epoch},
                          {"rounds", e.rounds},
                          {"restarts", e.restarts},
                          {"replacements", e.replacements},
                          {"finalized", e.finalized},
                          {"collect_at", e.collect_at},
                          {"propose_at", e.propose_at},
                          {"commit_at", e.commit_at},
                          {"finalized_at", e.finalized_at},
                          {"units", e.units},
                          {"transfers", e.transfers}});
    }
    json divergences = json::array();
    for (const auto& d : r.audit.divergences) {
        divergences.push_back({{"epoch", d.epoch}, {"kind", d.kind}, {"detail", d.detail}});
    }
    json violations = json::array();
    for (const auto& v : r.violations) {
        violations.push_back({{"kind", v.kind}, {"epoch", v.epoch}, {"detail", v.detail}});
    }
    json doc = {
        {"scenario", c.name},
        {"kind", c.kind},
        {"seed", c.seed},
        {"scheme", c.scheme},
        {"n", c.n},
        {"f", c.f},
        {"delta", c.delta},
        {"tau", c.tau},
        {"totals",
         {{"checkpoints_finalized", m.checkpoints_finalized},
          {"challenges_raised", m.challenges_raised},
          {"challenges_valid", m.challenges_valid},
          {"challenges_invalid", m.challenges_invalid},
          {"challenges_stale", m.challenges_stale},
          {"leaders_removed", m.leaders_removed},
          {"withdrawals_served", m.withdrawals_served},
          {"exits", m.exits},
          {"interactive_exits_opened", m.interactive_exits_opened},
          {"interactive_exits_resolved", m.interactive_exits_resolved},
          {"double_spend_attempts", m.double_spend_attempts},
          {"messages", m.messages},
          {"halted", m.halted},
          {"mass_exit", m.mass_exit},
          {"execution_end", m.execution_end ? json(*m.execution_end) : json(nullptr)},
          {"conservation_residual", m.conservation_residual},
          {"pop_samples", m.pop_samples},
          {"pop_siblings_mean", m.pop_siblings_mean},
          {"pop_siblings_max", m.pop_siblings_max},
          {"end_time", m.end_time},
          {"timed_out", r.timed_out}}},
        {"epochs", std::move(epochs)},
        {"audit",
         {{"consistent", r.audit.consistent()},
          {"lines", r.audit.lines},
          {"checkpoints", r.audit.checkpoints},
          {"records", r.audit.records},
          {"exits_checked", r.audit.exits_checked},
          {"max_abs_residual", r.audit.max_abs_residual},
          {"first_divergent_epoch",
           r.audit.first_divergent_epoch ? json(*r.audit.first_divergent_epoch) : json(nullptr)},
          {"divergences", std::move(divergences)}}},
        {"violations", std::move(violations)}};
    if (!m.sweep.empty()) doc["sweep"] = sweep_json(m.sweep);
    return doc.dump(2) + "\n";
}

std::string violation_report(const RunResult& r) {
    std::ostringstream out;
    for (const auto& v : r.violations) {
        out << "VIOLATION " << v.kind << " epoch=" << v.epoch << ": " << v.detail << "\n";
    }
    return out.str();
}

}  // namespace vulcan::simnet
