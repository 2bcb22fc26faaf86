// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/simnet/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vulcan/common/error.hpp"

namespace vulcan::simnet {

using nlohmann::json;

namespace {

/// Strict reader over one JSON object; every diagnostic carries the field path.
class ObjectReader {
  public:
    ObjectReader(const json& j, std::string path, std::initializer_list<std::string_view> allowed)
        : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
        for (const auto& [key, value] : j_.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(path_ + "." + key, "unknown field");
            }
        }
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what) {
        throw ConfigError(path + ": " + what);
    }

    [[nodiscard]] bool has(const char* key) const { return j_.contains(key); }
    [[nodiscard]] std::string at(const char* key) const { return path_ + "." + key; }
    [[nodiscard]] const json& raw(const char* key) const { return j_.at(key); }

    template <class T>
    void uint(const char* key, T& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number_unsigned()) fail(at(key), "expected a non-negative integer");
        const auto x = v.get<std::uint64_t>();
        if (x > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) fail(at(key), "value out of range");
        out = static_cast<T>(x);
    }

    void boolean(const char* key, bool& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) fail(at(key), "expected true or false");
        out = v.get<bool>();
    }

    void number(const char* key, double& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number()) fail(at(key), "expected a number");
        out = v.get<double>();
    }

    void string(const char* key, std::string& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        out = v.get<std::string>();
    }

  private:
    const json& j_;
    std::string path_;
};

ClientBehavior behavior_from_string(const std::string& path, const std::string& s) {
    for (auto b : {ClientBehavior::Honest, ClientBehavior::DoubleSpender, ClientBehavior::Offline}) {
        if (to_string(b) == s) return b;
    }
    ObjectReader::fail(path, "unknown behavior '" + s + "' (honest, double_spender, offline)");
}

/// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

ScenarioConfig from_json(const json& j) {
    ObjectReader r(j, "$",
                   {"schema", "name", "kind", "scheme", "n", "f", "delta", "tau", "n_max", "t_max", "max_rounds",
                    "overlap", "epochs_target", "seed", "wager", "validator_endowment", "safety", "max_time",
                    "clients", "byzantine", "workload", "sweep"});
    if (!r.has("schema")) ObjectReader::fail("$.schema", "missing field");
    std::string schema;
    r.string("schema", schema);
    if (schema != kScenarioSchema) {
        ObjectReader::fail("$.schema", "expected \"" + std::string(kScenarioSchema) + "\", got \"" + schema + "\"");
    }

    ScenarioConfig c;
    r.string("name", c.name);
    r.string("kind", c.kind);
    r.string("scheme", c.scheme);
    r.uint("n", c.n);
    r.uint("f", c.f);
    r.uint("delta", c.delta);
    r.uint("tau", c.tau);
    r.uint("n_max", c.n_max);
    r.uint("t_max", c.t_max);
    r.uint("max_rounds", c.max_rounds);
    r.boolean("overlap", c.overlap);
    r.uint("epochs_target", c.epochs_target);
    r.uint("seed", c.seed);
    r.uint("wager", c.wager);
    r.uint("validator_endowment", c.validator_endowment);
    r.boolean("safety", c.safety);
    r.uint("max_time", c.max_time);

    if (r.has("clients")) {
        const auto& arr = r.raw("clients");
        if (!arr.is_array()) ObjectReader::fail("$.clients", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "$.clients[" + std::to_string(i) + "]";
            ObjectReader cr(arr[i], path, {"id", "endowment", "deposit", "behavior"});
            ClientSpec s;
            if (!cr.has("id")) ObjectReader::fail(path + ".id", "missing field");
            cr.string("id", s.id);
            cr.uint("endowment", s.endowment);
            cr.uint("deposit", s.deposit);
            std::string b = "honest";
            cr.string("behavior", b);
            s.behavior = behavior_from_string(cr.at("behavior"), b);
            c.clients.push_back(std::move(s));
        }
    }
    if (r.has("byzantine")) {
        const auto& arr = r.raw("byzantine");
        if (!arr.is_array()) ObjectReader::fail("$.byzantine", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "$.byzantine[" + std::to_string(i) + "]";
            ObjectReader br(arr[i], path, {"validator", "strategy", "from_epoch", "until_epoch", "target_client"});
            ByzantineSpec s;
            if (!br.has("validator")) ObjectReader::fail(path + ".validator", "missing field");
            if (!br.has("strategy")) ObjectReader::fail(path + ".strategy", "missing field");
            br.uint("validator", s.validator);
            std::string name;
            br.string("strategy", name);
            try {
                s.strategy = validator::strategy_from_string(name);
            } catch (const ConfigError& e) {
                ObjectReader::fail(br.at("strategy"), e.what());
            }
            br.uint("from_epoch", s.from_epoch);
            br.uint("until_epoch", s.until_epoch);
            if (br.has("target_client")) {
                std::string t;
                br.string("target_client", t);
                s.target_client = t;
            }
            c.byzantine.push_back(std::move(s));
        }
    }
    if (r.has("workload")) {
        ObjectReader wr(r.raw("workload"), "$.workload",
                        {"turn_interval", "transfer_prob", "amount_min", "amount_max", "withdraw_prob",
                         "deposit_prob"});
        wr.uint("turn_interval", c.workload.turn_interval);
        wr.number("transfer_prob", c.workload.transfer_prob);
        wr.uint("amount_min", c.workload.amount_min);
        wr.uint("amount_max", c.workload.amount_max);
        wr.number("withdraw_prob", c.workload.withdraw_prob);
        wr.number("deposit_prob", c.workload.deposit_prob);
    }
    if (r.has("sweep")) {
        ObjectReader sr(r.raw("sweep"), "$.sweep", {"accounts", "samples"});
        SweepSpec s;
        if (sr.has("accounts")) {
            const auto& arr = sr.raw("accounts");
            if (!arr.is_array()) ObjectReader::fail("$.sweep.accounts", "expected an array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                if (!arr[i].is_number_unsigned()) {
                    ObjectReader::fail("$.sweep.accounts[" + std::to_string(i) + "]", "expected a non-negative integer");
                }
                s.accounts.push_back(arr[i].get<std::size_t>());
            }
        }
        sr.uint("samples", s.samples);
        c.sweep = std::move(s);
    }
    return c;
}

std::vector<ByzantineSpec> one(std::size_t v, validator::Strategy s, Epoch from = 0) {
    ByzantineSpec b;
    b.validator = v;
    b.strategy = s;
    b.from_epoch = from;
    return {b};
}

}  // namespace

std::string_view to_string(ClientBehavior b) {
    switch (b) {
        case ClientBehavior::Honest: return "honest";
        case ClientBehavior::DoubleSpender: return "double_spender";
        case ClientBehavior::Offline: return "offline";
    }
    return "unknown";
}

validator::ProtocolConfig ScenarioConfig::protocol() const {
    validator::ProtocolConfig p;
    p.n = n;
    p.f = f;
    p.delta = delta;
    p.tau = tau;
    p.n_max = n_max;
    p.t_max = t_max;
    p.max_rounds = max_rounds;
    p.overlap = overlap;
    p.wager = wager;
    return p;
}

std::size_t ScenarioConfig::corrupted() const {
    std::set<std::size_t> ids;
    for (const auto& b : byzantine) {
        if (b.strategy != validator::Strategy::Honest) ids.insert(b.validator);
    }
    return ids.size();
}

Tick ScenarioConfig::time_budget() const {
    if (max_time > 0) return max_time;
    // Every attempt: collection, a round trip and the progress timeout; every epoch: at
    // most max_rounds + 1 attempts plus commit and pending delays.
    const Tick attempt = t_max + 2 * tau + delta + 4 * tau;
    const Tick epoch = (max_rounds + 2) * attempt + 3 * delta;
    return (epochs_target + 4) * epoch + 10 * delta;
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& path, const std::string& what) { ObjectReader::fail(path, what); };
    if (kind != "protocol" && kind != "proof_size_sweep") fail("$.kind", "expected \"protocol\" or \"proof_size_sweep\"");
    if (scheme != "test" && scheme != "bls12-381") fail("$.scheme", "expected \"test\" or \"bls12-381\"");
    if (name.empty() || name.find_first_of("/\\") != std::string::npos) fail("$.name", "must be a non-empty file name");

    if (kind == "proof_size_sweep") {
        if (!sweep) fail("$.sweep", "missing field for a proof_size_sweep scenario");
        if (sweep->accounts.empty()) fail("$.sweep.accounts", "must not be empty");
        for (std::size_t i = 0; i < sweep->accounts.size(); ++i) {
            if (sweep->accounts[i] == 0) fail("$.sweep.accounts[" + std::to_string(i) + "]", "must be positive");
        }
        if (sweep->samples == 0) fail("$.sweep.samples", "must be positive");
        return;
    }
    if (sweep) fail("$.sweep", "only allowed for proof_size_sweep scenarios");

    try {
        protocol().validate();
    } catch (const ConfigError& e) {
        fail("$", e.what());
    }
    if (epochs_target < 2) fail("$.epochs_target", "must be at least 2 (deposits enter the first block)");
    if (tau > delta) fail("$.tau", "must not exceed delta");
    if (validator_endowment < wager) fail("$.validator_endowment", "must cover at least one wager");
    if (clients.empty()) fail("$.clients", "at least one client is required");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < clients.size(); ++i) {
        const auto& cl = clients[i];
        const std::string path = "$.clients[" + std::to_string(i) + "]";
        if (cl.id.empty()) fail(path + ".id", "must not be empty");
        if (!ids.insert(cl.id).second) fail(path + ".id", "duplicate id '" + cl.id + "'");
        if (cl.deposit == 0) fail(path + ".deposit", "must be positive");
        if (cl.deposit > cl.endowment) fail(path + ".deposit", "exceeds the endowment");
    }
    for (std::size_t i = 0; i < byzantine.size(); ++i) {
        const auto& b = byzantine[i];
        const std::string path = "$.byzantine[" + std::to_string(i) + "]";
        if (b.validator >= n) fail(path + ".validator", "must be below n");
        if (b.from_epoch > b.until_epoch) fail(path + ".until_epoch", "precedes from_epoch");
        if (b.target_client && !ids.contains(*b.target_client)) {
            fail(path + ".target_client", "unknown client '" + *b.target_client + "'");
        }
    }
    if (safety && corrupted() > f) {
        fail("$.byzantine", "a safety scenario may corrupt at most f = " + std::to_string(f) + " validators, got " +
                                std::to_string(corrupted()));
    }
    const auto& w = workload;
    if (w.turn_interval == 0) fail("$.workload.turn_interval", "must be positive");
    if (w.amount_min == 0) fail("$.workload.amount_min", "must be positive");
    if (w.amount_max < w.amount_min) fail("$.workload.amount_max", "below amount_min");
    auto prob = [&](double p, const char* key) {
        if (!(p >= 0.0 && p <= 1.0)) fail(std::string("$.workload.") + key, "must lie in [0, 1]");
    };
    prob(w.transfer_prob, "transfer_prob");
    prob(w.withdraw_prob, "withdraw_prob");
    prob(w.deposit_prob, "deposit_prob");
}

ScenarioConfig parse_scenario(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte);
        throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
    }
    ScenarioConfig c = from_json(j);
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open scenario file");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string to_json(const ScenarioConfig& c) {
    using ojson = nlohmann::ordered_json;
    ojson j = ojson::object();
    j["schema"] = kScenarioSchema;
    j["name"] = c.name;
    j["kind"] = c.kind;
    j["scheme"] = c.scheme;
    j["seed"] = c.seed;
    j["n"] = c.n;
    j["f"] = c.f;
    j["delta"] = c.delta;
    j["tau"] = c.tau;
    j["n_max"] = c.n_max;
    j["t_max"] = c.t_max;
    j["max_rounds"] = c.max_rounds;
    j["overlap"] = c.overlap;
    j["epochs_target"] = c.epochs_target;
    j["wager"] = c.wager;
    j["validator_endowment"] = c.validator_endowment;
    j["safety"] = c.safety;
    j["max_time"] = c.max_time;
    ojson clients = ojson::array();
    for (const auto& cl : c.clients) {
        clients.push_back({{"id", cl.id},
                           {"endowment", cl.endowment},
                           {"deposit", cl.deposit},
                           {"behavior", to_string(cl.behavior)}});
    }
    j["clients"] = std::move(clients);
    ojson byz = ojson::array();
    for (const auto& b : c.byzantine) {
        ojson e = {{"validator", b.validator},
                   {"strategy", validator::to_string(b.strategy)},
                   {"from_epoch", b.from_epoch}};
        // Omitted means "until the end of the run".
        if (b.until_epoch != ~Epoch{0}) e["until_epoch"] = b.until_epoch;
        if (b.target_client) e["target_client"] = *b.target_client;
        byz.push_back(std::move(e));
    }
    j["byzantine"] = std::move(byz);
    const auto& w = c.workload;
    j["workload"] = {{"turn_interval", w.turn_interval}, {"transfer_prob", w.transfer_prob},
                     {"amount_min", w.amount_min},       {"amount_max", w.amount_max},
                     {"withdraw_prob", w.withdraw_prob}, {"deposit_prob", w.deposit_prob}};
    if (c.sweep) j["sweep"] = {{"accounts", c.sweep->accounts}, {"samples", c.sweep->samples}};
    return j.dump(2) + "\n";
}

std::vector<ClientSpec> default_clients(std::size_t count, Coins deposit) {
    std::vector<ClientSpec> out;
    for (std::size_t i = 0; i < count; ++i) {
        ClientSpec s;
        s.id = "c" + std::to_string(i);
        s.deposit = deposit;
        s.endowment = 10 * deposit;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> template_names() {
    return {"honest", "withhold", "equivocate", "silent_leader", "collusion", "mass_exit", "proof_size_sweep"};
}

ScenarioConfig make_template(std::string_view name) {
    using validator::Strategy;
    ScenarioConfig c;
    c.name = std::string(name);
    c.clients = default_clients(6);
    if (name == "honest") {
        c.epochs_target = 20;
    } else if (name == "withhold") {
        // Slot 2 leads epoch 2; it keeps the block to itself and commits a forged index.
        c.epochs_target = 8;
        c.byzantine = one(2, Strategy::WithholdAndCommit, 2);
    } else if (name == "equivocate") {
        c.epochs_target = 8;
        c.byzantine = one(1, Strategy::Equivocate);
    } else if (name == "silent_leader") {
        c.epochs_target = 8;
        c.byzantine = one(3, Strategy::SilentLeader, 3);
    } else if (name == "collusion") {
        // A tampering leader and f - 1 rubber-stamping followers: one short of a quorum.
        c.epochs_target = 12;
        c.byzantine = one(1, Strategy::TamperBalances);
        c.byzantine.front().target_client = "c0";
        auto more = one(2, Strategy::ApproveAnything);
        c.byzantine.insert(c.byzantine.end(), more.begin(), more.end());
    } else if (name == "mass_exit") {
        // Every validator is corrupt: each tampers with c0 when leading and approves anything
        // otherwise. Only the online client stands between the committee and the funds.
        c.n = 3;
        c.f = 1;
        c.safety = false;
        c.epochs_target = 10;
        c.clients = default_clients(4);
        for (std::size_t v = 0; v < c.n; ++v) {
            ByzantineSpec t;
            t.validator = v;
            t.strategy = Strategy::TamperBalances;
            t.from_epoch = 2;
            t.target_client = "c0";
            ByzantineSpec a;
            a.validator = v;
            a.strategy = Strategy::ApproveAnything;
            a.from_epoch = 2;
            c.byzantine.push_back(t);
            c.byzantine.push_back(a);
        }
    } else if (name == "proof_size_sweep") {
        c.kind = "proof_size_sweep";
        c.clients.clear();
        SweepSpec s;
        for (std::size_t m = 64; m <= 16384; m *= 2) s.accounts.push_back(m);
        s.samples = 256;
        c.sweep = s;
    } else {
        throw ConfigError("unknown template '" + std::string(name) + "'");
    }
    c.validate();
    return c;
}

}  // namespace vulcan::simnet
