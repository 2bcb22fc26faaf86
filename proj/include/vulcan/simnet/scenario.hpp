// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vulcan/validator/validator.hpp"

namespace vulcan::simnet {

inline constexpr std::string_view kScenarioSchema = "vulcan-scenario/1";

enum class ClientBehavior { Honest, DoubleSpender, Offline };
std::string_view to_string(ClientBehavior b);

struct ClientSpec {
    std::string id;
    /// Mainchain coins at genesis.
    Coins endowment = 1000;
    /// Deposited into the sidechain at time 0.
    Coins deposit = 100;
    ClientBehavior behavior = ClientBehavior::Honest;

    bool operator==(const ClientSpec&) const = default;
};

struct ByzantineSpec {
    std::size_t validator = 0;
    validator::Strategy strategy = validator::Strategy::Honest;
    Epoch from_epoch = 0;
    Epoch until_epoch = ~Epoch{0};
    /// Client id for TamperBalances and DropClientTxs.
    std::optional<std::string> target_client;

    bool operator==(const ByzantineSpec&) const = default;
};

struct Workload {
    /// Clients take a turn every this many units.
    Tick turn_interval = 2;
    /// Per turn.
    double transfer_prob = 0.5;
    Coins amount_min = 1;
    Coins amount_max = 5;
    /// Per pending term.
    double withdraw_prob = 0.05;
    double deposit_prob = 0.02;

    bool operator==(const Workload&) const = default;
};

/// Proof-size experiment: trie sizes and the number of sampled proofs per size.
struct SweepSpec {
    std::vector<std::size_t> accounts;
    std::size_t samples = 256;

    bool operator==(const SweepSpec&) const = default;
};

struct ScenarioConfig {
    std::string name = "scenario";
    /// "protocol" or "proof_size_sweep".
    std::string kind = "protocol";
    /// "test" or "bls12-381".
    std::string scheme = "test";
    std::size_t n = 5;
    std::size_t f = 2;
    Tick delta = 10;
    Tick tau = 1;
    std::size_t n_max = 64;
    Tick t_max = 4;
    std::uint32_t max_rounds = 3;
    bool overlap = true;
    Epoch epochs_target = 20;
    std::uint64_t seed = 1;
    Coins wager = 10;
    Coins validator_endowment = 1000;
    /// Safety-tagged scenarios may corrupt at most f validators.
    bool safety = true;
    /// Simulated-time budget; 0 derives one from the epoch target and the timing constants.
    Tick max_time = 0;
    std::vector<ClientSpec> clients;
    std::vector<ByzantineSpec> byzantine;
    Workload workload;
    std::optional<SweepSpec> sweep;

    [[nodiscard]] validator::ProtocolConfig protocol() const;
    /// Throws ConfigError naming the offending field.
    void validate() const;
    /// Distinct corrupted validator indices.
    [[nodiscard]] std::size_t corrupted() const;
    /// max_time, or the derived budget when it is 0.
    [[nodiscard]] Tick time_budget() const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Parses a scenario document. Unknown fields are rejected; diagnostics name the field
/// path, or the line and column for syntax errors. Throws ConfigError.
ScenarioConfig parse_scenario(std::string_view text);
/// Reads and parses a file; throws ConfigError if it cannot be read.
ScenarioConfig load_scenario(const std::string& path);
/// Canonical JSON form; parse_scenario(to_json(c)) == c.
std::string to_json(const ScenarioConfig& c);

/// Named scenario templates: honest, withhold, equivocate, silent_leader, collusion,
/// mass_exit, proof_size_sweep. Throws ConfigError for other names.
ScenarioConfig make_template(std::string_view name);
std::vector<std::string> template_names();

/// `count` honest clients c0..c{count-1} with the given deposit.
std::vector<ClientSpec> default_clients(std::size_t count, Coins deposit = 100);

}  // namespace vulcan::simnet
