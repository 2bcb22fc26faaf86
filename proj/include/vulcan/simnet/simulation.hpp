// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vulcan/simnet/audit.hpp"
#include "vulcan/simnet/scenario.hpp"

namespace vulcan::simnet {

struct EpochMetrics {
    Epoch epoch = 0;
    /// 1 + restarts + leader replacements.
    std::uint32_t rounds = 1;
    std::uint32_t restarts = 0;
    std::uint32_t replacements = 0;
    bool finalized = false;
    /// Term boundaries of the successful attempt.
    Tick collect_at = 0;
    Tick propose_at = 0;
    Tick commit_at = 0;
    Tick finalized_at = 0;
    /// finalized_at minus the previous epoch's finalized_at.
    Tick units = 0;
    std::size_t transfers = 0;
};

struct SweepPoint {
    std::size_t accounts = 0;
    std::size_t samples = 0;
    double mean_siblings = 0;
    std::size_t max_siblings = 0;
};

struct Metrics {
    std::vector<EpochMetrics> epochs;
    std::size_t checkpoints_finalized = 0;
    std::size_t challenges_raised = 0;
    std::size_t challenges_valid = 0;
    std::size_t challenges_invalid = 0;
    std::size_t challenges_stale = 0;
    std::size_t leaders_removed = 0;
    std::size_t withdrawals_served = 0;
    std::size_t exits = 0;
    std::size_t interactive_exits_opened = 0;
    std::size_t interactive_exits_resolved = 0;
    std::size_t double_spend_attempts = 0;
    std::size_t messages = 0;
    bool halted = false;
    bool mass_exit = false;
    std::optional<bool> execution_end;
    std::int64_t conservation_residual = 0;
    std::size_t pop_samples = 0;
    double pop_siblings_mean = 0;
    std::size_t pop_siblings_max = 0;
    Tick end_time = 0;
    std::vector<SweepPoint> sweep;
};

struct Violation {
    /// invalid-checkpoint-finalized, audit-divergence, exit-balance-mismatch,
    /// clients-not-exited, round-bound, double-approval, execution-end-residual,
    /// ledger-conservation, timeout
    std::string kind;
    Epoch epoch = 0;
    std::string detail;
};

struct RunResult {
    ScenarioConfig config;
    Metrics metrics;
    std::string audit_log;
    AuditReport audit;
    std::vector<Violation> violations;
    /// The time budget ran out before the contract halted.
    bool timed_out = false;

    [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Runs one scenario to completion. Deterministic in the config (including its seed):
/// the same input yields byte-identical audit logs and metrics. Throws ConfigError if the
/// config is invalid.
RunResult run_scenario(const ScenarioConfig& config);

/// Proof-size experiment: for each size m, random accounts and the sibling count of
/// sampled proofs.
std::vector<SweepPoint> proof_size_sweep(const SweepSpec& spec, std::uint64_t seed);

/// metrics.json contents: metrics, audit summary and violations.
std::string metrics_json(const RunResult& r);
/// Human-readable violation report, one line per violation.
std::string violation_report(const RunResult& r);

}  // namespace vulcan::simnet
