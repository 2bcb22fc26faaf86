// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vulcan/common/bytes.hpp"

namespace vulcan::simnet {

/// Line-delimited JSON audit stream. Every line is an object with the fields
/// t, entity, kind, digest and data.
///
/// Kinds the auditor consumes:
///   run.start               data: scheme, n, clients
///   contract.record         data: index, epoch, kind, account, amount, halted
///   contract.record_cancelled data: index
///   checkpoint.finalized    data: epoch, cp, roster, block (null when nobody holds it)
/// Everything else (messages, ledger activity, notices, traces) is informational.
class AuditLog {
  public:
    void append(std::string line);
    [[nodiscard]] const std::string& text() const { return text_; }
    [[nodiscard]] std::size_t lines() const { return lines_; }

  private:
    std::string text_;
    std::size_t lines_ = 0;
};

struct Divergence {
    Epoch epoch = 0;
    /// invalid-checkpoint, block-unavailable, linkage, root-mismatch, invalid-record,
    /// invalid-transfer, balance-mismatch, conservation, exit-balance-mismatch, malformed-log
    std::string kind;
    std::string detail;
};

struct AuditReport {
    std::size_t lines = 0;
    std::size_t checkpoints = 0;
    std::size_t records = 0;
    std::size_t exits_checked = 0;
    std::vector<Divergence> divergences;
    std::optional<Epoch> first_divergent_epoch;
    /// Σ replayed balances minus net pegged coins, after each finalized block.
    std::vector<std::int64_t> residual_per_epoch;
    std::int64_t max_abs_residual = 0;

    [[nodiscard]] bool consistent() const { return divergences.empty(); }
};

/// Replays a run from its audit log alone. Encodings, roots, signer bits and balances are
/// recomputed here; only SHA-256 and signature verification are shared with the protocol
/// code. Checks checkpoint linkage and certificates, both header roots, every finalized
/// balance by flat replay from genesis, per-epoch conservation, and that each exit paid
/// the replayed balance.
AuditReport independent_audit(std::string_view log);

}  // namespace vulcan::simnet
