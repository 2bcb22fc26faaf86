// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <set>
#include <vector>

#include "vulcan/chain/types.hpp"

namespace vulcan::chain {

/// Everything a block for `epoch` is built and judged against.
struct BlockContext {
    const crypto::SignatureScheme* scheme = nullptr;
    Epoch epoch = 0;
    /// Header hash of the previous block; zero for epoch 0.
    Digest prev_header_hash;
    /// Block hash named by the last finalized checkpoint; zero for epoch 0.
    Digest last_checkpoint;
    /// Post-state of the previous block.
    Balances prev_balances;
    /// Balance-change records that must open the block, in contract order.
    std::vector<Transaction> adjustments;
    /// Transfers already included in the previous block; they may not be replayed.
    std::set<Digest> prev_tx_hashes;
};

struct Execution {
    Balances post;
    std::vector<Transaction> accepted;
};

/// Applies contract-mandated records in order. Throws ChainError if a debit exceeds the
/// balance or an exit does not empty its account.
Balances apply_adjustments(Balances balances, const std::vector<Transaction>& adjustments);

/// Transfer validity against a running balance map, excluding replay checks.
bool transfer_applicable(const crypto::SignatureScheme& scheme, const Balances& running,
                         const Transaction& tx);

/// Sequentially applies the queue; a transfer is accepted iff it is a well-signed transfer
/// between distinct accounts whose sender's running balance covers the amount. `skip`
/// holds hashes that must be rejected (replays). Rejections are data.
Execution execute_queue(const crypto::SignatureScheme& scheme, Balances prev,
                        const std::vector<Transaction>& queue,
                        const std::set<Digest>& skip = {});

/// Transfers tagged outside {epoch - 1, epoch} are excluded.
bool epoch_tag_ok(Epoch block_epoch, Epoch tag);

/// Adjustments first, then the executed queue. Deterministic in its inputs.
Block build_block(const BlockContext& ctx, const std::vector<Transaction>& queue);

/// True iff the header matches ctx, the block opens with exactly ctx.adjustments, every
/// transfer is fresh, correctly tagged and applicable in sequence, both roots recompute and
/// the resulting balances equal block.accounts.
bool validate_block(const Block& block, const BlockContext& ctx);

/// Recomputes the two header roots from a block's contents.
Digest compute_tx_root(const std::vector<Transaction>& txs);

}  // namespace vulcan::chain
