// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/chain/block.hpp"

#include "vulcan/common/error.hpp"
#include "vulcan/merkle/tx_tree.hpp"

namespace vulcan::chain {

Balances apply_adjustments(Balances balances, const std::vector<Transaction>& adjustments) {
    for (const auto& adj : adjustments) {
        switch (adj.kind) {
            case TxKind::Deposit:
                balances[adj.receiver] += adj.amount;
                break;
            case TxKind::Withdraw: {
                auto it = balances.find(adj.sender);
                if (it == balances.end() || it->second < adj.amount) {
                    throw ChainError("withdrawal record exceeds balance");
                }
                it->second -= adj.amount;
                break;
            }
            case TxKind::Exit: {
                auto it = balances.find(adj.sender);
                const Coins have = it == balances.end() ? 0 : it->second;
                if (have != adj.amount) throw ChainError("exit record does not match balance");
                if (it != balances.end()) balances.erase(it);
                break;
            }
            case TxKind::Transfer:
                throw ChainError("transfer in adjustment list");
        }
    }
    return balances;
}

bool transfer_applicable(const crypto::SignatureScheme& scheme, const Balances& running,
                         const Transaction& tx) {
    if (tx.kind != TxKind::Transfer || tx.amount == 0 || tx.sender == tx.receiver) return false;
    auto it = running.find(tx.sender);
    if (it == running.end() || it->second < tx.amount) return false;
    return scheme.verify(tx.signing_bytes(), tx.signature, tx.sender);
}

Execution execute_queue(const crypto::SignatureScheme& scheme, Balances prev,
                        const std::vector<Transaction>& queue, const std::set<Digest>& skip) {
    Execution out{std::move(prev), {}};
    std::set<Digest> seen = skip;
    for (const auto& tx : queue) {
        if (!transfer_applicable(scheme, out.post, tx)) continue;
        if (!seen.insert(tx.hash()).second) continue;
        out.post[tx.sender] -= tx.amount;
        out.post[tx.receiver] += tx.amount;
        out.accepted.push_back(tx);
    }
    return out;
}

bool epoch_tag_ok(Epoch block_epoch, Epoch tag) {
    return tag == block_epoch || (block_epoch > 0 && tag == block_epoch - 1);
}

Digest compute_tx_root(const std::vector<Transaction>& txs) {
    std::vector<Digest> leaves;
    leaves.reserve(txs.size());
    for (const auto& tx : txs) leaves.push_back(tx.hash());
    return merkle::TxTree::build(std::move(leaves)).root();
}

Block build_block(const BlockContext& ctx, const std::vector<Transaction>& queue) {
    if (ctx.scheme == nullptr) throw ChainError("block context has no signature scheme");
    Balances start = apply_adjustments(ctx.prev_balances, ctx.adjustments);
    std::vector<Transaction> eligible;
    eligible.reserve(queue.size());
    for (const auto& tx : queue) {
        if (epoch_tag_ok(ctx.epoch, tx.epoch_tag)) eligible.push_back(tx);
    }
    Execution exec = execute_queue(*ctx.scheme, std::move(start), eligible, ctx.prev_tx_hashes);

    Block block;
    block.txs = ctx.adjustments;
    block.txs.insert(block.txs.end(), exec.accepted.begin(), exec.accepted.end());
    block.accounts = std::move(exec.post);
    block.trie = build_trie(block.accounts);
    block.header.epoch = ctx.epoch;
    block.header.prev_block_hash = ctx.prev_header_hash;
    block.header.last_checkpoint = ctx.last_checkpoint;
    block.header.tx_root = compute_tx_root(block.txs);
    block.header.account_root = block.trie.root();
    return block;
}

bool validate_block(const Block& block, const BlockContext& ctx) {
    if (ctx.scheme == nullptr) return false;
    const auto& h = block.header;
    if (h.epoch != ctx.epoch || h.prev_block_hash != ctx.prev_header_hash ||
        h.last_checkpoint != ctx.last_checkpoint) {
        return false;
    }
    if (block.txs.size() < ctx.adjustments.size()) return false;
    for (std::size_t i = 0; i < ctx.adjustments.size(); ++i) {
        if (!(block.txs[i] == ctx.adjustments[i])) return false;
    }

    Balances running;
    try {
        running = apply_adjustments(ctx.prev_balances, ctx.adjustments);
    } catch (const ChainError&) {
        return false;
    }
    std::set<Digest> seen = ctx.prev_tx_hashes;
    for (std::size_t i = ctx.adjustments.size(); i < block.txs.size(); ++i) {
        const auto& tx = block.txs[i];
        if (!epoch_tag_ok(ctx.epoch, tx.epoch_tag)) return false;
        if (!transfer_applicable(*ctx.scheme, running, tx)) return false;
        if (!seen.insert(tx.hash()).second) return false;
        running[tx.sender] -= tx.amount;
        running[tx.receiver] += tx.amount;
    }
    if (running != block.accounts) return false;
    if (compute_tx_root(block.txs) != h.tx_root) return false;
    return build_trie(block.accounts).root() == h.account_root;
}

}  // namespace vulcan::chain
