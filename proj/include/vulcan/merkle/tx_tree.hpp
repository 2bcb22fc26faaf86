// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "vulcan/common/bytes.hpp"

namespace vulcan::merkle {

/// Root of a tree with no leaves (and of an empty account trie): SHA-256 of "".
Digest empty_root();

/// Interior node label: SHA-256(0x01 || left || right).
Digest hash_pair(const Digest& left, const Digest& right);

struct TxProof {
    std::size_t leaf_index = 0;
    /// Bottom-up, one per level.
    std::vector<Digest> siblings;
};

/// Bitcoin-style binary Merkle tree over transaction hashes. A level with an odd number
/// of nodes duplicates its last node; a single leaf is paired with itself, so every
/// non-empty tree has at least one interior level.
class TxTree {
  public:
    TxTree() = default;
    static TxTree build(std::vector<Digest> leaves);

    [[nodiscard]] const Digest& root() const { return root_; }
    [[nodiscard]] std::size_t size() const { return leaf_count_; }
    [[nodiscard]] bool empty() const { return leaf_count_ == 0; }

    /// Throws MerkleError for index >= size().
    [[nodiscard]] TxProof prove(std::size_t index) const;

  private:
    std::size_t leaf_count_ = 0;
    // levels_[0] holds the (padded) leaves; the last level is the single root.
    std::vector<std::vector<Digest>> levels_;
    Digest root_ = empty_root();
};

bool verify_tx_proof(const Digest& root, const Digest& leaf, const TxProof& proof);

}  // namespace vulcan::merkle
