// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/merkle/tx_tree.hpp"

#include <string>

#include "vulcan/common/error.hpp"
#include "vulcan/crypto/hash.hpp"

namespace vulcan::merkle {

Digest empty_root() {
    static const Digest root = crypto::sha256(ByteView{});
    return root;
}

Digest hash_pair(const Digest& left, const Digest& right) {
    crypto::Hasher h;
    h.update_u8(0x01).update(left).update(right);
    return h.finish();
}

TxTree TxTree::build(std::vector<Digest> leaves) {
    TxTree tree;
    tree.leaf_count_ = leaves.size();
    if (leaves.empty()) return tree;

    std::vector<Digest> level = std::move(leaves);
    do {
        if (level.size() % 2 == 1) level.push_back(level.back());
        std::vector<Digest> next;
        next.reserve(level.size() / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) next.push_back(hash_pair(level[i], level[i + 1]));
        tree.levels_.push_back(std::move(level));
        level = std::move(next);
    } while (level.size() > 1);
    tree.root_ = level.front();
    tree.levels_.push_back(std::move(level));
    return tree;
}

TxProof TxTree::prove(std::size_t index) const {
    if (index >= leaf_count_) {
        throw MerkleError("leaf index " + std::to_string(index) + " out of range (size " +
                          std::to_string(leaf_count_) + ")");
    }
    TxProof proof{index, {}};
    std::size_t pos = index;
    for (std::size_t lvl = 0; lvl + 1 < levels_.size(); ++lvl) {
        proof.siblings.push_back(levels_[lvl][pos ^ 1U]);
        pos >>= 1U;
    }
    return proof;
}

bool verify_tx_proof(const Digest& root, const Digest& leaf, const TxProof& proof) {
    if (proof.siblings.empty() || proof.siblings.size() >= 64) return false;
    Digest cur = leaf;
    std::size_t pos = proof.leaf_index;
    for (const auto& sib : proof.siblings) {
        cur = (pos & 1U) ? hash_pair(sib, cur) : hash_pair(cur, sib);
        pos >>= 1U;
    }
    return pos == 0 && cur == root;
}

}  // namespace vulcan::merkle
