// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "vulcan/common/bytes.hpp"

namespace vulcan::merkle {

/// 256-bit set of trie depths, stored big-endian: depth d is bit (7 - d % 8) of byte d / 8.
struct BranchMask {
    std::array<std::uint8_t, 32> bits{};

    auto operator<=>(const BranchMask&) const = default;

    [[nodiscard]] bool test(std::size_t depth) const;
    void set(std::size_t depth);
    void flip(std::size_t depth);
    [[nodiscard]] std::size_t count() const;
    /// Set depths, deepest first (the order in which siblings are consumed).
    [[nodiscard]] std::vector<std::size_t> depths_desc() const;
    /// Smallest number of bytes that still holds the deepest set bit.
    [[nodiscard]] std::size_t encoded_size() const;
};

/// Membership proof for one account.
struct MerklePath {
    Bytes key;
    Coins value = 0;
    BranchMask branch_mask;
    /// Sibling labels ordered from the leaf up to the root.
    std::vector<Digest> siblings;
};

/// Bit `depth` of a digest, most significant bit of byte 0 first.
bool key_bit(const Digest& key_hash, std::size_t depth);

Digest leaf_hash(const Digest& key_hash, Coins value);
Digest branch_hash(std::size_t depth, const Digest& left, const Digest& right);

/// Binary Patricia trie keyed by SHA-256(account id).
///
/// Only real branch nodes are materialized: a branch at depth d splits its subtree on
/// bit d of the key hash and all keys below it agree on bits [0, d). Labels:
///   leaf    H(0x00 || key_hash || value as u64)
///   branch  H(0x01 || depth as u16 || left || right)
/// The root of an empty trie is H(""); the root of a one-entry trie is that leaf's label.
///
/// Values are immutable: set() and erase() return a new trie sharing unchanged nodes.
class AccountTrie {
  public:
    AccountTrie() = default;

    [[nodiscard]] AccountTrie set(ByteView key, Coins value) const;
    /// Removing an absent key returns an identical trie.
    [[nodiscard]] AccountTrie erase(ByteView key) const;
    [[nodiscard]] std::optional<Coins> get(ByteView key) const;
    [[nodiscard]] bool contains(ByteView key) const { return get(key).has_value(); }

    [[nodiscard]] Digest root() const;
    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] bool empty() const { return size_ == 0; }

    /// Throws MerkleError("no such account") for an absent key.
    [[nodiscard]] MerklePath prove(ByteView key) const;

    /// (key, value) bindings in key-hash order.
    [[nodiscard]] std::vector<std::pair<Bytes, Coins>> entries() const;

    struct Node;

  private:
    AccountTrie(std::shared_ptr<const Node> root, std::size_t size)
        : root_(std::move(root)), size_(size) {}

    std::shared_ptr<const Node> root_;
    std::size_t size_ = 0;
};

/// Recomputes the root from (key, value, branch_mask, siblings) and compares.
bool verify_path(const Digest& root, const MerklePath& path);

}  // namespace vulcan::merkle
