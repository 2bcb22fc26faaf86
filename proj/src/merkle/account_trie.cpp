// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/merkle/account_trie.hpp"

#include <bit>

#include "vulcan/common/error.hpp"
#include "vulcan/crypto/hash.hpp"
#include "vulcan/merkle/tx_tree.hpp"

namespace vulcan::merkle {

struct AccountTrie::Node {
    bool leaf = false;
    // Leaf: the account binding. Branch: key_hash of some leaf below, used for prefix checks.
    Digest key_hash;
    Bytes key;
    Coins value = 0;
    std::size_t depth = 0;
    std::shared_ptr<const Node> child[2];
    Digest label;
};

namespace {

using NodePtr = std::shared_ptr<const AccountTrie::Node>;
constexpr std::size_t kKeyBits = 256;

NodePtr make_leaf(const Digest& kh, ByteView key, Coins value) {
    auto n = std::make_shared<AccountTrie::Node>();
    n->leaf = true;
    n->key_hash = kh;
    n->key.assign(key.begin(), key.end());
    n->value = value;
    n->label = leaf_hash(kh, value);
    return n;
}

NodePtr make_branch(std::size_t depth, NodePtr left, NodePtr right) {
    auto n = std::make_shared<AccountTrie::Node>();
    n->depth = depth;
    n->key_hash = left->key_hash;
    n->label = branch_hash(depth, left->label, right->label);
    n->child[0] = std::move(left);
    n->child[1] = std::move(right);
    return n;
}

// First bit position at which a and b differ; kKeyBits if equal.
std::size_t first_diff(const Digest& a, const Digest& b) {
    for (std::size_t i = 0; i < a.bytes.size(); ++i) {
        const auto x = static_cast<std::uint8_t>(a.bytes[i] ^ b.bytes[i]);
        if (x != 0) return i * 8 + static_cast<std::size_t>(std::countl_zero(x));
    }
    return kKeyBits;
}

NodePtr join(std::size_t depth, const Digest& kh, NodePtr fresh, NodePtr existing) {
    if (key_bit(kh, depth)) return make_branch(depth, std::move(existing), std::move(fresh));
    return make_branch(depth, std::move(fresh), std::move(existing));
}

NodePtr insert(const NodePtr& node, const Digest& kh, ByteView key, Coins value, bool& added) {
    if (!node) {
        added = true;
        return make_leaf(kh, key, value);
    }
    const std::size_t diff = first_diff(kh, node->key_hash);
    if (node->leaf) {
        if (diff == kKeyBits) {
            if (node->value == value) return node;
            return make_leaf(kh, key, value);
        }
        added = true;
        return join(diff, kh, make_leaf(kh, key, value), node);
    }
    if (diff < node->depth) {
        added = true;
        return join(diff, kh, make_leaf(kh, key, value), node);
    }
    const int side = key_bit(kh, node->depth) ? 1 : 0;
    NodePtr updated = insert(node->child[side], kh, key, value, added);
    if (updated == node->child[side]) return node;
    return side == 0 ? make_branch(node->depth, std::move(updated), node->child[1])
                     : make_branch(node->depth, node->child[0], std::move(updated));
}

NodePtr remove(const NodePtr& node, const Digest& kh, bool& removed) {
    if (!node) return node;
    if (node->leaf) {
        if (node->key_hash != kh) return node;
        removed = true;
        return nullptr;
    }
    if (first_diff(kh, node->key_hash) < node->depth) return node;
    const int side = key_bit(kh, node->depth) ? 1 : 0;
    NodePtr updated = remove(node->child[side], kh, removed);
    if (!removed) return node;
    if (!updated) return node->child[1 - side];
    return side == 0 ? make_branch(node->depth, std::move(updated), node->child[1])
                     : make_branch(node->depth, node->child[0], std::move(updated));
}

const AccountTrie::Node* find_leaf(const NodePtr& root, const Digest& kh) {
    const AccountTrie::Node* cur = root.get();
    while (cur != nullptr && !cur->leaf) cur = cur->child[key_bit(kh, cur->depth) ? 1 : 0].get();
    if (cur == nullptr || cur->key_hash != kh) return nullptr;
    return cur;
}

void collect(const AccountTrie::Node* node, std::vector<std::pair<Bytes, Coins>>& out) {
    if (node == nullptr) return;
    if (node->leaf) {
        out.emplace_back(node->key, node->value);
        return;
    }
    collect(node->child[0].get(), out);
    collect(node->child[1].get(), out);
}

}  // namespace

bool BranchMask::test(std::size_t depth) const {
    return depth < kKeyBits && ((bits[depth / 8] >> (7 - depth % 8)) & 1U) != 0;
}

void BranchMask::set(std::size_t depth) {
    if (depth >= kKeyBits) throw MerkleError("branch depth out of range");
    bits[depth / 8] = static_cast<std::uint8_t>(bits[depth / 8] | (1U << (7 - depth % 8)));
}

void BranchMask::flip(std::size_t depth) {
    if (depth >= kKeyBits) throw MerkleError("branch depth out of range");
    bits[depth / 8] = static_cast<std::uint8_t>(bits[depth / 8] ^ (1U << (7 - depth % 8)));
}

std::size_t BranchMask::count() const {
    std::size_t c = 0;
    for (auto b : bits) c += static_cast<std::size_t>(std::popcount(b));
    return c;
}

std::vector<std::size_t> BranchMask::depths_desc() const {
    std::vector<std::size_t> out;
    for (std::size_t d = kKeyBits; d-- > 0;) {
        if (test(d)) out.push_back(d);
    }
    return out;
}

std::size_t BranchMask::encoded_size() const {
    for (std::size_t i = bits.size(); i-- > 0;) {
        if (bits[i] != 0) return i + 1;
    }
    return 0;
}

bool key_bit(const Digest& key_hash, std::size_t depth) {
    return ((key_hash.bytes[depth / 8] >> (7 - depth % 8)) & 1U) != 0;
}

Digest leaf_hash(const Digest& key_hash, Coins value) {
    std::array<std::uint8_t, 8> be{};
    for (int i = 0; i < 8; ++i) be[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value >> (56 - 8 * i));
    crypto::Hasher h;
    h.update_u8(0x00).update(key_hash).update(ByteView{be.data(), be.size()});
    return h.finish();
}

Digest branch_hash(std::size_t depth, const Digest& left, const Digest& right) {
    const std::array<std::uint8_t, 2> d{static_cast<std::uint8_t>(depth >> 8),
                                        static_cast<std::uint8_t>(depth)};
    crypto::Hasher h;
    h.update_u8(0x01).update(ByteView{d.data(), d.size()}).update(left).update(right);
    return h.finish();
}

AccountTrie AccountTrie::set(ByteView key, Coins value) const {
    bool added = false;
    NodePtr r = insert(root_, crypto::sha256(key), key, value, added);
    return AccountTrie(std::move(r), size_ + (added ? 1 : 0));
}

AccountTrie AccountTrie::erase(ByteView key) const {
    bool removed = false;
    NodePtr r = remove(root_, crypto::sha256(key), removed);
    if (!removed) return *this;
    return AccountTrie(std::move(r), size_ - 1);
}

std::optional<Coins> AccountTrie::get(ByteView key) const {
    const Node* leaf = find_leaf(root_, crypto::sha256(key));
    if (leaf == nullptr) return std::nullopt;
    return leaf->value;
}

Digest AccountTrie::root() const { return root_ ? root_->label : empty_root(); }

MerklePath AccountTrie::prove(ByteView key) const {
    const Digest kh = crypto::sha256(key);
    MerklePath path;
    std::vector<Digest> top_down;
    const Node* cur = root_.get();
    while (cur != nullptr && !cur->leaf) {
        const int side = key_bit(kh, cur->depth) ? 1 : 0;
        path.branch_mask.set(cur->depth);
        top_down.push_back(cur->child[1 - side]->label);
        cur = cur->child[side].get();
    }
    if (cur == nullptr || cur->key_hash != kh) throw MerkleError("no such account");
    path.key.assign(key.begin(), key.end());
    path.value = cur->value;
    path.siblings.assign(top_down.rbegin(), top_down.rend());
    return path;
}

std::vector<std::pair<Bytes, Coins>> AccountTrie::entries() const {
    std::vector<std::pair<Bytes, Coins>> out;
    out.reserve(size_);
    collect(root_.get(), out);
    return out;
}

bool verify_path(const Digest& root, const MerklePath& path) {
    const auto depths = path.branch_mask.depths_desc();
    if (depths.size() != path.siblings.size()) return false;
    const Digest kh = crypto::sha256(path.key);
    Digest cur = leaf_hash(kh, path.value);
    for (std::size_t i = 0; i < depths.size(); ++i) {
        cur = key_bit(kh, depths[i]) ? branch_hash(depths[i], path.siblings[i], cur)
                                     : branch_hash(depths[i], cur, path.siblings[i]);
    }
    return cur == root;
}

}  // namespace vulcan::merkle
