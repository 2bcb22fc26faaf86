// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "vulcan/common/error.hpp"
#include "vulcan/crypto/hash.hpp"
#include "vulcan/merkle/account_trie.hpp"
#include "vulcan/merkle/tx_tree.hpp"

namespace vulcan::merkle {
namespace {

using crypto::sha256;

Digest h(int i) { return sha256("tx" + std::to_string(i)); }

std::vector<Digest> leaves(int count) {
    std::vector<Digest> out;
    for (int i = 0; i < count; ++i) out.push_back(h(i));
    return out;
}

// Recursive reference: pad an odd level with its last node, pair, recurse. The bottom
// level is always paired at least once.
Digest oracle_level(std::vector<Digest> level, bool bottom) {
    if (level.size() == 1 && !bottom) return level.front();
    if (level.size() % 2 == 1) level.push_back(level.back());
    std::vector<Digest> next;
    for (std::size_t i = 0; i < level.size(); i += 2) {
        crypto::Hasher hs;
        hs.update_u8(1).update(level[i]).update(level[i + 1]);
        next.push_back(hs.finish());
    }
    return oracle_level(std::move(next), false);
}

Digest oracle_root(const std::vector<Digest>& l) { return l.empty() ? sha256("") : oracle_level(l, true); }

TEST(TxTree, EmptyTreeHasSentinelRoot) {
    auto t = TxTree::build({});
    EXPECT_EQ(t.root(), sha256(""));
    EXPECT_EQ(t.root().hex(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_THROW((void)t.prove(0), MerkleError);
}

TEST(TxTree, SingleLeafPairsWithItself) {
    auto t = TxTree::build({h(1)});
    crypto::Hasher hs;
    hs.update_u8(0x01).update(h(1)).update(h(1));
    EXPECT_EQ(t.root(), hs.finish());
    auto p = t.prove(0);
    ASSERT_EQ(p.siblings.size(), 1U);
    EXPECT_EQ(p.siblings[0], h(1));
    EXPECT_TRUE(verify_tx_proof(t.root(), h(1), p));
}

TEST(TxTree, FiveLeavesByHand) {
    auto l = leaves(5);
    const Digest a = hash_pair(l[0], l[1]);
    const Digest b = hash_pair(l[2], l[3]);
    const Digest c = hash_pair(l[4], l[4]);
    const Digest ab = hash_pair(a, b);
    const Digest cc = hash_pair(c, c);
    EXPECT_EQ(TxTree::build(l).root(), hash_pair(ab, cc));
}

TEST(TxTree, MatchesReferenceAcrossSizes) {
    for (int count = 0; count <= 40; ++count) {
        EXPECT_EQ(TxTree::build(leaves(count)).root(), oracle_root(leaves(count))) << count;
    }
}

TEST(TxTree, EveryIndexProvesAndMutationsFail) {
    for (int count : {1, 2, 3, 5, 8, 13}) {
        auto t = TxTree::build(leaves(count));
        for (int i = 0; i < count; ++i) {
            auto p = t.prove(static_cast<std::size_t>(i));
            ASSERT_TRUE(verify_tx_proof(t.root(), h(i), p));
            EXPECT_FALSE(verify_tx_proof(t.root(), h(i + 100), p));
            for (std::size_t s = 0; s < p.siblings.size(); ++s) {
                auto bad = p;
                bad.siblings[s].bytes[0] ^= 0x80;
                EXPECT_FALSE(verify_tx_proof(t.root(), h(i), bad));
            }
            auto moved = p;
            moved.leaf_index += 1ULL << p.siblings.size();
            EXPECT_FALSE(verify_tx_proof(t.root(), h(i), moved));
        }
        EXPECT_THROW((void)t.prove(static_cast<std::size_t>(count)), MerkleError);
    }
}

Bytes key(std::uint64_t i) {
    Bytes k(8);
    for (int b = 0; b < 8; ++b) k[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(i >> (8 * b));
    return k;
}

// Reference trie: rebuild from sorted (key hash, value) bindings, splitting at the first
// bit where the remaining set disagrees.
Digest oracle_node(const std::vector<std::pair<Digest, Coins>>& s, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return leaf_hash(s[lo].first, s[lo].second);
    for (std::size_t d = 0; d < 256; ++d) {
        const bool first = key_bit(s[lo].first, d);
        const bool last = key_bit(s[hi - 1].first, d);
        if (first == last) continue;
        std::size_t mid = lo;
        while (!key_bit(s[mid].first, d)) ++mid;
        return branch_hash(d, oracle_node(s, lo, mid), oracle_node(s, mid, hi));
    }
    throw std::logic_error("duplicate key hash");
}

Digest oracle_trie_root(const std::map<Bytes, Coins>& m) {
    if (m.empty()) return sha256("");
    std::vector<std::pair<Digest, Coins>> s;
    for (const auto& [k, v] : m) s.emplace_back(sha256(k), v);
    std::sort(s.begin(), s.end());
    return oracle_node(s, 0, s.size());
}

TEST(AccountTrie, SetGetAndIdempotence) {
    AccountTrie t;
    EXPECT_EQ(t.root(), sha256(""));
    auto t1 = t.set(key(1), 5);
    EXPECT_EQ(t1.get(key(1)), 5U);
    EXPECT_FALSE(t1.get(key(2)).has_value());
    EXPECT_EQ(t1.set(key(1), 5).root(), t1.root());
    EXPECT_NE(t1.set(key(1), 6).root(), t1.root());
    auto zero = t1.set(key(1), 0);
    EXPECT_TRUE(zero.contains(key(1)));
    EXPECT_EQ(zero.size(), 1U);
    EXPECT_TRUE(t.empty());
}

TEST(AccountTrie, InsertionOrderIndependent) {
    std::vector<std::pair<Bytes, Coins>> kv = {{key(1), 1}, {key(2), 2}, {key(3), 3}};
    Digest first;
    std::sort(kv.begin(), kv.end());
    bool have = false;
    do {
        AccountTrie t;
        for (const auto& [k, v] : kv) t = t.set(k, v);
        if (!have) first = t.root();
        have = true;
        EXPECT_EQ(t.root(), first);
    } while (std::next_permutation(kv.begin(), kv.end()));

    std::mt19937_64 rng(3);
    std::vector<std::pair<Bytes, Coins>> many;
    for (std::uint64_t i = 0; i < 500; ++i) many.emplace_back(key(i), rng() % 1000);
    AccountTrie a;
    for (const auto& [k, v] : many) a = a.set(k, v);
    std::shuffle(many.begin(), many.end(), rng);
    AccountTrie b;
    for (const auto& [k, v] : many) b = b.set(k, v);
    EXPECT_EQ(a.root(), b.root());
}

TEST(AccountTrie, MatchesReferenceUpTo64Entries) {
    std::mt19937_64 rng(11);
    std::map<Bytes, Coins> model;
    AccountTrie t;
    for (std::uint64_t i = 0; i < 64; ++i) {
        const Coins v = rng() % 100;
        model[key(i)] = v;
        t = t.set(key(i), v);
        ASSERT_EQ(t.root(), oracle_trie_root(model)) << i;
    }
    // Erase in random order, still matching.
    std::vector<std::uint64_t> order(64);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
        model.erase(key(i));
        t = t.erase(key(i));
        ASSERT_EQ(t.root(), oracle_trie_root(model));
        ASSERT_EQ(t.size(), model.size());
    }
}

TEST(AccountTrie, SingletonProofHasNoSiblings) {
    auto t = AccountTrie{}.set(key(9), 42);
    auto p = t.prove(key(9));
    EXPECT_TRUE(p.siblings.empty());
    EXPECT_EQ(p.branch_mask.count(), 0U);
    EXPECT_EQ(t.root(), leaf_hash(sha256(key(9)), 42));
    EXPECT_TRUE(verify_path(t.root(), p));
    EXPECT_THROW((void)t.prove(key(10)), MerkleError);
    try {
        (void)t.prove(key(10));
    } catch (const MerkleError& e) {
        EXPECT_STREQ(e.what(), "no such account");
    }
}

TEST(AccountTrie, TenThousandAccountsSampledProofs) {
    std::mt19937_64 rng(5);
    AccountTrie t;
    for (std::uint64_t i = 0; i < 10'000; ++i) t = t.set(key(rng()), rng() % 1'000'000);
    auto all = t.entries();
    ASSERT_EQ(all.size(), 10'000U);
    for (int s = 0; s < 100; ++s) {
        const auto& [k, v] = all[rng() % all.size()];
        auto p = t.prove(k);
        EXPECT_EQ(p.value, v);
        EXPECT_TRUE(verify_path(t.root(), p));
        auto bumped = p;
        bumped.value += 1;
        EXPECT_FALSE(verify_path(t.root(), bumped));
    }
}

TEST(AccountTrie, ProofMutationSweep) {
    std::mt19937_64 rng(21);
    AccountTrie t;
    for (std::uint64_t i = 0; i < (1U << 14); ++i) t = t.set(key(i), rng() % 5000);
    const Digest root = t.root();
    int false_accepts = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto p = t.prove(key(rng() % (1U << 14)));
        switch (trial % 3) {
            case 0:
                p.value ^= 1ULL << (rng() % 64);
                break;
            case 1:
                p.branch_mask.flip(rng() % 256);
                break;
            default: {
                auto& s = p.siblings[rng() % p.siblings.size()];
                s.bytes[rng() % 32] ^= static_cast<std::uint8_t>(1U << (rng() % 8));
            }
        }
        if (verify_path(root, p)) ++false_accepts;
    }
    EXPECT_EQ(false_accepts, 0);
}

TEST(AccountTrie, MeanSiblingsGrowsLogarithmically) {
    std::mt19937_64 rng(77);
    double prev = 0;
    for (unsigned e = 6; e <= 14; ++e) {
        const std::size_t m = std::size_t{1} << e;
        AccountTrie t;
        std::vector<Bytes> ks;
        for (std::size_t i = 0; i < m; ++i) {
            ks.push_back(key(rng()));
            t = t.set(ks.back(), 1);
        }
        double total = 0;
        for (const auto& k : ks) total += static_cast<double>(t.prove(k).siblings.size());
        const double mean = total / static_cast<double>(m);
        EXPECT_GE(mean, prev);
        EXPECT_NEAR(mean, static_cast<double>(e), 1.5);
        prev = mean;
    }
}

TEST(AccountTrie, StructuralSharingLeavesOldVersionIntact) {
    auto a = AccountTrie{}.set(key(1), 1).set(key(2), 2);
    const Digest ra = a.root();
    auto b = a.set(key(1), 100).erase(key(2));
    EXPECT_EQ(a.root(), ra);
    EXPECT_EQ(a.get(key(2)), 2U);
    EXPECT_EQ(b.get(key(1)), 100U);
    EXPECT_EQ(b.size(), 1U);
    EXPECT_EQ(a.erase(key(3)).root(), ra);
}

}  // namespace
}  // namespace vulcan::merkle
