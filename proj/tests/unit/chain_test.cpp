// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "vulcan/chain/block.hpp"
#include "vulcan/chain/checkpoint.hpp"
#include "vulcan/common/error.hpp"
#include "vulcan/crypto/hash.hpp"
#include "vulcan/merkle/tx_tree.hpp"

namespace vulcan::chain {
namespace {

class ChainTest : public ::testing::Test {
  protected:
    ChainTest() {
        for (std::uint64_t i = 0; i < 6; ++i) users.push_back(scheme.keygen(crypto::derive_seed("user", i)));
        for (std::uint64_t i = 0; i < 7; ++i) {
            validators.push_back(scheme.keygen(crypto::derive_seed("validator", i)));
            roster.push_back(validators.back().public_key);
        }
    }

    const AccountId& id(std::size_t i) const { return users[i].public_key; }
    Transaction pay(std::size_t from, std::size_t to, Coins amount, Epoch tag = 1) const {
        return make_transfer(scheme, users[from], id(to), amount, tag);
    }

    BlockContext ctx(Balances prev, Epoch epoch = 1) const {
        BlockContext c;
        c.scheme = &scheme;
        c.epoch = epoch;
        c.prev_header_hash = crypto::sha256("prev");
        c.last_checkpoint = crypto::sha256("prev");
        c.prev_balances = std::move(prev);
        return c;
    }

    std::vector<Approval> approvals(const Digest& h, std::initializer_list<std::size_t> who) const {
        std::vector<Approval> out;
        for (auto j : who) out.push_back(make_approval(scheme, j, validators[j].secret_key, h));
        return out;
    }

    crypto::TestScheme scheme;
    std::vector<crypto::KeyPair> users;
    std::vector<crypto::KeyPair> validators;
    std::vector<crypto::PublicKey> roster;
};

Coins total(const Balances& b) {
    return std::accumulate(b.begin(), b.end(), Coins{0}, [](Coins s, const auto& kv) { return s + kv.second; });
}

TEST_F(ChainTest, ExecuteSingleTransfer) {
    auto r = execute_queue(scheme, {{id(0), 10}, {id(1), 0}}, {pay(0, 1, 4)});
    EXPECT_EQ(r.post, (Balances{{id(0), 6}, {id(1), 4}}));
    EXPECT_EQ(r.accepted.size(), 1U);
}

TEST_F(ChainTest, ExecuteRejectsOverdraft) {
    Balances prev{{id(0), 3}};
    auto r = execute_queue(scheme, prev, {pay(0, 1, 5)});
    EXPECT_EQ(r.post, prev);
    EXPECT_TRUE(r.accepted.empty());
}

TEST_F(ChainTest, ExecuteIsSequential) {
    auto r = execute_queue(scheme, {{id(0), 5}, {id(1), 5}}, {pay(0, 1, 4), pay(0, 2, 4)});
    ASSERT_EQ(r.accepted.size(), 1U);
    EXPECT_EQ(r.accepted[0].receiver, id(1));
    EXPECT_EQ(r.post.at(id(0)), 1U);
}

TEST_F(ChainTest, ExecuteRejectsSelfTransferBadSignatureZeroAndReplay) {
    Balances prev{{id(0), 10}};
    auto forged = pay(0, 1, 2);
    forged.amount = 3;
    auto zero = pay(0, 1, 0);
    auto once = pay(0, 1, 1);
    auto r = execute_queue(scheme, prev, {pay(0, 0, 1), forged, zero, once, once});
    EXPECT_EQ(r.accepted.size(), 1U);
    auto replay = execute_queue(scheme, prev, {once}, {once.hash()});
    EXPECT_TRUE(replay.accepted.empty());
}

// Oracle: a flat loop over integer balances with the same acceptance rule.
TEST_F(ChainTest, ExecutionConservesAndMatchesFlatReplay) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        Balances prev;
        std::vector<std::int64_t> flat(users.size(), 0);
        for (std::size_t i = 0; i < users.size(); ++i) {
            flat[i] = static_cast<std::int64_t>(rng() % 20);
            prev[id(i)] = static_cast<Coins>(flat[i]);
        }
        std::vector<Transaction> queue;
        for (int k = 0; k < 15; ++k) {
            queue.push_back(pay(rng() % users.size(), rng() % users.size(), 1 + rng() % 10));
        }
        auto r = execute_queue(scheme, prev, queue);
        EXPECT_EQ(total(r.post), total(prev));
        std::size_t accepted = 0;
        std::set<Digest> applied;
        for (const auto& tx : queue) {
            std::size_t s = 0, d = 0;
            while (!(id(s) == tx.sender)) ++s;
            while (!(id(d) == tx.receiver)) ++d;
            const auto amt = static_cast<std::int64_t>(tx.amount);
            if (s == d || flat[s] < amt || applied.contains(tx.hash())) continue;
            applied.insert(tx.hash());
            flat[s] -= amt;
            flat[d] += amt;
            ++accepted;
        }
        EXPECT_EQ(accepted, r.accepted.size());
        for (std::size_t i = 0; i < users.size(); ++i) EXPECT_EQ(static_cast<std::int64_t>(r.post[id(i)]), flat[i]);
    }
}

TEST_F(ChainTest, EmptyBlockKeepsPreviousRoot) {
    Balances prev{{id(0), 10}, {id(1), 3}};
    auto b = build_block(ctx(prev), {});
    EXPECT_EQ(b.header.tx_root, crypto::sha256(""));
    EXPECT_EQ(b.header.account_root, build_trie(prev).root());
    EXPECT_TRUE(validate_block(b, ctx(prev)));
}

TEST_F(ChainTest, BuildMatchesIndependentTrees) {
    Balances prev{{id(0), 10}, {id(1), 10}, {id(2), 10}};
    std::vector<Transaction> q = {pay(0, 1, 1), pay(1, 2, 2), pay(2, 0, 3)};
    auto b = build_block(ctx(prev), q);
    std::vector<Digest> leaves;
    for (const auto& tx : q) leaves.push_back(tx.hash());
    EXPECT_EQ(b.header.tx_root, merkle::TxTree::build(leaves).root());
    merkle::AccountTrie t;
    t = t.set(id(2).bytes, 9).set(id(1).bytes, 9).set(id(0).bytes, 12);
    EXPECT_EQ(b.header.account_root, t.root());
    EXPECT_EQ(build_block(ctx(prev), q).hash(), b.hash());
}

TEST_F(ChainTest, BuildFiltersEpochTagsAndReplays) {
    Balances prev{{id(0), 10}};
    auto c = ctx(prev, 5);
    auto old = pay(0, 1, 1, 3);
    auto prior = pay(0, 1, 1, 4);
    auto current = pay(0, 1, 2, 5);
    auto future = pay(0, 1, 1, 6);
    auto replayed = pay(0, 1, 3, 5);
    c.prev_tx_hashes.insert(replayed.hash());
    auto b = build_block(c, {old, prior, current, future, replayed});
    EXPECT_EQ(b.txs, (std::vector<Transaction>{prior, current}));
    EXPECT_TRUE(validate_block(b, c));
}

TEST_F(ChainTest, AdjustmentsOpenTheBlock) {
    Balances prev{{id(0), 10}, {id(1), 5}};
    auto c = ctx(prev);
    c.adjustments = {make_adjustment(TxKind::Deposit, id(2), 7, 0),
                     make_adjustment(TxKind::Withdraw, id(0), 4, 0),
                     make_adjustment(TxKind::Exit, id(1), 5, 0)};
    auto b = build_block(c, {pay(0, 2, 6), pay(2, 1, 1)});
    EXPECT_EQ(b.txs.size(), 5U);
    EXPECT_EQ(b.accounts, (Balances{{id(0), 0}, {id(1), 1}, {id(2), 12}}));
    EXPECT_TRUE(validate_block(b, c));

    auto missing = c;
    missing.adjustments.pop_back();
    EXPECT_FALSE(validate_block(b, missing));

    auto bad = c;
    bad.adjustments[2].amount = 4;
    EXPECT_THROW((void)build_block(bad, {}), ChainError);
    EXPECT_FALSE(validate_block(b, bad));
}

TEST_F(ChainTest, ValidateRejectsInflatedBalance) {
    Balances prev{{id(0), 10}, {id(1), 0}};
    auto b = build_block(ctx(prev), {pay(0, 1, 4)});
    ASSERT_TRUE(validate_block(b, ctx(prev)));
    auto t = b;
    t.accounts[id(1)] += 1;
    t.trie = build_trie(t.accounts);
    t.header.account_root = t.trie.root();
    EXPECT_FALSE(validate_block(t, ctx(prev)));
}

TEST_F(ChainTest, ValidateRejectsStaleLastCheckpoint) {
    Balances prev{{id(0), 10}};
    auto c = ctx(prev, 3);
    auto b = build_block(c, {});
    auto stale = c;
    stale.last_checkpoint = crypto::sha256("checkpoint of epoch 1");
    auto forged = build_block(stale, {});
    EXPECT_FALSE(validate_block(forged, c));
}

TEST_F(ChainTest, ValidateRejectsInvalidIncludedTransfer) {
    Balances prev{{id(0), 3}};
    auto b = build_block(ctx(prev), {});
    b.txs.push_back(pay(0, 1, 5));
    b.header.tx_root = compute_tx_root(b.txs);
    EXPECT_FALSE(validate_block(b, ctx(prev)));
}

TEST_F(ChainTest, SingleFieldMutationSweep) {
    std::mt19937_64 rng(4);
    Balances prev;
    for (std::size_t i = 0; i < users.size(); ++i) prev[id(i)] = 20;
    int survived = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Transaction> q;
        for (int k = 0; k < 4; ++k) q.push_back(pay(rng() % 6, (rng() % 5 + 1 + k) % 6, 1 + rng() % 5));
        const auto c = ctx(prev);
        auto b = build_block(c, q);
        ASSERT_TRUE(validate_block(b, c));
        auto m = b;
        switch (trial % 7) {
            case 0: m.header.epoch += 1; break;
            case 1: m.header.prev_block_hash.bytes[rng() % 32] ^= 1; break;
            case 2: m.header.last_checkpoint.bytes[rng() % 32] ^= 2; break;
            case 3: m.header.tx_root.bytes[rng() % 32] ^= 4; break;
            case 4: m.header.account_root.bytes[rng() % 32] ^= 8; break;
            case 5: m.accounts[id(rng() % 6)] += 1 + rng() % 3; break;
            default:
                if (m.txs.empty()) {
                    m.accounts[id(0)] += 1;
                } else {
                    m.txs[rng() % m.txs.size()].amount += 1;
                }
        }
        if (validate_block(m, c)) ++survived;
    }
    EXPECT_EQ(survived, 0);
}

TEST(Quorum, Values) {
    EXPECT_EQ(quorum(5), 3U);
    EXPECT_EQ(quorum(1), 1U);
    EXPECT_EQ(quorum(4), 3U);
    for (std::size_t f = 0; f <= 10; ++f) EXPECT_EQ(quorum(2 * f + 1), f + 1);
}

TEST_F(ChainTest, CheckpointWorkedExample) {
    const Digest h = crypto::sha256("block");
    std::span<const crypto::PublicKey> five(roster.data(), 5);
    auto a = approvals(h, {1, 3, 4});
    auto cp = make_checkpoint(scheme, h, a, five);
    EXPECT_EQ(cp.index.value, 11U);
    EXPECT_TRUE(verify_checkpoint(scheme, cp, five));

    std::span<const crypto::PublicKey> three(roster.data(), 3);
    EXPECT_EQ(make_checkpoint(scheme, h, approvals(h, {0, 1, 2}), three).index.value, 7U);
    EXPECT_THROW((void)make_checkpoint(scheme, h, approvals(h, {0, 1}), five), ChainError);
}

TEST_F(ChainTest, CheckpointIgnoresDuplicatesAndForeignApprovals) {
    const Digest h = crypto::sha256("block");
    std::span<const crypto::PublicKey> five(roster.data(), 5);
    auto a = approvals(h, {0, 0, 2});
    auto other = approvals(crypto::sha256("other"), {3});
    a.insert(a.end(), other.begin(), other.end());
    EXPECT_THROW((void)make_checkpoint(scheme, h, a, five), ChainError);
    a.push_back(make_approval(scheme, 4, validators[3].secret_key, h));
    EXPECT_THROW((void)make_checkpoint(scheme, h, a, five), ChainError);
}

TEST_F(ChainTest, VerifyRejectsOverclaimedIndex) {
    const Digest h = crypto::sha256("block");
    std::span<const crypto::PublicKey> five(roster.data(), 5);
    auto a = approvals(h, {1, 3});
    std::vector<crypto::PublicKey> keys{roster[1], roster[3]};
    std::vector<crypto::Signature> sigs{a[0].signature, a[1].signature};
    Checkpoint forged{h, scheme.combine_same(approval_message(h), keys, sigs),
                      crypto::encode_signers({1, 3, 4}, 5)};
    EXPECT_FALSE(verify_checkpoint(scheme, forged, five));
    forged.index = crypto::encode_signers({1, 3}, 5);
    EXPECT_FALSE(verify_checkpoint(scheme, forged, five));
}

TEST_F(ChainTest, VerifyRejectsAnySubQuorumIndex) {
    const Digest h = crypto::sha256("block");
    for (std::size_t f = 0; f <= 3; ++f) {
        const std::size_t n = 2 * f + 1;
        std::span<const crypto::PublicKey> r(roster.data(), n);
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            std::set<std::size_t> s;
            for (std::size_t j = 0; j < n; ++j) {
                if ((mask >> j) & 1U) s.insert(j);
            }
            std::vector<Approval> a;
            std::vector<crypto::PublicKey> keys;
            std::vector<crypto::Signature> sigs;
            for (auto j : s) {
                a.push_back(make_approval(scheme, j, validators[j].secret_key, h));
                keys.push_back(roster[j]);
                sigs.push_back(a.back().signature);
            }
            if (s.size() <= f) {
                EXPECT_THROW((void)make_checkpoint(scheme, h, a, r), ChainError);
                if (!s.empty()) {
                    Checkpoint cp{h, scheme.combine_same(approval_message(h), keys, sigs), crypto::encode_signers(s, n)};
                    EXPECT_FALSE(verify_checkpoint(scheme, cp, r));
                }
            } else {
                EXPECT_TRUE(verify_checkpoint(scheme, make_checkpoint(scheme, h, a, r), r));
            }
        }
    }
}

TEST_F(ChainTest, ProofOfPossession) {
    Balances prev{{id(0), 10}, {id(1), 2}, {id(2), 7}};
    auto b = build_block(ctx(prev), {pay(0, 1, 4)});
    auto cp = make_checkpoint(scheme, b.hash(), approvals(b.hash(), {0, 1, 2}),
                              std::span<const crypto::PublicKey>(roster.data(), 5));
    auto pop = make_pop(id(0), b);
    EXPECT_EQ(pop.balance, 6U);
    EXPECT_TRUE(verify_pop(cp, pop, 6));
    EXPECT_TRUE(verify_pop(cp, pop, 1));
    EXPECT_FALSE(verify_pop(cp, pop, 7));
    auto lying = pop;
    lying.balance = 7;
    lying.path.value = 7;
    EXPECT_FALSE(verify_pop(cp, lying, 7));

    auto next_ctx = ctx(b.accounts, 2);
    next_ctx.prev_header_hash = b.hash();
    auto b2 = build_block(next_ctx, {pay(0, 2, 1)});
    auto cp2 = make_checkpoint(scheme, b2.hash(), approvals(b2.hash(), {0, 1, 2}),
                               std::span<const crypto::PublicKey>(roster.data(), 5));
    EXPECT_FALSE(verify_pop(cp2, pop, 1));
    EXPECT_THROW((void)make_pop(id(5), b), ChainError);
}

TEST_F(ChainTest, CanonicalEncodingIsStable) {
    auto tx = pay(0, 1, 4, 2);
    auto again = make_transfer(scheme, users[0], id(1), 4, 2);
    EXPECT_EQ(tx.encode(), again.encode());
    auto other = tx;
    other.epoch_tag = 3;
    EXPECT_NE(other.signing_bytes(), tx.signing_bytes());
    EXPECT_NE(make_adjustment(TxKind::Deposit, id(0), 1, 0).hash(),
              make_adjustment(TxKind::Withdraw, id(0), 1, 0).hash());
    EXPECT_NE(vote_out_message(1, 0, id(0)), receipt_message(1, tx.hash()));
}

}  // namespace
}  // namespace vulcan::chain
