// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "vulcan/common/error.hpp"
#include "vulcan/ledger/ledger.hpp"

namespace vulcan::ledger {
namespace {

MainchainTx move(const AccountName& from, const AccountName& to, Coins amount, std::string kind = "deposit") {
    MainchainTx tx;
    tx.kind = std::move(kind);
    tx.submitter = from;
    tx.moves.push_back({from, to, amount});
    return tx;
}

TEST(Ledger, DelayIsExact) {
    Ledger l(10);
    l.endow("alice", 500);
    l.submit(move("alice", kFrozen, 100), 0);
    EXPECT_TRUE(l.advance_to(9).empty());
    EXPECT_EQ(l.read("alice", 9), 500U);
    auto done = l.advance_to(10);
    ASSERT_EQ(done.size(), 1U);
    EXPECT_TRUE(done[0].applied);
    EXPECT_EQ(done[0].tx.finalize_time, 10U);
    EXPECT_EQ(l.read("alice", 9), 500U);
    EXPECT_EQ(l.read("alice", 10), 400U);
    EXPECT_EQ(l.balance(kFrozen), 100U);
}

TEST(Ledger, FifoFinalization) {
    Ledger l(10);
    l.endow("a", 10);
    auto first = l.submit(move("a", "b", 1), 0);
    auto second = l.submit(move("a", "b", 2), 1);
    auto at10 = l.advance_to(10);
    ASSERT_EQ(at10.size(), 1U);
    EXPECT_EQ(at10[0].tx.id, first);
    auto at11 = l.advance_to(11);
    ASSERT_EQ(at11.size(), 1U);
    EXPECT_EQ(at11[0].tx.id, second);
    EXPECT_EQ(at11[0].tx.finalize_time, 11U);
}

TEST(Ledger, OverdraftVoidsWholeTransaction) {
    Ledger l(5);
    l.endow("a", 10);
    l.endow(kFrozen, 3);
    MainchainTx tx = move("a", "b", 4);
    tx.moves.push_back({kFrozen, "b", 4});
    l.submit(tx, 0);
    auto done = l.advance_to(5);
    ASSERT_EQ(done.size(), 1U);
    EXPECT_FALSE(done[0].applied);
    EXPECT_FALSE(done[0].void_reason.empty());
    EXPECT_EQ(l.balance("a"), 10U);
    EXPECT_EQ(l.balance("b"), 0U);
}

TEST(Ledger, ReadSemantics) {
    Ledger l(2);
    EXPECT_EQ(l.read("nobody", 0), 0U);
    l.endow("a", 7);
    l.submit(move("a", "b", 7), 0);
    l.advance_to(1);
    EXPECT_EQ(l.read("a", 1), 7U);
    EXPECT_THROW((void)l.read("a", 2), Error);
    l.advance_to(3);
    EXPECT_EQ(l.read("a", 3), 0U);
    EXPECT_EQ(l.read("b", 1), 0U);
    EXPECT_THROW(l.endow("c", 1), Error);
}

// Oracle: supply is fixed at genesis, so the sum of balances never moves.
TEST(Ledger, ConservationUnderRandomTraffic) {
    std::mt19937_64 rng(8);
    Ledger l(3);
    const std::vector<AccountName> names = {"a", "b", "c", kFrozen, kEscrow, kTreasury};
    for (const auto& n : names) l.endow(n, 50);
    const Coins supply = l.supply();
    int voided = 0;
    for (Tick t = 0; t < 400; ++t) {
        l.submit(move(names[rng() % names.size()], names[rng() % names.size()], rng() % 40), t);
        for (const auto& f : l.advance_to(t)) {
            if (!f.applied) ++voided;
            EXPECT_EQ(f.tx.finalize_time, f.tx.submit_time + 3);
        }
        ASSERT_EQ(l.sum_of_balances(), supply);
    }
    EXPECT_GT(voided, 0);
}

}  // namespace
}  // namespace vulcan::ledger
