// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "vulcan/chain/block.hpp"
#include "vulcan/common/error.hpp"
#include "vulcan/contract/contract.hpp"
#include "vulcan/crypto/hash.hpp"

namespace vulcan::contract {
namespace {

using chain::Balances;
using chain::Block;

constexpr Tick kDelta = 10;

class ContractTest : public ::testing::Test {
  protected:
    void SetUp() override { deploy(5, 2); }

    void deploy(std::size_t n, std::size_t f) {
        keys.clear();
        std::vector<crypto::PublicKey> roster;
        for (std::size_t i = 0; i < n; ++i) {
            auto kp = scheme.keygen(crypto::derive_seed("validator", i));
            keys[kp.public_key] = kp;
            roster.push_back(kp.public_key);
        }
        for (std::uint64_t i = 0; i < 4; ++i) clients.push_back(scheme.keygen(crypto::derive_seed("client", i)));
        ContractConfig cfg{n, f, kDelta, 10, ~Epoch{0}};
        c = std::make_unique<Contract>(cfg, scheme, roster, [this](std::size_t slot) {
            auto kp = scheme.keygen(crypto::derive_seed("replacement", ++replacements * 100 + slot));
            keys[kp.public_key] = kp;
            return kp.public_key;
        });
        last.reset();
        finalized_blocks.clear();
        now = 0;
    }

    const chain::AccountId& id(std::size_t i) const { return clients[i].public_key; }

    Outputs call(const Call& x) { return c->apply(x, now, now); }

    // Builds the honest block for the contract's current epoch.
    Block next_block(const std::vector<chain::Transaction>& queue = {}) {
        chain::BlockContext ctx;
        ctx.scheme = &scheme;
        ctx.epoch = c->epoch();
        if (!finalized_blocks.empty()) {
            const Block& prev = finalized_blocks.back();
            ctx.prev_header_hash = prev.hash();
            ctx.last_checkpoint = c->prior_checkpoint();
            ctx.prev_balances = prev.accounts;
        }
        ctx.adjustments = c->adjustments_for_block(c->epoch());
        return chain::build_block(ctx, queue);
    }

    chain::Checkpoint sign(const Block& b, std::vector<std::size_t> who) {
        std::vector<chain::Approval> a;
        for (auto j : who) {
            a.push_back(chain::make_approval(scheme, j, keys.at(c->roster()[j]).secret_key, b.hash()));
        }
        return chain::make_checkpoint(scheme, b.hash(), a, c->roster());
    }

    crypto::PublicKey leader() const { return c->roster()[c->leader_slot()]; }

    Outputs commit(const Block& b) {
        last = b;
        return call(CommitCall{leader(), c->epoch(), sign(b, {0, 1, 2})});
    }

    Outputs expire(bool in_flight = false) {
        now = c->pending()->deadline;
        auto out = c->on_tick(now, in_flight);
        if (!c->pending() && last) finalized_blocks.push_back(*last);
        return out;
    }

    // Deposits for clients, then finalizes one empty epoch so the deposits are in a block.
    void fund(std::vector<std::pair<std::size_t, Coins>> amounts) {
        for (auto [i, x] : amounts) call(DepositCall{id(i), x});
        commit(next_block());
        expire();
        commit(next_block());
        expire();
    }

    static bool has(const Outputs& out, NoticeKind kind) {
        return std::any_of(out.notices.begin(), out.notices.end(), [&](const Notice& n) { return n.kind == kind; });
    }

    crypto::TestScheme scheme;
    std::map<crypto::PublicKey, crypto::KeyPair> keys;
    std::vector<crypto::KeyPair> clients;
    std::unique_ptr<Contract> c;
    std::optional<Block> last;
    std::vector<Block> finalized_blocks;
    std::uint64_t replacements = 0;
    Tick now = 0;
};

TEST_F(ContractTest, DeployChecksCommitteeSize) {
    EXPECT_THROW(deploy(4, 2), ContractError);
    EXPECT_NO_THROW(deploy(1, 0));
    EXPECT_NO_THROW(deploy(5, 2));
    EXPECT_EQ(c->epoch(), 0U);
    EXPECT_TRUE(c->clients().empty());
}

TEST_F(ContractTest, Deposits) {
    auto out = call(DepositCall{id(0), 100});
    EXPECT_TRUE(has(out, NoticeKind::DepositReceived));
    EXPECT_TRUE(c->clients().contains(id(0)));
    call(DepositCall{id(0), 50});
    EXPECT_EQ(c->total_balance(), 150U);
    commit(next_block());
    expire();
    auto b1 = next_block();
    EXPECT_EQ(b1.accounts.at(id(0)), 150U);
    EXPECT_TRUE(has(call(DepositCall{id(1), 0}), NoticeKind::CannotDeposit));
}

TEST_F(ContractTest, CommitRules) {
    auto b = next_block();
    auto cp = sign(b, {0, 1, 2});
    auto follower = c->roster()[1];
    EXPECT_TRUE(has(call(CommitCall{follower, 0, cp}), NoticeKind::CommitRejected));
    EXPECT_TRUE(has(call(CommitCall{leader(), 3, cp}), NoticeKind::CommitRejected));
    now = 7;
    EXPECT_TRUE(has(call(CommitCall{leader(), 0, cp}), NoticeKind::BlockReceived));
    ASSERT_TRUE(c->pending());
    EXPECT_EQ(c->pending()->deadline, 7 + kDelta);
    auto again = call(CommitCall{leader(), 0, cp});
    EXPECT_TRUE(has(again, NoticeKind::CommitRejected));
}

TEST_F(ContractTest, QuietPendingTermFinalizes) {
    commit(next_block());
    EXPECT_TRUE(c->on_tick(c->pending()->deadline - 1, false).notices.empty());
    auto out = expire();
    EXPECT_TRUE(has(out, NoticeKind::EpochChanged));
    EXPECT_EQ(c->epoch(), 1U);
    EXPECT_EQ(c->finalized().size(), 1U);
    EXPECT_EQ(c->leader_slot(), 1U);
}

TEST_F(ContractTest, ExpiryDeferredWhileDisputeInFlight) {
    commit(next_block());
    const Tick deadline = c->pending()->deadline;
    EXPECT_TRUE(c->on_tick(deadline, true).notices.empty());
    EXPECT_TRUE(c->pending());
    EXPECT_TRUE(has(c->on_tick(deadline + 3, false), NoticeKind::EpochChanged));
}

TEST_F(ContractTest, WithdrawalWorkedExample) {
    fund({{0, 10}});
    auto b = next_block();
    commit(b);
    auto pop = chain::make_pop(id(0), b);
    auto out = call(WithdrawCall{id(0), 4, pop});
    ASSERT_TRUE(has(out, NoticeKind::WithdrawOk));
    EXPECT_TRUE(has(call(WithdrawCall{id(0), 1, pop}), NoticeKind::WithdrawNotOk));
    auto fin = expire();
    ASSERT_EQ(fin.releases.size(), 1U);
    EXPECT_EQ(fin.releases[0].amount, 4U);
    EXPECT_EQ(*fin.releases[0].to, id(0));
    EXPECT_EQ(c->total_balance(), 6U);
    EXPECT_EQ(next_block().accounts.at(id(0)), 6U);
}

TEST_F(ContractTest, WithdrawalRejections) {
    fund({{0, 10}});
    auto old_pop = chain::make_pop(id(0), finalized_blocks.back());
    EXPECT_TRUE(has(call(WithdrawCall{id(0), 4, old_pop}), NoticeKind::WithdrawNotOk));
    auto b = next_block();
    commit(b);
    EXPECT_TRUE(has(call(WithdrawCall{id(0), 4, old_pop}), NoticeKind::WithdrawNotOk));
    auto pop = chain::make_pop(id(0), b);
    EXPECT_TRUE(has(call(WithdrawCall{id(0), 0, pop}), NoticeKind::WithdrawNotOk));
    EXPECT_TRUE(has(call(WithdrawCall{id(0), 11, pop}), NoticeKind::WithdrawNotOk));
    EXPECT_TRUE(has(call(WithdrawCall{id(1), 1, pop}), NoticeKind::WithdrawNotOk));
    EXPECT_TRUE(has(call(WithdrawCall{id(0), 10, pop}), NoticeKind::WithdrawOk));
}

TEST_F(ContractTest, LastExitEndsExecution) {
    fund({{0, 10}});
    auto b = next_block();
    commit(b);
    auto out = call(ExitCall{id(0), chain::make_pop(id(0), b)});
    ASSERT_TRUE(has(out, NoticeKind::ExitOk));
    auto fin = expire();
    EXPECT_TRUE(has(fin, NoticeKind::ExecutionEnd));
    ASSERT_TRUE(c->execution_end());
    EXPECT_TRUE(*c->execution_end());
    EXPECT_EQ(c->total_balance(), 0U);
    EXPECT_TRUE(c->halted());
}

TEST_F(ContractTest, ExitRejections) {
    fund({{0, 10}, {1, 5}});
    auto b = next_block();
    commit(b);
    auto pop = chain::make_pop(id(0), b);
    auto tampered = pop;
    tampered.path.siblings[0].bytes[0] ^= 1;
    EXPECT_TRUE(has(call(ExitCall{id(0), tampered}), NoticeKind::CannotExit));
    EXPECT_TRUE(has(call(ExitCall{id(2), pop}), NoticeKind::CannotExit));
    EXPECT_TRUE(has(call(ExitCall{id(1), pop}), NoticeKind::CannotExit));
}

TEST_F(ContractTest, ForgedCheckpointChallengeReplacesLeader) {
    fund({{0, 10}});
    const Epoch e = c->epoch();
    auto b = next_block();
    const std::size_t slot = c->leader_slot();
    const auto old_leader = leader();
    // Only the leader signed, but the index claims a quorum.
    auto lone = chain::make_approval(scheme, slot, keys.at(old_leader).secret_key, b.hash());
    chain::Checkpoint forged{b.hash(), lone.signature.bytes, crypto::encode_signers({0, 1, slot}, 5)};
    call(CommitCall{old_leader, e, forged});
    auto pop = chain::make_pop(id(0), b);
    ASSERT_TRUE(has(call(WithdrawCall{id(0), 3, pop}), NoticeKind::WithdrawOk));

    auto out = call(CheckpointChallenge{c->roster()[0], e, c->prior_checkpoint(), forged, 10});
    EXPECT_TRUE(has(out, NoticeKind::ChallengeValid));
    EXPECT_TRUE(has(out, NoticeKind::LeaderReplaced));
    EXPECT_FALSE(c->pending());
    EXPECT_EQ(c->epoch(), e);
    EXPECT_NE(leader(), old_leader);
    EXPECT_EQ(c->roster().size(), 5U);
    ASSERT_EQ(out.releases.size(), 1U);
    EXPECT_EQ(out.releases[0].from, Pot::Escrow);
    EXPECT_TRUE(out.releases[0].to.has_value());
    // The withdrawal verified against the voided checkpoint is gone.
    EXPECT_TRUE(c->adjustments_for_block(e + 1).empty());
    EXPECT_TRUE(c->records().back().cancelled);

    // The retried epoch finalizes under the replacement.
    commit(next_block());
    expire();
    EXPECT_EQ(c->finalized().size(), e + 1);
}

TEST_F(ContractTest, HonestCheckpointChallengeForfeitsWager) {
    commit(next_block());
    const Tick deadline = c->pending()->deadline;
    auto out = call(CheckpointChallenge{c->roster()[3], 0, Digest{}, c->pending()->cp, 10});
    EXPECT_TRUE(has(out, NoticeKind::ChallengeInvalid));
    ASSERT_EQ(out.releases.size(), 1U);
    EXPECT_FALSE(out.releases[0].to.has_value());
    EXPECT_EQ(c->pending()->deadline, deadline + kDelta);
    EXPECT_TRUE(c->on_tick(deadline, false).notices.empty());
}

TEST_F(ContractTest, StaleChallengeIsRefunded) {
    auto b = next_block();
    auto cp = sign(b, {0, 1, 2});
    auto out = call(CheckpointChallenge{c->roster()[3], 0, Digest{}, cp, 10});
    EXPECT_TRUE(has(out, NoticeKind::ChallengeStale));
    ASSERT_EQ(out.releases.size(), 1U);
    EXPECT_TRUE(out.releases[0].to.has_value());
}

LeaderChallenge votes(const ContractTest& t, const Contract& c, const crypto::TestScheme& scheme,
                      const std::map<crypto::PublicKey, crypto::KeyPair>& keys, std::set<std::size_t> voters) {
    (void)t;
    const auto slot = c.leader_slot();
    const auto msg = chain::vote_out_message(c.epoch(), slot, c.roster()[slot]);
    std::vector<crypto::PublicKey> pks;
    std::vector<crypto::Signature> sigs;
    for (auto j : voters) {
        pks.push_back(c.roster()[j]);
        sigs.push_back(scheme.sign(msg, keys.at(c.roster()[j]).secret_key));
    }
    return {c.roster()[*voters.begin()], c.epoch(), slot, c.roster()[slot],
            scheme.combine_same(msg, pks, sigs), crypto::encode_signers(voters, c.roster().size()), 10};
}

TEST_F(ContractTest, LeaderVoteOutNeedsMoreThanFVotes) {
    auto weak = votes(*this, *c, scheme, keys, {1, 2});
    EXPECT_TRUE(has(call(weak), NoticeKind::ChallengeInvalid));
    auto strong = votes(*this, *c, scheme, keys, {1, 2, 3});
    auto out = call(strong);
    EXPECT_TRUE(has(out, NoticeKind::ChallengeValid));
    EXPECT_TRUE(has(out, NoticeKind::LeaderReplaced));
    EXPECT_EQ(c->epoch(), 0U);
    EXPECT_TRUE(has(call(strong), NoticeKind::ChallengeStale));
    auto forged = strong;
    forged.leader = c->roster()[0];
    forged.index = crypto::encode_signers({1, 2, 4}, 5);
    EXPECT_TRUE(has(call(forged), NoticeKind::ChallengeInvalid));
}

TEST_F(ContractTest, EndpointHaltsAndServesExitsFromLastCheckpoint) {
    ContractConfig cfg{5, 2, kDelta, 10, 2};
    std::vector<crypto::PublicKey> roster = c->roster();
    c = std::make_unique<Contract>(cfg, scheme, roster, [](std::size_t) -> crypto::PublicKey {
        throw std::logic_error("no replacement expected");
    });
    fund({{0, 10}, {1, 3}});
    auto b = next_block({chain::make_transfer(scheme, clients[0], id(1), 4, 2)});
    commit(b);
    auto out = expire();
    EXPECT_TRUE(has(out, NoticeKind::Halted));
    EXPECT_TRUE(c->halted());
    call(DepositCall{id(0), 5});
    EXPECT_EQ(c->total_balance(), 13U);
    EXPECT_TRUE(has(call(CommitCall{leader(), c->epoch(), sign(next_block(), {0, 1, 2})}), NoticeKind::CommitRejected));
    auto e0 = call(ExitCall{id(0), chain::make_pop(id(0), b)});
    ASSERT_TRUE(has(e0, NoticeKind::ExitOk));
    EXPECT_EQ(e0.releases.at(0).amount, 6U);
    auto e1 = call(ExitCall{id(1), chain::make_pop(id(1), b)});
    EXPECT_EQ(e1.releases.at(0).amount, 7U);
    EXPECT_TRUE(has(e1, NoticeKind::ExecutionEnd));
    EXPECT_TRUE(*c->execution_end());
}

class InteractiveExitTest : public ContractTest {
  protected:
    // Epoch k-1 finalized with client 0 at 10; epoch k pending with client 0 paying 4.
    void SetUp() override {
        ContractTest::SetUp();
        fund({{0, 10}, {1, 0}});
        prev_pop = chain::make_pop(id(0), finalized_blocks.back());
        pay = chain::make_transfer(scheme, clients[0], id(1), 4, c->epoch());
        block = next_block({pay});
        commit(block);
        k = c->epoch();
        leader_key = keys.at(leader());
    }

    CoSignedTx cosigned(const chain::Transaction& tx) const {
        return {tx, scheme.sign(chain::receipt_message(k, tx.hash()), leader_key.secret_key)};
    }

    Outputs open() {
        auto out = call(ExitRequestCall{id(0), prev_pop});
        EXPECT_TRUE(has(out, NoticeKind::InteractiveExitOpened));
        return out;
    }

    Outputs resolve() {
        now = c->sessions().begin()->second.resolve_at;
        return c->on_tick(now, false);
    }

    chain::ProofOfPossession prev_pop;
    chain::Transaction pay;
    Block block;
    Epoch k = 0;
    crypto::KeyPair leader_key;
};

TEST_F(InteractiveExitTest, SilentLeaderTriggersMassExit) {
    open();
    EXPECT_TRUE(c->on_tick(c->pending()->deadline, false).notices.empty());
    auto out = resolve();
    EXPECT_TRUE(has(out, NoticeKind::MassExit));
    EXPECT_TRUE(c->mass_exit());
    EXPECT_TRUE(c->halted());
    EXPECT_FALSE(c->pending());
    // Exits now run against the last finalized checkpoint.
    auto e = call(ExitCall{id(0), prev_pop});
    ASSERT_TRUE(has(e, NoticeKind::ExitOk));
    EXPECT_EQ(e.releases.at(0).amount, 10U);
}

TEST_F(InteractiveExitTest, ConsistentAnswersRecoverBalance) {
    open();
    call(ExitResponseCall{leader(), id(0), chain::make_pop(id(0), block), {cosigned(pay)}});
    call(ExitResponseCall{id(0), id(0), std::nullopt, {cosigned(pay)}});
    // Resolution lands after the pending deadline, so the term finalizes in the same tick.
    auto fin = resolve();
    ASSERT_TRUE(has(fin, NoticeKind::InteractiveExitResolved));
    EXPECT_FALSE(c->mass_exit());
    EXPECT_FALSE(c->clients().contains(id(0)));
    ASSERT_TRUE(has(fin, NoticeKind::EpochChanged));
    ASSERT_EQ(fin.releases.size(), 1U);
    EXPECT_EQ(fin.releases[0].amount, 6U);
}

TEST_F(InteractiveExitTest, MismatchTriggersMassExit) {
    open();
    // The client withholds nothing, but the leader's path reflects a different balance
    // because a receipt for a transfer that was never included is presented.
    auto phantom = chain::make_transfer(scheme, clients[1], id(0), 3, k);
    call(ExitResponseCall{leader(), id(0), chain::make_pop(id(0), block), {cosigned(pay)}});
    call(ExitResponseCall{id(0), id(0), std::nullopt, {cosigned(pay), cosigned(phantom)}});
    EXPECT_TRUE(has(resolve(), NoticeKind::MassExit));
}

TEST_F(InteractiveExitTest, LateOrForeignEvidenceIgnored) {
    open();
    const auto& s = c->sessions().begin()->second;
    auto response = ExitResponseCall{leader(), id(0), chain::make_pop(id(0), block), {cosigned(pay)}};
    EXPECT_TRUE(c->apply(response, s.respond_by + 1, s.respond_by + 1).notices.empty());
    auto stranger = response;
    stranger.responder = id(2);
    call(stranger);
    EXPECT_TRUE(has(resolve(), NoticeKind::MassExit));
}

TEST_F(InteractiveExitTest, RequestNeedsFinalizedProof) {
    auto bad = prev_pop;
    bad.balance = 11;
    bad.path.value = 11;
    EXPECT_TRUE(has(call(ExitRequestCall{id(0), bad}), NoticeKind::InteractiveExitRefused));
    EXPECT_TRUE(has(call(ExitRequestCall{id(0), chain::make_pop(id(0), block)}), NoticeKind::InteractiveExitRefused));
}

TEST_F(ContractTest, ConservationAcrossLifecycle) {
    fund({{0, 10}, {1, 20}, {2, 30}});
    Coins deposited = 60;
    Coins released = 0;
    auto b = next_block({chain::make_transfer(scheme, clients[2], id(0), 5, c->epoch())});
    commit(b);
    for (const auto& r : call(WithdrawCall{id(0), 7, chain::make_pop(id(0), b)}).releases) released += r.amount;
    for (const auto& r : call(ExitCall{id(1), chain::make_pop(id(1), b)}).releases) released += r.amount;
    call(DepositCall{id(3), 9});
    deposited += 9;
    for (const auto& r : expire().releases) released += r.amount;
    EXPECT_EQ(deposited, c->total_balance() + released);
    auto nb = next_block();
    Coins sidechain = 0;
    for (const auto& [k, v] : nb.accounts) sidechain += v;
    EXPECT_EQ(sidechain, c->total_balance());
    EXPECT_FALSE(nb.accounts.contains(id(1)));
}

}  // namespace
}  // namespace vulcan::contract
