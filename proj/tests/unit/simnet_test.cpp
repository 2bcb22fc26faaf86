// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "vulcan/common/error.hpp"
#include "vulcan/simnet/simulation.hpp"

namespace vulcan::simnet {
namespace {

using json = nlohmann::ordered_json;
using validator::Strategy;

std::string config_error(std::string_view text) {
    try {
        parse_scenario(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

// ---- Scenario files ----

TEST(Scenario, TemplatesRoundTrip) {
    for (const auto& name : template_names()) {
        const auto c = make_template(name);
        EXPECT_EQ(parse_scenario(to_json(c)), c) << name;
        EXPECT_EQ(c.name, name);
    }
    EXPECT_THROW(make_template("nonsense"), ConfigError);
}

TEST(Scenario, TemplateShapes) {
    const auto w = make_template("withhold");
    ASSERT_EQ(w.byzantine.size(), 1U);
    EXPECT_EQ(w.byzantine[0].strategy, Strategy::WithholdAndCommit);
    EXPECT_EQ(w.byzantine[0].from_epoch, 2U);
    EXPECT_EQ(w.n, 5U);
    EXPECT_EQ(w.f, 2U);

    const auto s = make_template("proof_size_sweep");
    ASSERT_TRUE(s.sweep.has_value());
    std::vector<std::size_t> expected;
    for (std::size_t m = 64; m <= 16384; m *= 2) expected.push_back(m);
    EXPECT_EQ(s.sweep->accounts, expected);

    const auto h = make_template("honest");
    EXPECT_TRUE(h.byzantine.empty());
    EXPECT_EQ(h.epochs_target, 20U);
}

TEST(Scenario, UnknownFieldNamesItsPath) {
    auto j = json::parse(to_json(make_template("honest")));
    j["workload"]["bogus"] = 1;
    EXPECT_EQ(config_error(j.dump()), "$.workload.bogus: unknown field");
    j = json::parse(to_json(make_template("honest")));
    j["clients"][1]["colour"] = "red";
    EXPECT_EQ(config_error(j.dump()), "$.clients[1].colour: unknown field");
}

TEST(Scenario, SyntaxErrorsCarryLineAndColumn) {
    const std::string text = "{\n  \"schema\": \"vulcan-scenario/1\",\n  \"n\": 5,,\n}";
    const auto msg = config_error(text);
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(Scenario, RejectsBadValues) {
    auto with = [](auto mutate) {
        auto c = make_template("honest");
        mutate(c);
        return config_error(to_json(c));
    };
    EXPECT_NE(config_error("{}").find("schema"), std::string::npos);
    EXPECT_NE(with([](auto& c) { c.n = 4; }), "");
    EXPECT_NE(with([](auto& c) { c.tau = c.delta + 1; }).find("$.tau"), std::string::npos);
    EXPECT_NE(with([](auto& c) { c.scheme = "rsa"; }).find("$.scheme"), std::string::npos);
    EXPECT_NE(with([](auto& c) { c.workload.transfer_prob = 1.5; }), "");
    EXPECT_NE(with([](auto& c) { c.clients.push_back(c.clients[0]); }), "");
    EXPECT_NE(with([](auto& c) {
                  for (std::size_t i = 0; i < 3; ++i) c.byzantine.push_back({i, Strategy::SilentLeader});
              }),
              "")
        << "more than f corrupted validators in a safety scenario";
    EXPECT_EQ(with([](auto& c) {
                  c.safety = false;
                  for (std::size_t i = 0; i < 3; ++i) c.byzantine.push_back({i, Strategy::SilentLeader});
              }),
              "");
    EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

// ---- Runs ----

ScenarioConfig small(std::string_view tmpl, Epoch epochs, std::uint64_t seed = 1) {
    auto c = make_template(tmpl);
    c.epochs_target = epochs;
    c.seed = seed;
    return c;
}

const EpochMetrics* epoch(const RunResult& r, Epoch e) {
    for (const auto& m : r.metrics.epochs) {
        if (m.epoch == e) return &m;
    }
    return nullptr;
}

TEST(Simulation, Deterministic) {
    const auto c = small("equivocate", 6, 7);
    const auto a = run_scenario(c);
    const auto b = run_scenario(c);
    EXPECT_EQ(a.audit_log, b.audit_log);
    EXPECT_EQ(metrics_json(a), metrics_json(b));
    auto d = c;
    d.seed = 8;
    EXPECT_NE(run_scenario(d).audit_log, a.audit_log);
}

TEST(Simulation, HonestRunFinalizesEveryEpochInOneRound) {
    const auto r = run_scenario(make_template("honest"));
    EXPECT_TRUE(r.ok()) << violation_report(r);
    EXPECT_EQ(r.metrics.checkpoints_finalized, 20U);
    for (const auto& e : r.metrics.epochs) {
        if (e.finalized) EXPECT_EQ(e.rounds, 1U) << "epoch " << e.epoch;
    }
    EXPECT_TRUE(r.metrics.halted);
    EXPECT_EQ(r.metrics.exits, r.config.clients.size());
    EXPECT_EQ(r.metrics.execution_end, std::optional<bool>(true));
    EXPECT_EQ(r.metrics.challenges_raised, 0U);
    EXPECT_TRUE(r.audit.consistent());
    EXPECT_EQ(r.audit.checkpoints, 20U);
    EXPECT_EQ(r.audit.exits_checked, r.config.clients.size());
    EXPECT_GT(r.metrics.messages, 0U);
}

TEST(Simulation, SilentLeaderIsVotedOut) {
    const auto r = run_scenario(make_template("silent_leader"));
    EXPECT_TRUE(r.ok()) << violation_report(r);
    EXPECT_EQ(r.metrics.leaders_removed, 1U);
    const auto* e3 = epoch(r, 3);
    ASSERT_NE(e3, nullptr);
    EXPECT_TRUE(e3->finalized);
    EXPECT_EQ(e3->rounds, 2U);
    EXPECT_LE(e3->rounds, r.config.max_rounds + 1);
}

TEST(Simulation, WithheldCheckpointIsChallenged) {
    const auto r = run_scenario(make_template("withhold"));
    EXPECT_TRUE(r.ok()) << violation_report(r);
    EXPECT_GE(r.metrics.challenges_valid, 1U);
    EXPECT_EQ(r.metrics.leaders_removed, 1U);
    const auto* e2 = epoch(r, 2);
    ASSERT_NE(e2, nullptr);
    EXPECT_TRUE(e2->finalized);
    EXPECT_EQ(r.metrics.checkpoints_finalized, r.config.epochs_target);
}

TEST(Simulation, EquivocationAndCollusionFinalizeNothingInvalid) {
    for (const auto* t : {"equivocate", "collusion"}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto r = run_scenario(small(t, 6, seed));
            EXPECT_TRUE(r.ok()) << t << " seed " << seed << "\n" << violation_report(r);
            EXPECT_EQ(r.metrics.checkpoints_finalized, 6U) << t;
        }
    }
}

TEST(Simulation, DoubleSpenderAndOfflineClient) {
    auto c = small("honest", 8, 3);
    c.clients[0].behavior = ClientBehavior::DoubleSpender;
    c.clients[1].behavior = ClientBehavior::Offline;
    c.workload.transfer_prob = 0.9;
    const auto r = run_scenario(c);
    EXPECT_TRUE(r.ok()) << violation_report(r);
    EXPECT_GT(r.metrics.double_spend_attempts, 0U);
    EXPECT_EQ(r.metrics.exits, c.clients.size()) << "offline clients still exit at the end";
}

TEST(Simulation, TamperedCommitteeEndsInInteractiveExitOrMassExit) {
    const auto r = run_scenario(make_template("mass_exit"));
    EXPECT_TRUE(r.ok()) << violation_report(r);
    EXPECT_GE(r.metrics.interactive_exits_opened, 1U);
    EXPECT_TRUE(r.metrics.mass_exit);
    EXPECT_EQ(r.metrics.exits, r.config.clients.size());
    EXPECT_GE(r.audit.exits_checked, r.config.clients.size());
}

TEST(Simulation, MetricsDocumentIsWellFormed) {
    const auto r = run_scenario(small("honest", 3));
    const auto j = json::parse(metrics_json(r));
    EXPECT_EQ(j.at("scenario"), "honest");
    EXPECT_EQ(j.at("totals").at("checkpoints_finalized"), 3);
    EXPECT_TRUE(j.at("audit").at("consistent").get<bool>());
    EXPECT_TRUE(j.at("violations").empty());
    EXPECT_EQ(violation_report(r), "");
}

// ---- Independent auditor ----

std::vector<std::string> lines_of(const std::string& log) {
    std::vector<std::string> out;
    std::istringstream in(log);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string join(const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += l + "\n";
    return s;
}

TEST(Auditor, EmptyLogIsConsistent) {
    const auto r = independent_audit("");
    EXPECT_TRUE(r.consistent());
    EXPECT_EQ(r.checkpoints, 0U);
    EXPECT_EQ(r.lines, 0U);
}

TEST(Auditor, DetectsAnInflatedBalance) {
    const auto run = run_scenario(small("honest", 5));
    ASSERT_TRUE(run.audit.consistent());
    auto lines = lines_of(run.audit_log);
    bool mutated = false;
    for (auto& l : lines) {
        auto j = json::parse(l);
        if (j["kind"] != "checkpoint.finalized" || j["data"]["epoch"] != 3) continue;
        auto& acc = j["data"]["block"]["accounts"];
        ASSERT_FALSE(acc.empty());
        acc[0][1] = acc[0][1].get<Coins>() + 1;
        l = j.dump();
        mutated = true;
    }
    ASSERT_TRUE(mutated);
    const auto r = independent_audit(join(lines));
    EXPECT_FALSE(r.consistent());
    EXPECT_EQ(r.first_divergent_epoch, std::optional<Epoch>(3));
}

TEST(Auditor, DetectsASkippedDebit) {
    // Forget a withdrawal record: the replayed balance no longer matches the logged blocks.
    auto c = small("honest", 8, 2);
    c.workload.withdraw_prob = 1.0;
    const auto run = run_scenario(c);
    ASSERT_TRUE(run.audit.consistent());
    auto lines = lines_of(run.audit_log);
    std::vector<std::string> kept;
    bool dropped = false;
    std::size_t index_shift = 0;
    for (const auto& l : lines) {
        auto j = json::parse(l);
        if (j["kind"] == "contract.record") {
            if (!dropped && j["data"]["kind"] == "withdraw") {
                dropped = true;
                index_shift = 1;
                continue;
            }
            j["data"]["index"] = j["data"]["index"].get<std::size_t>() - index_shift;
            kept.push_back(j.dump());
            continue;
        }
        kept.push_back(l);
    }
    ASSERT_TRUE(dropped);
    EXPECT_FALSE(independent_audit(join(kept)).consistent());
}

TEST(Auditor, RejectsAForgedCertificate) {
    const auto run = run_scenario(small("honest", 4));
    auto lines = lines_of(run.audit_log);
    for (auto& l : lines) {
        auto j = json::parse(l);
        if (j["kind"] != "checkpoint.finalized" || j["data"]["epoch"] != 2) continue;
        j["data"]["cp"]["signers"] = 1;  // a single signer
        l = j.dump();
    }
    const auto r = independent_audit(join(lines));
    ASSERT_FALSE(r.consistent());
    EXPECT_EQ(r.divergences.front().kind, "invalid-checkpoint");
}

// ---- Proof sizes ----

TEST(ProofSizeSweep, GrowsLogarithmically) {
    const auto pts = proof_size_sweep({{64, 256, 1024, 4096}, 128}, 5);
    ASSERT_EQ(pts.size(), 4U);
    for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_GE(pts[i].mean_siblings, pts[i - 1].mean_siblings);
    for (const auto& p : pts) {
        const double lg = std::log2(static_cast<double>(p.accounts));
        EXPECT_GT(p.mean_siblings, lg - 2) << p.accounts;
        EXPECT_LT(p.mean_siblings, lg + 4) << p.accounts;
    }
}

}  // namespace
}  // namespace vulcan::simnet
