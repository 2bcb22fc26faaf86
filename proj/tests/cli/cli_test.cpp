// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct Result {
    int code = -1;
    std::string output;
};

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("vulcan-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    Result sim(const std::string& args) const {
        const fs::path log = dir / "stdout.txt";
        const std::string cmd = std::string(VULCAN_SIM) + " " + args + " > " + log.string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        Result r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.output = read(log);
        return r;
    }

    static std::string read(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write(const fs::path& p, const std::string& text) const { std::ofstream(p) << text; }

    std::string scenario(const std::string& file) const { return (fs::path(VULCAN_SCENARIOS) / file).string(); }

    fs::path dir;
};

TEST_F(Cli, RunWritesOneRunDirectory) {
    const auto r = sim("run --scenario " + scenario("honest_n5.json") + " --seed 42 --out " + dir.string());
    EXPECT_EQ(r.code, 0) << r.output;
    const fs::path run = dir / "honest-s42";
    ASSERT_TRUE(fs::exists(run / "metrics.json"));
    ASSERT_TRUE(fs::exists(run / "audit.log"));
    const auto m = nlohmann::json::parse(read(run / "metrics.json"));
    EXPECT_EQ(m.at("seed"), 42);
    EXPECT_TRUE(m.at("violations").empty());
}

TEST_F(Cli, RepetitionsUseConsecutiveSeeds) {
    const auto r = sim("run --scenario " + scenario("withhold_attack.json") + " --reps 4 --seed 10 --out " + dir.string());
    EXPECT_EQ(r.code, 0) << r.output;
    for (int s = 10; s < 14; ++s) {
        const fs::path m = dir / ("withhold-s" + std::to_string(s)) / "metrics.json";
        ASSERT_TRUE(fs::exists(m)) << m;
        const auto j = nlohmann::json::parse(read(m));
        EXPECT_GE(j.at("totals").at("leaders_removed").get<int>(), 1);
        EXPECT_GE(j.at("totals").at("challenges_valid").get<int>(), 1);
    }
}

TEST_F(Cli, ConfigErrorsExitOne) {
    EXPECT_EQ(sim("run --scenario " + (dir / "missing.json").string()).code, 1);

    write(dir / "broken.json", "{\n  \"schema\": \"vulcan-scenario/1\",\n  \"n\": ,\n}\n");
    auto r = sim("run --scenario " + (dir / "broken.json").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("line 3"), std::string::npos) << r.output;

    write(dir / "unknown.json", "{\"schema\": \"vulcan-scenario/1\", \"colour\": 1}");
    r = sim("run --scenario " + (dir / "unknown.json").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("$.colour"), std::string::npos) << r.output;

    EXPECT_EQ(sim("gen nonsense").code, 1);
    EXPECT_EQ(sim("frobnicate").code, 1);
    EXPECT_EQ(sim("run --scenario " + scenario("honest_n5.json") + " --reps 0").code, 1);
}

TEST_F(Cli, ViolationExitsTwoWithReport) {
    // A time budget far too short for the epoch target: the run cannot finish.
    auto j = nlohmann::ordered_json::parse(read(scenario("honest_n5.json")));
    j["max_time"] = 30;
    write(dir / "short.json", j.dump());
    const auto r = sim("run --scenario " + (dir / "short.json").string() + " --out " + dir.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("VIOLATION timeout"), std::string::npos) << r.output;
    EXPECT_TRUE(fs::exists(dir / "honest-s1" / "audit.log"));
}

TEST_F(Cli, GenWritesTemplates) {
    const fs::path out = dir / "w.json";
    EXPECT_EQ(sim("gen withhold --out " + out.string()).code, 0);
    const auto j = nlohmann::json::parse(read(out));
    EXPECT_EQ(j.at("schema"), "vulcan-scenario/1");
    EXPECT_EQ(j.at("n"), 5);
    EXPECT_EQ(j.at("f"), 2);
    EXPECT_EQ(j.at("byzantine").at(0).at("strategy"), "WithholdAndCommit");
    EXPECT_EQ(j.at("byzantine").at(0).at("from_epoch"), 2);

    const auto r = sim("gen proof_size_sweep");
    EXPECT_EQ(r.code, 0);
    const auto s = nlohmann::json::parse(r.output);
    EXPECT_EQ(s.at("sweep").at("accounts").front(), 64);
    EXPECT_EQ(s.at("sweep").at("accounts").back(), 16384);
}

TEST_F(Cli, ShippedScenariosMatchTheirTemplates) {
    const std::pair<const char*, const char*> files[] = {
        {"honest", "honest_n5.json"},   {"withhold", "withhold_attack.json"}, {"equivocate", "equivocate.json"},
        {"silent_leader", "silent_leader.json"}, {"collusion", "collusion.json"}, {"mass_exit", "mass_exit.json"},
        {"proof_size_sweep", "proof_size_sweep.json"}};
    for (const auto& [tmpl, file] : files) {
        const auto r = sim(std::string("gen ") + tmpl);
        EXPECT_EQ(r.output, read(scenario(file))) << file;
    }
}

}  // namespace
