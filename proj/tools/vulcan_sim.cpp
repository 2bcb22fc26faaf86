// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

// Scenario runner.
//
//   vulcan-sim run --scenario <path> [--seed N] [--reps N] [--out DIR] [-v]
//   vulcan-sim gen <template> [--out PATH]
//
// Exit codes: 0 every run clean, 1 configuration or usage error, 2 an invariant was violated.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "vulcan/common/error.hpp"
#include "vulcan/simnet/simulation.hpp"

namespace fs = std::filesystem;
using namespace vulcan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitViolation = 2;

struct RunRequest {
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::size_t reps = 1;
    std::string out = "out";
    bool verbose = false;
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw ConfigError("cannot write " + path.string());
}

std::string summary(const simnet::RunResult& r) {
    const auto& m = r.metrics;
    std::string s = "checkpoints=" + std::to_string(m.checkpoints_finalized) +
                    " challenges=" + std::to_string(m.challenges_raised) +
                    " leaders_removed=" + std::to_string(m.leaders_removed) +
                    " exits=" + std::to_string(m.exits) + " end=" + std::to_string(m.end_time);
    if (m.mass_exit) s += " mass_exit";
    if (!m.sweep.empty()) s += " sweep_points=" + std::to_string(m.sweep.size());
    return s;
}

int run(const RunRequest& req) {
    simnet::ScenarioConfig base;
    try {
        base = simnet::load_scenario(req.scenario_path);
        if (req.seed) base.seed = *req.seed;
        base.validate();
    } catch (const Error& e) {
        std::cerr << req.scenario_path << ": " << e.what() << "\n";
        return kExitConfig;
    }

    // Repetition i uses seed + i; every run writes only its own directory.
    std::vector<std::optional<simnet::RunResult>> results(req.reps);
    std::vector<std::string> errors(req.reps);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < req.reps; i = next++) {
            auto cfg = base;
            cfg.seed = base.seed + i;
            try {
                results[i] = simnet::run_scenario(cfg);
                const fs::path dir = fs::path(req.out) / (cfg.name + "-s" + std::to_string(cfg.seed));
                fs::create_directories(dir);
                write_file(dir / "metrics.json", simnet::metrics_json(*results[i]));
                write_file(dir / "audit.log", results[i]->audit_log);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, req.reps);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    int code = kExitOk;
    std::size_t failed = 0;
    for (std::size_t i = 0; i < req.reps; ++i) {
        const auto seed = base.seed + i;
        if (!errors[i].empty()) {
            std::cerr << base.name << " seed " << seed << ": " << errors[i] << "\n";
            code = std::max(code, kExitConfig);
            continue;
        }
        const auto& r = *results[i];
        if (!r.ok()) {
            ++failed;
            code = kExitViolation;
            std::cout << base.name << " seed " << seed << ": " << r.violations.size() << " violation(s)\n"
                      << simnet::violation_report(r);
        } else if (req.verbose) {
            std::cout << base.name << " seed " << seed << ": ok " << summary(r) << "\n";
        }
    }
    if (req.verbose || failed > 0) {
        std::cout << req.reps - failed << "/" << req.reps << " runs clean, output in " << req.out << "\n";
    }
    return code;
}

int gen(const std::string& name, const std::string& out) {
    try {
        const auto text = simnet::to_json(simnet::make_template(name));
        if (out.empty()) {
            std::cout << text;
        } else {
            write_file(out, text);
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vulcan sidechain simulator"};
    app.require_subcommand(1);

    RunRequest req;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario one or more times");
    run_cmd->add_option("--scenario", req.scenario_path, "Scenario file")->required();
    run_cmd->add_option("--seed", req.seed, "Override the scenario seed");
    run_cmd->add_option("--reps", req.reps, "Repetitions, seeded seed, seed+1, ...")->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", req.out, "Output directory")->capture_default_str();
    run_cmd->add_flag("-v,--verbose", req.verbose, "Print a summary line per run");

    std::string tmpl;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen", "Write a scenario template");
    std::string names;
    for (const auto& n : simnet::template_names()) names += (names.empty() ? "" : ", ") + n;
    gen_cmd->add_option("template", tmpl, "One of: " + names)->required();
    gen_cmd->add_option("--out", gen_out, "Destination file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*run_cmd) return run(req);
    return gen(tmpl, gen_out);
}
