#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tcsim/adversary.hpp"
#include "tcsim/engine.hpp"
#include "tcsim/metrics.hpp"
#include "tcsim/properties.hpp"

namespace tcsim {

struct ExperimentConfig {
    std::uint32_t n = 10;
    std::uint32_t f = 0;
    std::uint32_t rounds = 2000;
    double q = 0.02;
    std::uint32_t m = 10;
    std::uint32_t k = 6;
    ForkChoice protocol = ForkChoice::LongestChain;
    // Mode of the paired closure run; Off runs the base protocol alone.
    ClosureMode closure = ClosureMode::LeavesOfAbandoned;
    std::string adversary = "honest";
    std::uint32_t withhold_delay = 2;
    std::vector<std::uint64_t> seeds{1};
    double tx_rate = 1.0;
    bool coinbase = true;
    std::uint32_t tail = 50;
    std::filesystem::path output_dir;
    bool write_traces = true;
    bool record_receives = true;

    SimulationConfig simulation(std::uint64_t seed, ClosureMode mode) const;
    AdversarySpec adversary_spec() const { return {adversary, f, withhold_delay}; }
};

// Throws InvalidConfig.
void validate(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

// "a..b" (inclusive) or a comma separated list.
std::vector<std::uint64_t> parse_seed_range(std::string_view text);

struct RunRow {
    std::uint64_t seed = 0;
    std::string mode; // "base", "closure" or "greedy"
    std::size_t delivered = 0;
    double throughput = 0.0;
    double throughput_min = 0.0;
    double throughput_max = 0.0;
    double tx_throughput = 0.0;
    double latency_mean = 0.0;
    std::size_t unresolved = 0;
    std::size_t abandoned = 0;
    std::size_t forked_rounds = 0;
    std::size_t weak_refs = 0;
    std::size_t violations = 0;
    std::vector<std::string> failed; // property names
    // Paired columns, filled on closure rows only.
    std::size_t latency_violations = 0;
    bool dominance_ok = true;
    std::uint64_t digest = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<RunRow> rows;
    std::vector<std::string> problems;

    bool ok() const { return problems.empty(); }
    std::string to_csv() const;
    nlohmann::json summary() const;
};

struct SeedOutcome {
    ExecutionTrace base;
    std::optional<ExecutionTrace> closure;
};

// Base run plus, unless the closure is off, its closure twin on the same
// randomness.
SeedOutcome run_seed(const ExperimentConfig& config, std::uint64_t seed);

// Runs every seed, checks properties and paired dominance, and writes the
// traces, metrics.csv and summary.json when an output directory is set.
ExperimentReport run_experiment(const ExperimentConfig& config);

} // namespace tcsim
