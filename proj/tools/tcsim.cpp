// Command line front end: run, check, export-dot, fixtures.
// Exit codes: 0 ok, 1 property violation, 2 config or I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tcsim/dot_export.hpp"
#include "tcsim/errors.hpp"
#include "tcsim/experiment.hpp"
#include "tcsim/fixtures.hpp"
#include "tcsim/properties.hpp"

namespace fs = std::filesystem;
using namespace tcsim;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kConfigError = 2;

struct RunArgs {
    std::string config;
    std::string seeds;
    std::string closure;
    std::string adversary;
    std::string protocol;
    std::string out;
    std::optional<std::uint32_t> f, rounds, k, n;
    std::optional<double> q;
    bool no_traces = false;
};

int cmd_run(const RunArgs& a) {
    ExperimentConfig c = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
    if (!a.seeds.empty()) c.seeds = parse_seed_range(a.seeds);
    if (!a.closure.empty()) c.closure = closure_mode_from_string(a.closure);
    if (!a.adversary.empty()) c.adversary = a.adversary;
    if (!a.protocol.empty()) c.protocol = fork_choice_from_string(a.protocol);
    if (!a.out.empty()) c.output_dir = a.out;
    if (a.f) c.f = *a.f;
    if (a.rounds) c.rounds = *a.rounds;
    if (a.k) c.k = *a.k;
    if (a.n) c.n = *a.n;
    if (a.q) c.q = *a.q;
    if (a.no_traces) c.write_traces = false;
    validate(c);

    const auto report = run_experiment(c);
    const auto summary = report.summary();
    for (const auto& [mode, s] : summary.at("modes").items()) {
        std::cout << mode << ": throughput " << s.at("throughput").at("mean").get<double>() << " +/- "
                  << s.at("throughput").at("ci95").get<double>() << " blocks/round, latency "
                  << s.at("latency").at("mean").get<double>() << " rounds, abandoned "
                  << s.at("abandoned").at("mean").get<double>() << " per seed\n";
    }
    for (const auto& p : report.problems) std::cout << "problem: " << p << '\n';
    if (!c.output_dir.empty()) std::cout << "reports written to " << c.output_dir.string() << '\n';
    return report.ok() ? kOk : kViolation;
}

int cmd_check(const std::vector<std::string>& files, std::uint32_t tail) {
    bool all_ok = true;
    for (const auto& file : files) {
        const auto trace = ExecutionTrace::read(file);
        const auto report = check_properties(trace, {tail});
        std::cout << file << '\n';
        for (auto p : all_properties()) {
            const auto& v = report.violations.at(p);
            std::cout << "  " << (v.empty() ? "PASS " : "FAIL ") << to_string(p);
            if (!v.empty()) std::cout << " (" << v.size() << "): " << v.front();
            std::cout << '\n';
        }
        all_ok = all_ok && report.all_passed();
    }
    return all_ok ? kOk : kViolation;
}

int cmd_export_dot(const std::string& file, Round round, std::optional<ProcessId> observer, const std::string& out) {
    const auto trace = ExecutionTrace::read(file);
    const auto dot = export_dot(trace, round, observer.value_or(default_observer(trace)));
    if (out.empty()) {
        std::cout << dot;
        return kOk;
    }
    std::ofstream f(out);
    if (!f) throw Error(ErrorCode::IoFailure, "cannot write " + out);
    f << dot;
    return kOk;
}

int cmd_fixtures(const std::string& dir) {
    fs::create_directories(dir);
    for (auto mode : {ClosureMode::Off, ClosureMode::LeavesOfAbandoned, ClosureMode::Greedy}) {
        const auto fx = figure2_execution(mode);
        const std::string stem = "figure2-" + std::string(mode == ClosureMode::Off ? "base" : to_string(mode));
        fx.trace.write(fs::path(dir) / (stem + ".jsonl"));
        std::ofstream dot(fs::path(dir) / (stem + ".dot"));
        if (!dot) throw Error(ErrorCode::IoFailure, "cannot write into " + dir);
        dot << export_dot(fx.trace, fx.trace.header.rounds, 0);
        std::cout << "wrote " << (fs::path(dir) / stem).string() << ".{jsonl,dot}\n";
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Round-synchronous chain protocol simulator with a throughput closure"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "paired base/closure runs over a seed sweep");
    run_cmd->add_option("--config", run.config, "JSON experiment config");
    run_cmd->add_option("--seeds", run.seeds, "a..b or a,b,c");
    run_cmd->add_option("--closure", run.closure, "off | closure | greedy");
    run_cmd->add_option("--adversary", run.adversary, "honest | fork_amplifier | withholding");
    run_cmd->add_option("--protocol", run.protocol, "nakamoto | ghost");
    run_cmd->add_option("--out", run.out, "output directory");
    run_cmd->add_option("--f", run.f, "corrupted processes");
    run_cmd->add_option("--n", run.n, "processes");
    run_cmd->add_option("--rounds", run.rounds, "rounds per execution");
    run_cmd->add_option("--q", run.q, "per-process mining probability");
    run_cmd->add_option("--k", run.k, "confirmation depth");
    run_cmd->add_flag("--no-traces", run.no_traces, "skip writing trace files");

    std::vector<std::string> check_files;
    std::uint32_t tail = 50;
    auto* check_cmd = app.add_subcommand("check", "evaluate atomic broadcast properties on trace files");
    check_cmd->add_option("traces", check_files, "trace files")->required();
    check_cmd->add_option("--tail", tail, "rounds exempt from liveness checks");

    std::string dot_file, dot_out;
    Round dot_round = 0;
    std::optional<ProcessId> dot_observer;
    auto* dot_cmd = app.add_subcommand("export-dot", "render an observer's view as Graphviz DOT");
    dot_cmd->add_option("trace", dot_file, "trace file")->required();
    dot_cmd->add_option("--round", dot_round, "round")->required();
    dot_cmd->add_option("--observer", dot_observer, "process index (default: first honest)");
    dot_cmd->add_option("-o,--output", dot_out, "output file (default: stdout)");

    std::string fixture_dir = "fixtures";
    auto* fx_cmd = app.add_subcommand("fixtures", "write the scripted eleven-block example traces");
    fx_cmd->add_option("--out", fixture_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*check_cmd) return cmd_check(check_files, tail);
        if (*dot_cmd) return cmd_export_dot(dot_file, dot_round, dot_observer, dot_out);
        if (*fx_cmd) return cmd_fixtures(fixture_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}
