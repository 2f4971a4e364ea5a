#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tcsim/errors.hpp"
#include "tcsim/experiment.hpp"

using namespace tcsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ErrorCode config_error(const json& j) {
    try {
        (void)config_from_json(j);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error for " << j.dump());
    return ErrorCode::IoFailure;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("config parsing: defaults, every field and the seed forms") {
    const auto d = config_from_json(json::object());
    CHECK(d.n == 10);
    CHECK(d.f == 0);
    CHECK(d.rounds == 2000);
    CHECK(d.q == 0.02);
    CHECK(d.k == 6);
    CHECK(d.closure == ClosureMode::LeavesOfAbandoned);
    CHECK(d.seeds == std::vector<std::uint64_t>{1});

    const auto c = config_from_json(json::parse(R"({
        "n": 12, "f": 3, "rounds": 500, "q": 0.05, "m": 8, "k": 4,
        "protocol": "ghost", "closure": "greedy",
        "adversary": {"name": "withholding", "delay": 5},
        "seeds": "3..6", "tx_rate": 0.5, "coinbase": false, "tail": 20,
        "output": {"dir": "out", "traces": false, "receives": false}
    })"));
    CHECK(c.n == 12);
    CHECK(c.f == 3);
    CHECK(c.rounds == 500);
    CHECK(c.m == 8);
    CHECK(c.protocol == ForkChoice::Ghost);
    CHECK(c.closure == ClosureMode::Greedy);
    CHECK(c.adversary == "withholding");
    CHECK(c.withhold_delay == 5);
    CHECK(c.seeds == std::vector<std::uint64_t>{3, 4, 5, 6});
    CHECK(c.tx_rate == 0.5);
    CHECK(!c.coinbase);
    CHECK(c.tail == 20);
    CHECK(c.output_dir == fs::path("out"));
    CHECK(!c.write_traces);
    CHECK(!c.record_receives);

    CHECK(config_from_json(json{{"seeds", {7, 9}}}).seeds == std::vector<std::uint64_t>{7, 9});
    CHECK(config_from_json(json{{"seeds", {{"start", 10}, {"count", 3}}}}).seeds ==
          std::vector<std::uint64_t>{10, 11, 12});
    CHECK(parse_seed_range("4,2,9") == std::vector<std::uint64_t>{4, 2, 9});
    CHECK(parse_seed_range("5..5") == std::vector<std::uint64_t>{5});
}

TEST_CASE("config round trip through JSON") {
    auto c = config_from_json(json::parse(R"({"adversary": "fork_amplifier", "f": 2, "seeds": "1..3", "q": 0.04})"));
    const auto back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(back.seeds == c.seeds);
    CHECK(back.adversary == "fork_amplifier");
}

TEST_CASE("config validation") {
    CHECK(config_error(json::array()) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"lambda", 10}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"n", 0}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"n", 4}, {"f", 4}, {"adversary", "fork_amplifier"}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"f", 1}}) == ErrorCode::InvalidConfig); // honest corrupts nobody
    CHECK(config_error(json{{"q", 1.0}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"q", -0.1}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"k", 0}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"rounds", 0}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"tx_rate", -1}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"protocol", "bitcoin-ng"}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"closure", "sometimes"}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"adversary", "selfish"}, {"f", 1}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"seeds", "9..3"}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"seeds", "1,x"}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"seeds", json::array()}}) == ErrorCode::InvalidConfig);
    CHECK(config_error(json{{"n", "ten"}}) == ErrorCode::InvalidConfig);

    try {
        (void)load_config("/nonexistent/config.json");
        FAIL("expected IoFailure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoFailure);
    }
}

TEST_CASE("q = 0 with the closure off delivers nothing") {
    ExperimentConfig c;
    c.q = 0.0;
    c.rounds = 200;
    c.closure = ClosureMode::Off;
    const auto report = run_experiment(c);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].mode == "base");
    CHECK(report.rows[0].delivered == 0);
    CHECK(report.rows[0].throughput == 0.0);
}

TEST_CASE("paired runs report dominance and write byte-identical outputs") {
    ExperimentConfig c;
    c.rounds = 600;
    c.q = 0.05;
    c.seeds = {1, 2};
    TempDir a("tcsim-exp-a"), b("tcsim-exp-b");
    c.output_dir = a.path;
    const auto ra = run_experiment(c);
    c.output_dir = b.path;
    const auto rb = run_experiment(c);

    REQUIRE(ra.rows.size() == 4);
    CHECK(ra.ok());
    for (const auto& row : ra.rows) {
        CHECK(row.violations == 0);
        if (row.mode != "closure") continue;
        CHECK(row.latency_violations == 0);
        CHECK(row.dominance_ok);
        CHECK(row.weak_refs > 0);
        CHECK(row.abandoned == 0);
    }
    for (const char* name : {"seed-1-base.jsonl", "seed-1-closure.jsonl", "seed-2-base.jsonl", "seed-2-closure.jsonl"}) {
        const auto left = slurp(a.path / "traces" / name);
        CHECK(!left.empty());
        CHECK(left == slurp(b.path / "traces" / name));
    }
    CHECK(slurp(a.path / "metrics.csv") == slurp(b.path / "metrics.csv"));
    CHECK(slurp(a.path / "summary.json") == slurp(b.path / "summary.json"));

    std::istringstream csv(slurp(a.path / "metrics.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("seed,adversary,protocol,mode,delivered,throughput", 0) == 0);
    std::size_t lines = 0;
    for (std::string line; std::getline(csv, line);) ++lines;
    CHECK(lines == 4);

    const auto summary = json::parse(slurp(a.path / "summary.json"));
    CHECK(summary.at("ok").get<bool>());
    CHECK(summary.at("modes").contains("base"));
    CHECK(summary.at("modes").contains("closure"));
    CHECK(summary.at("modes").at("closure").at("throughput").at("mean").get<double>() >
          summary.at("modes").at("base").at("throughput").at("mean").get<double>());
    CHECK(summary.at("paired").at("dominance_failures").get<int>() == 0);
    CHECK(summary.at("config").at("seeds") == json::array({1, 2}));
}

TEST_CASE("traces can be left out") {
    ExperimentConfig c;
    c.rounds = 100;
    c.write_traces = false;
    TempDir dir("tcsim-exp-notraces");
    c.output_dir = dir.path;
    (void)run_experiment(c);
    CHECK(fs::exists(dir.path / "metrics.csv"));
    CHECK(!fs::exists(dir.path / "traces"));
}
