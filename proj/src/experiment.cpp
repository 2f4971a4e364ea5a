#include "tcsim/experiment.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tcsim/errors.hpp"

namespace tcsim {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) invalid("bad seed '" + std::string(text) + "'");
    return v;
}

std::string mode_name(ClosureMode mode) {
    return mode == ClosureMode::Off ? "base" : std::string(to_string(mode));
}

RunRow row_for(const ExecutionTrace& trace, std::uint64_t seed, const PropertyOptions& options) {
    RunRow row;
    row.seed = seed;
    row.mode = mode_name(trace.header.closure);
    const auto observer = default_observer(trace);
    const auto seq = trace.delivered(observer);
    row.delivered = seq.size();
    row.throughput = throughput_of(trace, observer);
    const auto range = throughput_range(trace);
    row.throughput_min = range.min;
    row.throughput_max = range.max;
    row.tx_throughput = tx_throughput_of(trace, observer);
    const auto lat = latency_of(trace, observer);
    row.latency_mean = lat.mean;
    row.unresolved = lat.unresolved;
    row.abandoned = abandoned_blocks(trace, observer).size();
    row.forked_rounds = forked_round_count(trace);
    for (const auto& [id, b] : trace.blocks()) row.weak_refs += b->weak_refs.size();
    const auto report = check_properties(trace, options);
    row.violations = report.violation_count();
    for (auto prop : all_properties())
        if (!report.passed(prop)) row.failed.push_back(std::string(to_string(prop)));
    row.digest = trace_digest(trace);
    return row;
}

std::string hex64(std::uint64_t v) { return BlockId{v}.hex(); }

std::string violation_problem(std::uint64_t seed, const RunRow& row) {
    std::string out = "seed " + std::to_string(seed) + " " + row.mode + ": violates";
    for (const auto& name : row.failed) out += " " + name;
    return out;
}

} // namespace

SimulationConfig ExperimentConfig::simulation(std::uint64_t seed, ClosureMode mode) const {
    SimulationConfig s;
    s.n = n;
    s.rounds = rounds;
    s.q = q;
    s.m = m;
    s.k = k;
    s.protocol = protocol;
    s.closure = mode;
    s.tx_rate = tx_rate;
    s.coinbase = coinbase;
    s.seed = seed;
    s.record_receives = record_receives;
    return s;
}

void validate(const ExperimentConfig& c) {
    if (c.n == 0) invalid("n must be positive");
    if (c.f >= c.n) invalid("f must satisfy 0 <= f < n");
    if (c.rounds < 1) invalid("rounds must be >= 1");
    if (!(c.q >= 0.0 && c.q < 1.0)) invalid("q must lie in [0, 1)");
    if (c.k < 1) invalid("k must be >= 1");
    if (c.m < 1) invalid("m must be >= 1");
    if (!(c.tx_rate >= 0.0)) invalid("tx_rate must be non-negative");
    if (c.seeds.empty()) invalid("no seeds");
    if (c.adversary == "honest") {
        if (c.f != 0) invalid("the honest adversary corrupts nobody; f must be 0");
    } else if (c.adversary != "fork_amplifier" && c.adversary != "withholding") {
        invalid("unknown adversary '" + c.adversary + "'");
    }
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) invalid("config must be a JSON object");
    static const std::vector<std::string> known{"n",      "f",        "rounds",   "q",      "m",
                                                "k",      "protocol", "closure",  "adversary",
                                                "seeds",  "tx_rate",  "coinbase", "tail", "output"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end()) invalid("unknown key '" + key + "'");

    ExperimentConfig c;
    try {
        if (j.contains("n")) c.n = j.at("n").get<std::uint32_t>();
        if (j.contains("f")) c.f = j.at("f").get<std::uint32_t>();
        if (j.contains("rounds")) c.rounds = j.at("rounds").get<std::uint32_t>();
        if (j.contains("q")) c.q = j.at("q").get<double>();
        if (j.contains("m")) c.m = j.at("m").get<std::uint32_t>();
        if (j.contains("k")) c.k = j.at("k").get<std::uint32_t>();
        if (j.contains("protocol")) c.protocol = fork_choice_from_string(j.at("protocol").get<std::string>());
        if (j.contains("closure")) c.closure = closure_mode_from_string(j.at("closure").get<std::string>());
        if (j.contains("adversary")) {
            const auto& a = j.at("adversary");
            if (a.is_string()) {
                c.adversary = a.get<std::string>();
            } else {
                c.adversary = a.at("name").get<std::string>();
                if (a.contains("delay")) c.withhold_delay = a.at("delay").get<std::uint32_t>();
            }
        }
        if (j.contains("seeds")) {
            const auto& s = j.at("seeds");
            c.seeds.clear();
            if (s.is_array()) {
                for (const auto& v : s) c.seeds.push_back(v.get<std::uint64_t>());
            } else if (s.is_string()) {
                c.seeds = parse_seed_range(s.get<std::string>());
            } else {
                const auto start = s.at("start").get<std::uint64_t>();
                const auto count = s.at("count").get<std::uint64_t>();
                for (std::uint64_t i = 0; i < count; ++i) c.seeds.push_back(start + i);
            }
        }
        if (j.contains("tx_rate")) c.tx_rate = j.at("tx_rate").get<double>();
        if (j.contains("coinbase")) c.coinbase = j.at("coinbase").get<bool>();
        if (j.contains("tail")) c.tail = j.at("tail").get<std::uint32_t>();
        if (j.contains("output")) {
            const auto& o = j.at("output");
            if (o.contains("dir")) c.output_dir = o.at("dir").get<std::string>();
            if (o.contains("traces")) c.write_traces = o.at("traces").get<bool>();
            if (o.contains("receives")) c.record_receives = o.at("receives").get<bool>();
        }
    } catch (const json::exception& e) {
        invalid(e.what());
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        invalid(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json to_json(const ExperimentConfig& c) {
    return json{{"n", c.n},
                {"f", c.f},
                {"rounds", c.rounds},
                {"q", c.q},
                {"m", c.m},
                {"k", c.k},
                {"protocol", std::string(to_string(c.protocol))},
                {"closure", std::string(to_string(c.closure))},
                {"adversary", {{"name", c.adversary}, {"delay", c.withhold_delay}}},
                {"seeds", c.seeds},
                {"tx_rate", c.tx_rate},
                {"coinbase", c.coinbase},
                {"tail", c.tail}};
}

std::vector<std::uint64_t> parse_seed_range(std::string_view text) {
    std::vector<std::uint64_t> out;
    if (auto dots = text.find(".."); dots != std::string_view::npos) {
        const auto a = parse_u64(text.substr(0, dots));
        const auto b = parse_u64(text.substr(dots + 2));
        if (b < a) invalid("empty seed range '" + std::string(text) + "'");
        for (auto s = a; s <= b; ++s) out.push_back(s);
        return out;
    }
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_u64(text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) invalid("no seeds");
    return out;
}

SeedOutcome run_seed(const ExperimentConfig& config, std::uint64_t seed) {
    SeedOutcome out;
    auto base_adversary = make_adversary(config.adversary_spec());
    out.base = simulate(config.simulation(seed, ClosureMode::Off), *base_adversary);
    if (config.closure != ClosureMode::Off) {
        auto twin_adversary = make_adversary(config.adversary_spec());
        out.closure = simulate(config.simulation(seed, config.closure), *twin_adversary);
    }
    return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    validate(config);
    ExperimentReport report;
    report.config = config;
    const PropertyOptions options{config.tail};
    const auto trace_dir = config.output_dir / "traces";
    const bool write = !config.output_dir.empty();
    if (write) {
        std::error_code ec;
        std::filesystem::create_directories(config.write_traces ? trace_dir : config.output_dir, ec);
        if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + config.output_dir.string());
    }

    for (auto seed : config.seeds) {
        auto outcome = run_seed(config, seed);
        auto base_row = row_for(outcome.base, seed, options);
        if (base_row.violations > 0)
            report.problems.push_back(violation_problem(seed, base_row));
        report.rows.push_back(base_row);
        if (write && config.write_traces)
            outcome.base.write(trace_dir / ("seed-" + std::to_string(seed) + "-base.jsonl"));

        if (!outcome.closure) continue;
        auto row = row_for(*outcome.closure, seed, options);
        const auto cmp = compare_paired(outcome.base, *outcome.closure);
        for (const auto& [id, d] : cmp.latency_deltas)
            if (d > 0) ++row.latency_violations;
        row.dominance_ok = cmp.violations.empty();
        if (row.violations > 0)
            report.problems.push_back(violation_problem(seed, row));
        for (const auto& v : cmp.violations) report.problems.push_back("seed " + std::to_string(seed) + ": " + v);
        report.rows.push_back(row);
        if (write && config.write_traces)
            outcome.closure->write(trace_dir / ("seed-" + std::to_string(seed) + "-" + row.mode + ".jsonl"));
    }

    if (write) {
        std::ofstream csv(config.output_dir / "metrics.csv");
        std::ofstream summary(config.output_dir / "summary.json");
        if (!csv || !summary) throw Error(ErrorCode::IoFailure, "cannot write reports in " + config.output_dir.string());
        csv << report.to_csv();
        summary << report.summary().dump(2) << '\n';
    }
    return report;
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream out;
    out << "seed,adversary,protocol,mode,delivered,throughput,throughput_min,throughput_max,tx_throughput,"
           "latency_mean,unresolved,abandoned,forked_rounds,weak_refs,violations,latency_violations,dominance_ok,"
           "digest\n";
    for (const auto& r : rows) {
        out << r.seed << ',' << config.adversary << ',' << to_string(config.protocol) << ',' << r.mode << ','
            << r.delivered << ',' << r.throughput << ',' << r.throughput_min << ',' << r.throughput_max << ','
            << r.tx_throughput << ',' << r.latency_mean << ',' << r.unresolved << ',' << r.abandoned << ','
            << r.forked_rounds << ',' << r.weak_refs << ',' << r.violations << ',' << r.latency_violations << ','
            << (r.dominance_ok ? "true" : "false") << ',' << hex64(r.digest) << '\n';
    }
    return out.str();
}

json ExperimentReport::summary() const {
    auto stats = [](const Summary& s) {
        return json{{"count", s.count}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"ci95", s.ci95}};
    };
    json modes = json::object();
    std::vector<std::string> names;
    for (const auto& r : rows)
        if (std::find(names.begin(), names.end(), r.mode) == names.end()) names.push_back(r.mode);
    for (const auto& name : names) {
        std::vector<double> tp, txtp, lat, ab;
        std::size_t violations = 0;
        for (const auto& r : rows) {
            if (r.mode != name) continue;
            tp.push_back(r.throughput);
            txtp.push_back(r.tx_throughput);
            lat.push_back(r.latency_mean);
            ab.push_back(static_cast<double>(r.abandoned));
            violations += r.violations;
        }
        modes[name] = {{"throughput", stats(summarize(tp))},
                       {"tx_throughput", stats(summarize(txtp))},
                       {"latency", stats(summarize(lat))},
                       {"abandoned", stats(summarize(ab))},
                       {"property_violations", violations}};
    }
    std::size_t latency_violations = 0, dominance_failures = 0;
    for (const auto& r : rows) {
        latency_violations += r.latency_violations;
        if (!r.dominance_ok) ++dominance_failures;
    }
    return json{{"config", to_json(config)},
                {"note", "means over seeds for one adversary; an estimate, not the infimum over all adversaries"},
                {"modes", modes},
                {"paired", {{"latency_violations", latency_violations}, {"dominance_failures", dominance_failures}}},
                {"problems", problems},
                {"ok", ok()}};
}

} // namespace tcsim
