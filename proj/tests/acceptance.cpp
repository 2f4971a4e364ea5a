// Acceptance suite: one PASS/FAIL line per criterion; exits 1 if any fails.
//
//   acceptance                      run everything
//   acceptance --only 3,5           run a subset
//   acceptance --record-baseline    measure and freeze the fork_amplifier baseline

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "oracles.hpp"
#include "tcsim/adversary.hpp"
#include "tcsim/closure.hpp"
#include "tcsim/engine.hpp"
#include "tcsim/experiment.hpp"
#include "tcsim/fixtures.hpp"
#include "tcsim/metrics.hpp"
#include "tcsim/properties.hpp"

#ifndef TCSIM_TEST_DATA_DIR
#define TCSIM_TEST_DATA_DIR "tests/data"
#endif

using namespace tcsim;
namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kSeeds = 100;
constexpr std::uint32_t kRounds = 2000;

// Safety runs: the base protocol is empirically secure against the menu at
// this block rate and depth, with f <= n/4.
constexpr double kMenuQ = 0.05;
constexpr std::uint32_t kMenuK = 6;

struct MenuEntry {
    std::string name;
    std::uint32_t f;
};

const std::vector<MenuEntry>& menu() {
    static const std::vector<MenuEntry> m{
        {"honest", 0}, {"fork_amplifier", 1}, {"withholding", 1}, {"withholding", 2}};
    return m;
}

std::string menu_label(const MenuEntry& e) {
    return e.f == 0 ? e.name : e.name + "(f=" + std::to_string(e.f) + ")";
}

ExperimentConfig experiment(const std::string& adversary, std::uint32_t f, double q, std::uint32_t k) {
    ExperimentConfig c;
    c.adversary = adversary;
    c.f = f;
    c.q = q;
    c.k = k;
    c.rounds = kRounds;
    c.record_receives = true;
    return c;
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(precision) << v;
    return o.str();
}

std::size_t weak_ref_count(const ExecutionTrace& trace) {
    std::size_t total = 0;
    for (const auto& [id, b] : trace.blocks()) total += b->weak_refs.size();
    return total;
}

// Everything the paired criteria need from one sweep. Traces are dropped as
// soon as a seed has been measured.
struct SweepStats {
    std::string label;
    std::size_t pairs = 0;
    // Properties
    std::size_t traces_checked = 0;
    std::map<std::string, std::size_t> property_failures;
    std::string first_failure;
    // Latency
    std::size_t latency_compared = 0;
    std::size_t latency_positive = 0;
    std::int64_t latency_worst = std::numeric_limits<std::int64_t>::min();
    // Throughput
    std::size_t with_abandoned = 0, strict = 0, fork_free = 0, equal = 0;
    std::size_t forked_rounds = 0, rounds = 0;
    double base_throughput = 0.0, closure_throughput = 0.0;
    std::size_t plus = 0, same = 0, minus = 0, forked_seeds = 0;
    // Replay oracle
    std::size_t replay_sequences = 0, replay_blocks = 0, replay_mismatches = 0;
    // Greedy
    std::size_t greedy_seeds = 0, greedy_set_mismatch = 0, greedy_fewer = 0;
    std::size_t leaves_refs = 0, greedy_refs = 0;
};

struct SweepPlan {
    std::string adversary;
    std::uint32_t f;
    double q;
    std::uint32_t k;
    bool properties;
    bool replay_and_greedy;
    std::uint32_t rounds = kRounds;
};

SweepStats run_sweep(const SweepPlan& plan) {
    SweepStats st;
    const MenuEntry entry{plan.adversary, plan.f};
    st.label = menu_label(entry) + " q=" + fmt(plan.q, 2) + " rounds=" + std::to_string(plan.rounds);
    auto config = experiment(plan.adversary, plan.f, plan.q, plan.k);
    config.record_receives = plan.properties;
    config.rounds = plan.rounds;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        auto outcome = run_seed(config, seed);
        const auto& base = outcome.base;
        const auto& closure = *outcome.closure;
        ++st.pairs;

        if (plan.properties) {
            for (const auto* trace : {&base, &closure}) {
                ++st.traces_checked;
                for (const auto& [p, msgs] : check_properties(*trace).violations) {
                    if (msgs.empty()) continue;
                    st.property_failures[std::string(to_string(p))] += msgs.size();
                    if (st.first_failure.empty())
                        st.first_failure = st.label + " seed " + std::to_string(seed) + ": " + msgs.front();
                }
            }
        }

        const auto cmp = compare_paired(base, closure);
        for (const auto& [tx, delta] : cmp.latency_deltas) {
            ++st.latency_compared;
            st.latency_worst = std::max(st.latency_worst, delta);
            if (delta > 0) ++st.latency_positive;
        }
        if (cmp.base_abandoned > 0) {
            ++st.with_abandoned;
            if (cmp.closure_delivered > cmp.base_delivered) ++st.strict;
        }
        if (cmp.base_stale == 0) {
            ++st.fork_free;
            if (cmp.closure_delivered == cmp.base_delivered) ++st.equal;
        }
        const auto forked = forked_round_count(base);
        st.forked_rounds += forked;
        st.rounds += base.header.rounds;
        if (forked > 0) ++st.forked_seeds;
        const double tb = throughput_of(base, cmp.observer), tc = throughput_of(closure, cmp.observer);
        st.base_throughput += tb;
        st.closure_throughput += tc;
        if (tc > tb) ++st.plus;
        else if (tc == tb) ++st.same;
        else ++st.minus;

        if (plan.replay_and_greedy) {
            if (seed <= 20) {
                for (auto p : closure.honest_processes()) {
                    ++st.replay_sequences;
                    const auto got = closure.delivered(p, Layer::Closure);
                    st.replay_blocks += got.size();
                    if (got != oracle::replay_closure(closure, p)) ++st.replay_mismatches;
                }
            }
            auto adversary = make_adversary(config.adversary_spec());
            auto sim = config.simulation(seed, ClosureMode::Greedy);
            sim.record_receives = false;
            const auto greedy = simulate(sim, *adversary);
            ++st.greedy_seeds;
            for (auto p : closure.honest_processes()) {
                const auto a = closure.delivered(p);
                const auto b = greedy.delivered(p);
                if (BlockSet(a.begin(), a.end()) != BlockSet(b.begin(), b.end())) {
                    ++st.greedy_set_mismatch;
                    break;
                }
            }
            const auto l = weak_ref_count(closure), g = weak_ref_count(greedy);
            st.leaves_refs += l;
            st.greedy_refs += g;
            if (g < l) ++st.greedy_fewer;
        }
    }
    return st;
}

// Sweeps are run once, on first use.
class Sweeps {
public:
    const SweepStats& honest_default() { return get({"honest", 0, 0.02, 6, false, true}); }
    const SweepStats& menu_entry(const MenuEntry& e) {
        return get({e.name, e.f, kMenuQ, kMenuK, true, e.name == "fork_amplifier"});
    }
    // Short runs, where many seeds never fork.
    const SweepStats& honest_short() { return get({"honest", 0, 0.02, 6, false, false, 200}); }
    std::vector<const SweepStats*> paired() {
        std::vector<const SweepStats*> out{&honest_default(), &honest_short()};
        for (const auto& e : menu()) out.push_back(&menu_entry(e));
        return out;
    }

private:
    const SweepStats& get(const SweepPlan& plan) {
        const auto key = plan.adversary + '/' + std::to_string(plan.f) + '/' + fmt(plan.q, 3) + '/' +
                         std::to_string(plan.rounds);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, run_sweep(plan)).first;
        return it->second;
    }
    std::map<std::string, SweepStats> cache_;
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

// 1. Atomic broadcast properties over the adversary menu.
Outcome properties_over_menu(Sweeps& sweeps) {
    std::map<std::string, std::size_t> failures;
    std::size_t traces = 0;
    std::string first;
    for (const auto& entry : menu()) {
        const auto& st = sweeps.menu_entry(entry);
        traces += st.traces_checked;
        for (const auto& [p, n] : st.property_failures) failures[p] += n;
        if (first.empty()) first = st.first_failure;
    }
    std::ostringstream d;
    d << traces << " traces (" << menu().size() << " adversaries x " << kSeeds << " seeds x {base, closure}, q="
      << kMenuQ << ", k=" << kMenuK << ")";
    if (failures.empty()) {
        d << ", zero violations";
        return {true, d.str()};
    }
    d << ", violations:";
    for (const auto& [p, n] : failures) d << ' ' << p << '=' << n;
    d << "; first: " << first;
    return {false, d.str()};
}

// 2. Per-transaction latency never increases under the closure.
Outcome latency_never_worse(Sweeps& sweeps) {
    std::size_t pairs = 0, compared = 0, bad = 0;
    std::int64_t worst = std::numeric_limits<std::int64_t>::min();
    for (const auto* st : sweeps.paired()) {
        pairs += st->pairs;
        compared += st->latency_compared;
        bad += st->latency_positive;
        worst = std::max(worst, st->latency_worst);
    }
    std::ostringstream d;
    d << pairs << " paired executions, " << compared << " transactions compared, max delta " << worst
      << ", positive deltas " << bad;
    return {bad == 0 && compared > 0, d.str()};
}

// 3. Strict dominance with abandoned blocks, equality without forks, and the
// forked-round rate against the closed form.
Outcome throughput_dominance(Sweeps& sweeps) {
    std::size_t pairs = 0, with_abandoned = 0, strict = 0, fork_free = 0, equal = 0;
    for (const auto* st : sweeps.paired()) {
        pairs += st->pairs;
        with_abandoned += st->with_abandoned;
        strict += st->strict;
        fork_free += st->fork_free;
        equal += st->equal;
    }
    const auto& honest = sweeps.honest_default();
    const double expected = oracle::forked_round_probability(0.02, 10);
    const double rate = static_cast<double>(honest.forked_rounds) / static_cast<double>(honest.rounds);
    const double se = std::sqrt(expected * (1.0 - expected) / static_cast<double>(honest.rounds));
    const double z = (rate - expected) / se;
    const double share = static_cast<double>(honest.with_abandoned) / static_cast<double>(honest.pairs);

    std::ostringstream d;
    d << pairs << " pairs: " << strict << '/' << with_abandoned << " strict with abandoned blocks, " << equal << '/'
      << fork_free << " equal when fork-free; q=0.02 seeds with abandoned blocks " << fmt(100.0 * share, 1)
      << "%; forked-round rate " << fmt(rate, 5) << " vs " << fmt(expected, 5) << " (z=" << fmt(z, 2) << ")";
    const bool ok = strict == with_abandoned && equal == fork_free && fork_free > 0 && share >= 0.99 &&
                    std::abs(z) <= 3.0;
    return {ok, d.str()};
}

// 4. Goodput under the honest adversary.
Outcome goodput(Sweeps& sweeps) {
    const auto& st = sweeps.honest_default();
    const double n = static_cast<double>(st.pairs);
    const double base_mean = st.base_throughput / n, closure_mean = st.closure_throughput / n;
    const bool ok = st.minus == 0 && closure_mean >= base_mean && (st.forked_seeds == 0 || closure_mean > base_mean);
    std::ostringstream d;
    d << "mean blocks/round base " << fmt(base_mean, 5) << ", closure " << fmt(closure_mean, 5) << "; per-seed sign +"
      << st.plus << " =" << st.same << " -" << st.minus << "; forked seeds " << st.forked_seeds;
    return {ok, d.str()};
}

// 5. The scripted eleven-block example.
Outcome golden_example() {
    const auto fx = figure2_execution(ClosureMode::LeavesOfAbandoned);
    std::vector<std::string> problems;
    auto labels = [&](const auto& ids) {
        std::vector<std::string> out;
        for (auto id : ids) out.push_back(fx.trace.label(id));
        return out;
    };

    // abandoned(b11) as seen by its miner just before mining it.
    const Block b11 = strip_weak_refs(fx.trace.block(fx["b11"]));
    DagStore store = DagStore::with_genesis();
    ClosureState state(0, ClosureMode::LeavesOfAbandoned, fx.trace.header.m);
    for (const auto& ev : fx.trace.events) {
        if (ev.kind != EventKind::Mine || ev.round >= b11.mined_round) continue;
        store.insert(fx.trace.blocks().at(ev.block));
        state.on_foreign_mined(fx.trace.block(ev.block));
    }
    if (state.abandoned(b11, store) != BlockSet{fx["b9"]}) problems.push_back("abandoned(b11) != {b9}");
    if (fx.trace.block(fx["b11"]).weak_refs != std::vector<BlockId>{fx["b9"]})
        problems.push_back("weak_refs(b11) != [b9]");

    const auto order = labels(fx.trace.delivered(0, Layer::Closure));
    const auto pos = [&](const std::string& l) { return std::find(order.begin(), order.end(), l) - order.begin(); };
    if (!(pos("b10") < pos("b9") && pos("b9") + 1 == pos("b11") && pos("b11") < std::ssize(order)))
        problems.push_back("closure order does not place b9 between b10 and b11");

    const auto stripped = strip_to_equivalent(fx.trace);
    std::set<std::string> base_abandoned;
    for (auto id : abandoned_blocks(stripped, 0)) base_abandoned.insert(stripped.label(id));
    if (base_abandoned != std::set<std::string>{"b4", "b7", "b8", "b9"}) problems.push_back("base abandons a different set");
    const auto direct = figure2_execution(ClosureMode::Off);
    std::set<std::string> direct_abandoned;
    for (auto id : abandoned_blocks(direct.trace, 0)) direct_abandoned.insert(direct.trace.label(id));
    if (direct_abandoned != base_abandoned) problems.push_back("scripted base run disagrees with the stripped trace");

    std::ostringstream d;
    d << "closure order";
    for (const auto& l : order) d << ' ' << l;
    d << "; base abandons {";
    for (auto it = base_abandoned.begin(); it != base_abandoned.end(); ++it)
        d << (it == base_abandoned.begin() ? "" : ",") << *it;
    d << '}';
    for (const auto& p : problems) d << "; " << p;
    return {problems.empty(), d.str()};
}

// 6. Forkability under fork_amplifier(f=3) against the frozen baseline.
constexpr std::uint32_t kAmplifierF = 3;
constexpr double kAmplifierQ = 0.05;

std::vector<std::size_t> amplifier_counts() {
    auto config = experiment("fork_amplifier", kAmplifierF, kAmplifierQ, 6);
    config.closure = ClosureMode::Off;
    config.record_receives = false;
    std::vector<std::size_t> counts;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed)
        counts.push_back(abandoned_blocks(run_seed(config, seed).base).size());
    return counts;
}

fs::path baseline_path() { return fs::path(TCSIM_TEST_DATA_DIR) / "fork_amplifier_baseline.json"; }

double positive_share(const std::vector<std::size_t>& counts) {
    const auto positive = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
    return static_cast<double>(positive) / static_cast<double>(counts.size());
}

int record_baseline() {
    const auto counts = amplifier_counts();
    nlohmann::json j;
    j["adversary"] = "fork_amplifier";
    j["n"] = 10;
    j["f"] = kAmplifierF;
    j["q"] = kAmplifierQ;
    j["k"] = 6;
    j["rounds"] = kRounds;
    j["seeds"] = kSeeds;
    j["abandoned"] = counts;
    j["share_with_abandoned"] = positive_share(counts);
    fs::create_directories(baseline_path().parent_path());
    std::ofstream(baseline_path()) << j.dump(2) << '\n';
    std::cout << "wrote " << baseline_path().string() << " (share " << positive_share(counts) << ")\n";
    return 0;
}

Outcome amplifier_forkability() {
    std::ifstream in(baseline_path());
    if (!in) return {false, "missing baseline " + baseline_path().string()};
    const auto frozen = nlohmann::json::parse(in);
    const auto want = frozen.at("abandoned").get<std::vector<std::size_t>>();
    const auto counts = amplifier_counts();
    const double share = positive_share(counts);
    std::size_t mismatched = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (i >= want.size() || want[i] != counts[i]) ++mismatched;
    std::ostringstream d;
    d << "f=" << kAmplifierF << ", q=" << kAmplifierQ << ": " << fmt(100.0 * share, 1)
      << "% of seeds abandon a base block (frozen baseline " << fmt(100.0 * frozen.at("share_with_abandoned").get<double>(), 1)
      << "%), " << mismatched << " seeds differ from the baseline";
    return {share >= 0.95 && mismatched == 0 && want.size() == counts.size(), d.str()};
}

// 7. Closure delivery against the independent replay.
Outcome replay_oracle(Sweeps& sweeps) {
    std::size_t sequences = 0, mismatched = 0, blocks = 0;
    for (const auto* st : {&sweeps.honest_default(), &sweeps.menu_entry({"fork_amplifier", 1})}) {
        sequences += st->replay_sequences;
        blocks += st->replay_blocks;
        mismatched += st->replay_mismatches;
    }
    std::ostringstream d;
    d << sequences << " delivery sequences over 20 seeds (honest q=0.02, fork_amplifier(f=1) q=" << kMenuQ << "), "
      << blocks << " blocks, " << mismatched << " mismatches";
    return {mismatched == 0 && sequences > 0, d.str()};
}

std::string file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// 8. Byte-identical trace files from repeated runs.
Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / ("tcsim-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    struct Case {
        std::string adversary;
        std::uint32_t f;
        double q;
        ClosureMode mode;
        ForkChoice protocol;
    };
    const std::vector<Case> cases{
        {"honest", 0, 0.02, ClosureMode::LeavesOfAbandoned, ForkChoice::LongestChain},
        {"honest", 0, 0.02, ClosureMode::Greedy, ForkChoice::Ghost},
        {"fork_amplifier", 1, 0.05, ClosureMode::LeavesOfAbandoned, ForkChoice::LongestChain},
        {"withholding", 2, 0.05, ClosureMode::LeavesOfAbandoned, ForkChoice::Ghost},
    };
    std::size_t files = 0, differing = 0;
    for (const auto& c : cases) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            std::uint64_t digests[2][2];
            for (int attempt = 0; attempt < 2; ++attempt) {
                auto config = experiment(c.adversary, c.f, c.q, kMenuK);
                config.closure = c.mode;
                config.protocol = c.protocol;
                auto outcome = run_seed(config, seed);
                const auto base_path = dir / ("base-" + std::to_string(attempt) + ".jsonl");
                const auto closure_path = dir / ("closure-" + std::to_string(attempt) + ".jsonl");
                outcome.base.write(base_path);
                outcome.closure->write(closure_path);
                digests[attempt][0] = fnv1a(file_bytes(base_path));
                digests[attempt][1] = fnv1a(file_bytes(closure_path));
            }
            for (int i = 0; i < 2; ++i) {
                ++files;
                if (digests[0][i] != digests[1][i]) ++differing;
            }
        }
    }
    fs::remove_all(dir);
    std::ostringstream d;
    d << files << " trace files written twice (base and closure, both fork-choice rules, honest and adversarial), "
      << differing << " differ";
    return {differing == 0, d.str()};
}

// 9. Greedy and leaves-of-abandoned deliver the same blocks.
Outcome greedy_equivalence(Sweeps& sweeps) {
    std::size_t seeds = 0, set_mismatch = 0, fewer = 0, leaves_refs = 0, greedy_refs = 0;
    for (const auto* st : {&sweeps.honest_default(), &sweeps.menu_entry({"fork_amplifier", 1})}) {
        seeds += st->greedy_seeds;
        set_mismatch += st->greedy_set_mismatch;
        fewer += st->greedy_fewer;
        leaves_refs += st->leaves_refs;
        greedy_refs += st->greedy_refs;
    }
    std::ostringstream d;
    d << seeds << " seeds (honest q=0.02, fork_amplifier(f=1) q=" << kMenuQ << "): " << set_mismatch
      << " with different delivered sets, " << fewer << " where greedy used fewer weak references; total weak refs "
      << leaves_refs << " leaves vs " << greedy_refs << " greedy";
    return {seeds > 0 && set_mismatch == 0 && fewer == 0, d.str()};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    bool record = false;
    std::vector<int> only;
    app.add_flag("--record-baseline", record, "measure and write the fork_amplifier baseline");
    app.add_option("--only", only, "criteria to run")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    if (record) return record_baseline();

    Sweeps sweeps;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"BAB properties over the adversary menu", [&] { return properties_over_menu(sweeps); }},
        {"latency never increases", [&] { return latency_never_worse(sweeps); }},
        {"throughput dominance", [&] { return throughput_dominance(sweeps); }},
        {"goodput", [&] { return goodput(sweeps); }},
        {"scripted example", [] { return golden_example(); }},
        {"forkability under fork_amplifier", [] { return amplifier_forkability(); }},
        {"replay oracle equivalence", [&] { return replay_oracle(sweeps); }},
        {"determinism", [] { return determinism(); }},
        {"greedy equivalence", [&] { return greedy_equivalence(sweeps); }},
    };

    int failed = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failed;
        std::cout << "criterion " << number << ' ' << (outcome.pass ? "PASS" : "FAIL") << " [" << criteria[i].first
                  << "] " << outcome.detail << std::endl;
    }
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << " in "
              << fmt(secs, 1) << "s" << std::endl;
    return failed == 0 ? 0 : 1;
}
