#include "tcsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "tcsim/errors.hpp"

namespace tcsim {

namespace {

void require_rounds(const ExecutionTrace& trace) {
    if (trace.header.rounds < 1) throw Error(ErrorCode::EmptyTrace, "trace covers no rounds");
}

std::size_t distinct_delivered(const ExecutionTrace& trace, ProcessId observer) {
    const auto seq = trace.delivered(observer);
    return std::unordered_set<BlockId>(seq.begin(), seq.end()).size();
}

// First delivery round of every transaction delivered by `observer`.
std::unordered_map<TxId, Round> first_delivery(const ExecutionTrace& trace, ProcessId observer) {
    std::unordered_map<TxId, Round> out;
    const Layer layer = trace.effective_layer();
    for (const auto& ev : trace.events) {
        if (ev.kind != EventKind::Deliver || ev.actor != observer || ev.layer != layer) continue;
        for (const auto& tx : trace.block(ev.block).txs) out.try_emplace(tx.id, ev.round);
    }
    return out;
}

} // namespace

double throughput_of(const ExecutionTrace& trace, ProcessId observer) {
    require_rounds(trace);
    return static_cast<double>(distinct_delivered(trace, observer)) / trace.header.rounds;
}

double tx_throughput_of(const ExecutionTrace& trace, ProcessId observer) {
    require_rounds(trace);
    const auto first = first_delivery(trace, observer);
    std::size_t count = 0;
    for (const auto& [id, round] : first) {
        auto it = trace.txs().find(id);
        if (it != trace.txs().end() && !it->second.coinbase) ++count;
    }
    return static_cast<double>(count) / trace.header.rounds;
}

LatencyReport latency_of(const ExecutionTrace& trace, ProcessId observer) {
    require_rounds(trace);
    const auto first = first_delivery(trace, observer);
    LatencyReport report;
    std::int64_t total = 0;
    for (const auto& [id, tx] : trace.txs()) {
        if (tx.coinbase) continue;
        auto it = first.find(id);
        if (it == first.end()) {
            ++report.unresolved;
            continue;
        }
        const auto lat = static_cast<std::int64_t>(it->second) - static_cast<std::int64_t>(tx.broadcast_round);
        report.per_tx.emplace(id, lat);
        total += lat;
    }
    if (!report.per_tx.empty()) report.mean = static_cast<double>(total) / static_cast<double>(report.per_tx.size());
    return report;
}

ProcessId default_observer(const ExecutionTrace& trace) {
    const auto honest = trace.honest_processes();
    if (honest.empty()) throw Error(ErrorCode::EmptyTrace, "trace has no honest process");
    return honest.front();
}

namespace {

BlockSet undelivered_below_horizon(const ExecutionTrace& trace, ProcessId observer, bool honest_only) {
    const auto seq = trace.delivered(observer);
    BlockSet out;
    if (seq.empty()) return out;
    const std::unordered_set<BlockId> delivered(seq.begin(), seq.end());
    Round horizon = 0;
    for (const auto& id : seq) horizon = std::max(horizon, trace.block(id).mined_round);
    for (const auto& ev : trace.events) {
        if (ev.kind != EventKind::Mine || (honest_only && !ev.honest)) continue;
        if (ev.round <= horizon && !delivered.contains(ev.block)) out.insert(ev.block);
    }
    return out;
}

} // namespace

BlockSet abandoned_blocks(const ExecutionTrace& trace, ProcessId observer) {
    return undelivered_below_horizon(trace, observer, true);
}

BlockSet stale_blocks(const ExecutionTrace& trace, ProcessId observer) {
    return undelivered_below_horizon(trace, observer, false);
}

BlockSet abandoned_blocks(const ExecutionTrace& trace) {
    return abandoned_blocks(trace, default_observer(trace));
}

bool detect_forked_round(const ExecutionTrace& trace, Round r) {
    std::unordered_set<ProcessId> miners;
    for (const auto& ev : trace.events) {
        if (ev.kind == EventKind::Mine && ev.round == r && ev.honest) miners.insert(ev.actor);
    }
    return miners.size() >= 2;
}

std::size_t forked_round_count(const ExecutionTrace& trace) {
    std::map<Round, std::unordered_set<ProcessId>> miners;
    for (const auto& ev : trace.events) {
        if (ev.kind == EventKind::Mine && ev.honest) miners[ev.round].insert(ev.actor);
    }
    return static_cast<std::size_t>(
        std::count_if(miners.begin(), miners.end(), [](const auto& kv) { return kv.second.size() >= 2; }));
}

PairedComparison compare_paired(const ExecutionTrace& base, const ExecutionTrace& closure) {
    const auto& hb = base.header;
    const auto& hc = closure.header;
    const bool same = hb.seed == hc.seed && hb.n == hc.n && hb.f == hc.f && hb.rounds == hc.rounds && hb.q == hc.q &&
                      hb.m == hc.m && hb.k == hc.k && hb.protocol == hc.protocol && hb.adversary == hc.adversary &&
                      hb.corrupted == hc.corrupted && hb.coinbase == hc.coinbase && hb.tx_rate == hc.tx_rate;
    if (!same) throw Error(ErrorCode::UnpairedTraces, "traces differ in seed, parameters or adversary");
    if (hb.closure != ClosureMode::Off || hc.closure == ClosureMode::Off)
        throw Error(ErrorCode::UnpairedTraces, "expected one base trace and one closure trace");

    PairedComparison out;
    out.observer = default_observer(base);
    out.base_delivered = distinct_delivered(base, out.observer);
    out.closure_delivered = distinct_delivered(closure, out.observer);
    out.base_abandoned = abandoned_blocks(base, out.observer).size();
    out.closure_abandoned = abandoned_blocks(closure, out.observer).size();
    out.base_stale = stale_blocks(base, out.observer).size();
    out.throughput_delta = throughput_of(closure, out.observer) - throughput_of(base, out.observer);

    const auto lb = latency_of(base, out.observer);
    const auto lc = latency_of(closure, out.observer);
    for (const auto& [id, lat] : lb.per_tx) {
        auto it = lc.per_tx.find(id);
        if (it == lc.per_tx.end()) continue;
        const auto delta = it->second - lat;
        out.latency_deltas.emplace(id, delta);
        if (delta > 0)
            out.violations.push_back("latency: tx " + id.hex() + " delayed by " + std::to_string(delta) + " rounds");
    }
    if (out.closure_delivered < out.base_delivered)
        out.violations.push_back("throughput: closure delivered fewer blocks");
    if (out.base_abandoned > 0 && out.closure_delivered <= out.base_delivered)
        out.violations.push_back("throughput: abandoned blocks present but no strict gain");
    if (out.base_stale == 0 && out.closure_delivered != out.base_delivered)
        out.violations.push_back("throughput: fork-free pair with unequal counts");
    return out;
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    // Summation rounding can push the mean of equal values past them.
    s.mean = std::clamp(s.mean, s.min, s.max);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        const double sd = std::sqrt(ss / static_cast<double>(s.count - 1));
        s.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(s.count));
    }
    return s;
}

ObserverRange throughput_range(const ExecutionTrace& trace) {
    std::vector<double> values;
    for (auto p : trace.honest_processes()) values.push_back(throughput_of(trace, p));
    const auto s = summarize(values);
    return {s.min, s.mean, s.max};
}

} // namespace tcsim
