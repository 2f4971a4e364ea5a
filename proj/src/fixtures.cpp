#include "tcsim/fixtures.hpp"

#include <vector>

namespace tcsim {

namespace {

struct Step {
    const char* label;
    const char* parent;
    ProcessId miner;
    Round round;
};

constexpr Step kSchedule[] = {
    {"b1", "genesis", 0, 1}, {"b2", "b1", 1, 2}, {"b3", "b2", 2, 3}, {"b4", "b3", 1, 5},
    {"b5", "b3", 0, 4},      {"b6", "b5", 0, 5}, {"b7", "b4", 1, 6}, {"b8", "b4", 2, 6},
    {"b9", "b6", 3, 7},      {"b10", "b6", 2, 7}, {"b11", "b10", 1, 8},
};

constexpr const char* kMainChain[] = {"b1", "b2", "b3", "b5", "b6", "b10", "b11"};

constexpr std::uint32_t kProcesses = 4;
constexpr Round kTxRound = 3;
constexpr Round kDeliveryRound = 9;

} // namespace

ScriptedExecution figure2_execution(ClosureMode mode) {
    ScriptedExecution out;
    auto& trace = out.trace;
    auto& h = trace.header;
    h.seed = 0;
    h.n = kProcesses;
    h.f = 0;
    h.rounds = kDeliveryRound + 1;
    h.q = 0.0;
    h.m = 10;
    h.k = 1;
    h.closure = mode;
    h.adversary = "scripted";
    h.tx_rate = 0.0;
    h.origin = mode == ClosureMode::Off ? TraceOrigin::Base : TraceOrigin::Closure;

    out.ids["genesis"] = genesis_block().id;

    Transaction t1;
    t1.id = TxId{mix64(0x7431)};
    t1.broadcast_round = kTxRound;
    t1.origin = 3;

    std::vector<DagStore> views(kProcesses, DagStore::with_genesis());
    std::vector<std::optional<ClosureState>> closure(kProcesses);
    if (mode != ClosureMode::Off)
        for (ProcessId p = 0; p < kProcesses; ++p) closure[p].emplace(p, mode, h.m);

    std::vector<BlockPtr> previous_round;
    for (Round r = 0; r <= kDeliveryRound; ++r) {
        for (ProcessId p = 0; p < kProcesses; ++p) {
            for (const auto& b : previous_round) {
                if (b->miner == p) continue;
                trace.record({EventKind::Receive, r, p, b->id});
                views[p].insert(b);
                if (closure[p]) closure[p]->on_foreign_mined(*b);
            }
        }
        if (r == kTxRound) trace.record_tx(r, t1);

        std::vector<BlockPtr> mined;
        for (const auto& step : kSchedule) {
            if (step.round != r) continue;
            std::vector<Transaction> txs{make_coinbase(step.miner, r)};
            const std::string label = step.label;
            if (label == "b4" || label == "b10") txs.push_back(t1);
            Block b = make_block({out.ids.at(step.parent)}, std::move(txs), step.miner, r);
            auto& view = views[step.miner];
            if (closure[step.miner]) b = *closure[step.miner]->on_base_mined(b, step.miner, view);
            auto ptr = std::make_shared<const Block>(std::move(b));
            view.insert(ptr);
            out.ids[label] = ptr->id;
            h.labels[ptr->id] = label;
            trace.record_mine(r, ptr, true);
            trace.record({EventKind::Broadcast, r, step.miner, ptr->id});
            mined.push_back(ptr);
        }
        previous_round = std::move(mined);
    }

    for (ProcessId p = 0; p < kProcesses; ++p) {
        for (const char* label : kMainChain) {
            TraceEvent ev{EventKind::Deliver, kDeliveryRound, p, out.ids.at(label)};
            ev.layer = Layer::Base;
            trace.record(ev);
            if (!closure[p]) continue;
            for (const auto& id : closure[p]->on_base_deliver(ev.block, views[p])) {
                ev.block = id;
                ev.layer = Layer::Closure;
                trace.record(ev);
            }
        }
    }
    return out;
}

} // namespace tcsim
