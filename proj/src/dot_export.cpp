#include "tcsim/dot_export.hpp"

#include "tcsim/errors.hpp"

namespace tcsim {

namespace {

void check_round(const ExecutionTrace& trace, Round round) {
    if (round > trace.header.rounds)
        throw Error(ErrorCode::UnknownRound,
                    "round " + std::to_string(round) + " beyond trace of " + std::to_string(trace.header.rounds));
}

} // namespace

DagStore view_at(const ExecutionTrace& trace, Round round, ProcessId observer) {
    check_round(trace, round);
    DagStore view = DagStore::with_genesis();
    OrphanPool orphans;
    for (const auto& ev : trace.events) {
        if (ev.round > round) break;
        const bool own_mine = ev.kind == EventKind::Mine && ev.actor == observer;
        const bool receipt = ev.kind == EventKind::Receive && ev.actor == observer;
        if (own_mine || receipt) orphans.accept(view, trace.blocks().at(ev.block));
    }
    return view;
}

std::string export_dot(const ExecutionTrace& trace, Round round, ProcessId observer) {
    DotStyle style;
    style.label = [&](BlockId id) { return trace.label(id); };
    for (const auto& ev : trace.events) {
        if (ev.round > round) break;
        if (ev.kind == EventKind::Deliver && ev.actor == observer && ev.layer == trace.effective_layer())
            style.delivered.insert(ev.block);
    }
    return to_dot(view_at(trace, round, observer), style);
}

} // namespace tcsim
