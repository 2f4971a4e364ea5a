#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcsim/trace.hpp"

namespace tcsim {

// Distinct blocks the observer delivered, divided by the round count.
double throughput_of(const ExecutionTrace& trace, ProcessId observer);
// Distinct broadcast (non-coinbase) transactions delivered per round.
double tx_throughput_of(const ExecutionTrace& trace, ProcessId observer);

struct LatencyReport {
    // Per transaction: first delivery round of a containing block minus broadcast round.
    std::map<TxId, std::int64_t> per_tx;
    std::size_t unresolved = 0;
    double mean = 0.0;
};

LatencyReport latency_of(const ExecutionTrace& trace, ProcessId observer);

// Honest-mined blocks the observer has not delivered although it already
// delivered a block mined in the same round or later. Blocks younger than
// the delivered prefix may still be delivered and are not counted; a
// finite trace only witnesses abandonment of its prefix.
BlockSet abandoned_blocks(const ExecutionTrace& trace, ProcessId observer);
BlockSet abandoned_blocks(const ExecutionTrace& trace);
// Same cut-off, but blocks of corrupted miners included.
BlockSet stale_blocks(const ExecutionTrace& trace, ProcessId observer);

// Smallest honest process id.
ProcessId default_observer(const ExecutionTrace& trace);

// Rounds with at least two honest bab-mine events.
bool detect_forked_round(const ExecutionTrace& trace, Round r);
std::size_t forked_round_count(const ExecutionTrace& trace);

struct PairedComparison {
    ProcessId observer = 0;
    std::size_t base_delivered = 0;
    std::size_t closure_delivered = 0;
    std::size_t base_abandoned = 0;
    std::size_t closure_abandoned = 0;
    std::size_t base_stale = 0;
    double throughput_delta = 0.0;
    // closure latency minus base latency, transactions delivered in both.
    std::map<TxId, std::int64_t> latency_deltas;
    std::vector<std::string> violations;
};

// Throws UnpairedTraces unless both traces come from the same seed,
// parameters and adversary, one as a base run and one as a closure run.
PairedComparison compare_paired(const ExecutionTrace& base, const ExecutionTrace& closure);

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    // Half width of the normal-approximation 95% interval.
    double ci95 = 0.0;
};

Summary summarize(const std::vector<double>& values);

struct ObserverRange {
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
};

// Throughput over all honest observers.
ObserverRange throughput_range(const ExecutionTrace& trace);

} // namespace tcsim
