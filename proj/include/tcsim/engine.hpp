#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "tcsim/adversary.hpp"
#include "tcsim/closure.hpp"
#include "tcsim/dag_store.hpp"
#include "tcsim/diffusion.hpp"
#include "tcsim/protocol.hpp"
#include "tcsim/trace.hpp"

namespace tcsim {

struct SimulationConfig {
    std::uint32_t n = 10;
    std::uint32_t rounds = 2000;
    double q = 0.02;
    std::uint32_t m = 10;
    std::uint32_t k = 6;
    ForkChoice protocol = ForkChoice::LongestChain;
    ClosureMode closure = ClosureMode::Off;
    double tx_rate = 1.0;
    bool coinbase = true;
    std::uint64_t seed = 1;
    // Receive events dominate trace size; metrics never need them.
    bool record_receives = true;
};

// An honest process: its local view, the base delivery chain and, when the
// closure is on, the closure layer stacked on top.
struct ProcessState {
    ProcessId id = 0;
    DagStore view = DagStore::with_genesis();
    OrphanPool orphans;
    std::unordered_set<BlockId> seen;
    ChainDelivery chain;
    std::optional<ClosureState> closure;
};

// Transactions broadcast in `round` (Poisson arrivals on the tx stream).
std::vector<Transaction> transaction_arrivals(const KeyedRng& rng, Round round, double rate,
                                              std::uint64_t& next_serial, std::uint32_t n);

// Round engine: each round, transaction arrivals, then every honest process
// in ascending order (read RECEIVE, update view, deliver, mine, broadcast),
// then the adversary turn, then end_round.
class Simulation {
public:
    Simulation(SimulationConfig config, AdversaryProgram& adversary);

    void step();
    void run();

    Round round() const noexcept { return mailbox_.round(); }
    const ExecutionTrace& trace() const noexcept { return trace_; }
    ExecutionTrace take_trace() { return std::move(trace_); }
    const ProcessState& process(ProcessId p) const { return processes_.at(p); }
    const std::set<ProcessId>& corrupted() const noexcept { return mailbox_.corrupted(); }

private:
    void honest_turn(ProcessState& ps);
    void receive_block(ProcessState& ps, const BlockPtr& block, Round round);

    SimulationConfig config_;
    AdversaryProgram& adversary_;
    KeyedRng rng_;
    MiningLottery lottery_;
    BlockTemplate tmpl_;
    DeliveryRule rule_;
    RoundMailbox mailbox_;
    TxPool pool_;
    ExecutionTrace trace_;
    std::vector<ProcessState> processes_;
    std::uint64_t tx_serial_ = 0;
};

ExecutionTrace simulate(const SimulationConfig& config, AdversaryProgram& adversary);

void validate(const SimulationConfig& config);

} // namespace tcsim
