#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tcsim/dag_store.hpp"
#include "tcsim/diffusion.hpp"
#include "tcsim/protocol.hpp"
#include "tcsim/trace.hpp"
#include "tcsim/tx_pool.hpp"

namespace tcsim {

// What an adversary may touch during its turn. Every honest broadcast of
// the current round is already visible (rushing).
class AdversaryContext {
public:
    AdversaryContext(Round round, RoundMailbox& mailbox, ExecutionTrace& trace, TxPool& pool,
                     const MiningLottery& lottery, KeyedRng rng, ForkChoice fork_choice, BlockTemplate tmpl)
        : round_(round), mailbox_(mailbox), trace_(trace), pool_(pool), lottery_(lottery), rng_(rng),
          fork_choice_(fork_choice), tmpl_(tmpl) {}

    Round round() const noexcept { return round_; }
    const RoundMailbox& mailbox() const noexcept { return mailbox_; }
    const ExecutionTrace& trace() const noexcept { return trace_; }
    TxPool& tx_pool() noexcept { return pool_; }
    const MiningLottery& lottery() const noexcept { return lottery_; }
    ForkChoice fork_choice() const noexcept { return fork_choice_; }
    const BlockTemplate& block_template() const noexcept { return tmpl_; }

    // Adversary randomness, independent of the mining and tx streams.
    double uniform(std::uint64_t index) const { return rng_.uniform(Stream::Adversary, round_, index); }

    // Records bab_mine for a corrupted process.
    BlockPtr mine(Block block);
    // Selective delivery into RECEIVE_target at the next round.
    void inject(ProcessId target, BlockPtr block);

    std::vector<ProcessId> honest_processes() const;

private:
    Round round_;
    RoundMailbox& mailbox_;
    ExecutionTrace& trace_;
    TxPool& pool_;
    const MiningLottery& lottery_;
    KeyedRng rng_;
    ForkChoice fork_choice_;
    BlockTemplate tmpl_;
};

// A pluggable adversary. The corruption set is chosen once before round 0
// and never changes. Policies only read strong-edge structure, so the same
// program drives a base run and its closure twin identically.
class AdversaryProgram {
public:
    virtual ~AdversaryProgram() = default;

    virtual std::string name() const = 0;
    virtual std::set<ProcessId> corrupt(std::uint32_t n) = 0;
    virtual void on_round(AdversaryContext& ctx) = 0;
};

// Keeps a view of every block the adversary has seen or made.
class ViewingAdversary : public AdversaryProgram {
protected:
    void absorb(AdversaryContext& ctx);
    void add_own(const BlockPtr& block);

    DagStore view_ = DagStore::with_genesis();
    OrphanPool orphans_;
};

std::unique_ptr<AdversaryProgram> honest_adversary();

// Corrupted miners extend the second-best tip and release each block to a
// random half of the honest processes, splitting honest views.
std::unique_ptr<AdversaryProgram> fork_amplifier(std::uint32_t f);

// Corrupted miners extend the adversary's best tip (private blocks
// included) and release each block to everyone `delay` rounds later.
std::unique_ptr<AdversaryProgram> withholding(std::uint32_t f, std::uint32_t delay);

struct AdversarySpec {
    std::string name = "honest";
    std::uint32_t f = 0;
    std::uint32_t delay = 2;
};

std::unique_ptr<AdversaryProgram> make_adversary(const AdversarySpec& spec);

// Equivalent base execution of a closure execution: weak references
// removed from every block and closure-layer deliveries dropped; the base
// deliveries already in the trace remain. Throws NotAClosureTrace for
// traces produced by a base run.
ExecutionTrace strip_to_equivalent(const ExecutionTrace& closure_trace);

} // namespace tcsim
