#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tcsim/dag_store.hpp"
#include "tcsim/rng.hpp"
#include "tcsim/tx_pool.hpp"

namespace tcsim {

enum class ForkChoice { LongestChain, Ghost };

std::string_view to_string(ForkChoice rule);
ForkChoice fork_choice_from_string(std::string_view text);

struct DeliveryRule {
    ForkChoice kind = ForkChoice::LongestChain;
    std::uint32_t confirmation_depth = 6;
};

// Deepest strong-edge leaf, ties to the smaller id.
BlockId tip_selection_longest(const DagStore& view);
// Greedy heaviest-subtree walk from genesis, ties to the smaller id.
BlockId tip_selection_ghost(const DagStore& view);
BlockId select_tip(const DagStore& view, ForkChoice rule);

// Per-round Bernoulli stand-in for the proof-of-work puzzle: at most one
// success per (round, process), independent across pairs.
class MiningLottery {
public:
    MiningLottery(KeyedRng rng, double probability) : rng_(rng), probability_(probability) {}

    bool success(Round round, ProcessId p) const {
        return rng_.uniform(Stream::Mining, round, p) < probability_;
    }
    double probability() const noexcept { return probability_; }

private:
    KeyedRng rng_;
    double probability_;
};

// Closed-form probability that at least two of n honest miners succeed in
// the same round.
double forked_round_probability(double q, std::uint32_t n);

// VT: transaction ids are opaque; the only structural requirement is a
// non-null id.
bool vt(const Transaction& tx);

// VB for chain protocols: one strong parent (none for genesis), at most
// `capacity` transactions, no repeated transaction, weak references
// distinct and disjoint from the parents.
bool vb(const Block& b, std::size_t capacity);

struct BlockTemplate {
    std::size_t capacity = 10;
    bool coinbase = true;
};

// Block on `parent` filled with a coinbase (if enabled) and the oldest
// available transactions not yet in the parent's chain.
Block build_block(BlockId parent, ProcessId miner, Round round, const DagStore& view, TxPool& pool,
                  const BlockTemplate& tmpl);

// Runs the lottery for p and, on success, builds a block on the selected tip.
std::optional<Block> mine_attempt(const MiningLottery& lottery, ProcessId p, Round round, const DagStore& view,
                                  ForkChoice rule, TxPool& pool, const BlockTemplate& tmpl);

// A process's Π-delivered chain.
class ChainDelivery {
public:
    ChainDelivery() : last_(genesis_block().id) {}

    // Delivers every block on the selected chain at least k strong edges
    // below the tip that extends the delivered prefix. If the selected
    // chain no longer contains the last delivered block nothing is
    // delivered, so the sequence always stays a single chain.
    std::vector<BlockId> deliver_step(const DagStore& view, const DeliveryRule& rule);

    const std::vector<BlockId>& delivered() const noexcept { return delivered_; }
    BlockId last_delivered() const noexcept { return last_; }
    bool is_delivered(BlockId id) const { return delivered_set_.contains(id); }
    // Rounds in which the selected chain conflicted with the delivered prefix.
    std::uint64_t stalls() const noexcept { return stalls_; }

private:
    std::vector<BlockId> delivered_;
    std::unordered_set<BlockId> delivered_set_;
    BlockId last_;
    std::uint64_t stalls_ = 0;
};

} // namespace tcsim
