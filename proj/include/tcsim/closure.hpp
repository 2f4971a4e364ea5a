#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tcsim/dag_store.hpp"

namespace tcsim {

enum class ClosureMode { Off, LeavesOfAbandoned, Greedy };

std::string_view to_string(ClosureMode mode);
ClosureMode closure_mode_from_string(std::string_view text);

// incompatible(mined, other): `other` cannot be base-delivered together with
// `mined`. Supplied by the base protocol; `mined` need not be in the store.
using IncompatibleFn = std::function<bool(const DagStore&, const Block& mined, BlockId other)>;

// Chain instantiation: every block that is not a strong ancestor.
bool chain_incompatible(const DagStore& store, const Block& mined, BlockId other);

// Topological order keyed by (depth, id).
std::vector<BlockId> tau(const BlockSet& blocks, const DagStore& store);

// Per-process state of the throughput closure. The process owns the block
// store; this object tracks the closure-valid set D', the closure delivery
// sequence and the last delivered marker.
class ClosureState {
public:
    ClosureState(ProcessId self, ClosureMode mode, std::size_t capacity,
                 IncompatibleFn incompatible = chain_incompatible);

    ProcessId self() const noexcept { return self_; }
    ClosureMode mode() const noexcept { return mode_; }

    // {b' in D' : b' not in ancestors'(b), incompatible(b, b'), VB'(b')}.
    // `b` is the block being mined; its references must be in the store.
    BlockSet abandoned(const Block& b, const DagStore& store) const;

    // Weak references chosen by the configured mode, in tau order.
    std::vector<BlockId> weak_refs_for(const Block& b, const DagStore& store) const;

    // Greedy variant: leaves of every D' block outside b's strong+weak ancestry.
    Block greedy_weak_refs(Block b, const DagStore& store) const;

    // Own mining: returns b with weak references and records it in D'.
    // Returns nothing for blocks mined by other processes.
    std::optional<Block> on_base_mined(const Block& b, ProcessId miner, const DagStore& store);

    // Foreign closure block; recorded in D' iff VB' holds. Returns acceptance.
    bool on_foreign_mined(const Block& b);

    bool vb_prime(const Block& b) const;

    // Base delivery of `id`: returns the closure-delivered blocks, tau
    // ordered, `id` last when it is closure-valid. Throws MissingTwin.
    std::vector<BlockId> on_base_deliver(BlockId id, const DagStore& store);

    bool in_dprime(BlockId id) const { return dprime_.contains(id); }
    const BlockSet& dprime() const noexcept { return dprime_; }
    const std::vector<BlockId>& delivered() const noexcept { return delivered_; }
    bool is_delivered(BlockId id) const { return delivered_set_.contains(id); }
    BlockId last_delivered() const noexcept { return last_; }
    bool tx_delivered(TxId id) const { return delivered_txs_.contains(id); }
    // Blocks dropped at delivery time because VB' failed there.
    const std::vector<BlockId>& skipped() const noexcept { return skipped_; }

private:
    BlockSet ancestry_of_new(const Block& b, const DagStore& store) const;
    BlockSet ready_set(BlockId id, const DagStore& store);

    ProcessId self_;
    ClosureMode mode_;
    std::size_t capacity_;
    IncompatibleFn incompatible_;

    BlockSet dprime_;
    BlockId last_;
    // ancestors'(last) together with last itself.
    std::unordered_set<BlockId> processed_;
    std::vector<BlockId> delivered_;
    std::unordered_set<BlockId> delivered_set_;
    std::unordered_set<TxId> delivered_txs_;
    std::vector<BlockId> skipped_;
};

} // namespace tcsim
