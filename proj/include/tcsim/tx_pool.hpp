#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "tcsim/dag_store.hpp"

namespace tcsim {

// Global pool of bab-broadcast transactions. A transaction broadcast in
// round r becomes available to miners from round r+1 on.
class TxPool {
public:
    // Transactions must be added in non-decreasing broadcast_round order.
    void add(const Transaction& tx);

    const std::vector<Transaction>& all() const noexcept { return txs_; }
    std::size_t size() const noexcept { return txs_.size(); }

    // Oldest `limit` transactions available at `round` that are not already
    // included in the strong chain ending at `tip`.
    std::vector<Transaction> select(const DagStore& view, BlockId tip, Round round, std::size_t limit);

private:
    // Indices (oldest first) of txs broadcast before block.mined_round and
    // not included in the chain ending at the block.
    const std::vector<std::size_t>& pending(const DagStore& view, BlockId id);
    std::size_t first_at_or_after(Round round) const;

    std::vector<Transaction> txs_;
    std::unordered_map<TxId, std::size_t> index_;
    std::unordered_map<BlockId, std::vector<std::size_t>> pending_;
};

} // namespace tcsim
