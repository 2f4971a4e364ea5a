#include "tcsim/tx_pool.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace tcsim {

void TxPool::add(const Transaction& tx) {
    if (!txs_.empty() && tx.broadcast_round < txs_.back().broadcast_round) {
        throw std::invalid_argument("TxPool::add: broadcast rounds must be non-decreasing");
    }
    index_.emplace(tx.id, txs_.size());
    txs_.push_back(tx);
}

std::size_t TxPool::first_at_or_after(Round round) const {
    auto it = std::lower_bound(txs_.begin(), txs_.end(), round,
                               [](const Transaction& tx, Round r) { return tx.broadcast_round < r; });
    return static_cast<std::size_t>(it - txs_.begin());
}

const std::vector<std::size_t>& TxPool::pending(const DagStore& view, BlockId id) {
    if (auto it = pending_.find(id); it != pending_.end()) return it->second;

    // Walk up to the nearest cached ancestor, then fill in top-down.
    std::vector<BlockId> path;
    BlockId cur = id;
    while (!pending_.contains(cur)) {
        const Block& b = view.block(cur);
        if (b.is_genesis()) {
            pending_.emplace(cur, std::vector<std::size_t>{});
            break;
        }
        path.push_back(cur);
        cur = b.parents.front();
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        const Block& b = view.block(*it);
        const Block& parent = view.block(b.parents.front());
        std::vector<std::size_t> next = pending_.at(parent.id);
        if (b.mined_round > parent.mined_round) {
            const auto lo = first_at_or_after(parent.mined_round);
            const auto hi = first_at_or_after(b.mined_round);
            for (auto i = lo; i < hi; ++i) next.push_back(i);
        }
        std::unordered_set<std::size_t> included;
        for (const auto& tx : b.txs)
            if (auto f = index_.find(tx.id); f != index_.end()) included.insert(f->second);
        if (!included.empty()) std::erase_if(next, [&](std::size_t i) { return included.contains(i); });
        pending_.emplace(*it, std::move(next));
    }
    return pending_.at(id);
}

std::vector<Transaction> TxPool::select(const DagStore& view, BlockId tip, Round round, std::size_t limit) {
    std::vector<Transaction> out;
    if (limit == 0) return out;
    const auto& base = pending(view, tip);
    for (auto i : base) {
        if (out.size() == limit) return out;
        if (txs_[i].broadcast_round < round) out.push_back(txs_[i]);
    }
    const Block& t = view.block(tip);
    const auto hi = first_at_or_after(round);
    for (auto i = first_at_or_after(t.mined_round); i < hi && out.size() < limit; ++i) out.push_back(txs_[i]);
    return out;
}

} // namespace tcsim
