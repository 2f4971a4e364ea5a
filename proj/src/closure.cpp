#include "tcsim/closure.hpp"

#include <algorithm>
#include <string>

#include "tcsim/errors.hpp"
#include "tcsim/protocol.hpp"

namespace tcsim {

std::string_view to_string(ClosureMode mode) {
    switch (mode) {
    case ClosureMode::Off: return "off";
    case ClosureMode::LeavesOfAbandoned: return "closure";
    case ClosureMode::Greedy: return "greedy";
    }
    return "off";
}

ClosureMode closure_mode_from_string(std::string_view text) {
    if (text == "off") return ClosureMode::Off;
    if (text == "closure" || text == "leaves") return ClosureMode::LeavesOfAbandoned;
    if (text == "greedy") return ClosureMode::Greedy;
    throw Error(ErrorCode::InvalidConfig, "unknown closure mode '" + std::string(text) + "'");
}

bool chain_incompatible(const DagStore& store, const Block& mined, BlockId other) {
    for (const auto& p : mined.parents) {
        if (p == other || store.is_strong_ancestor(other, p)) return false;
    }
    return true;
}

std::vector<BlockId> tau(const BlockSet& blocks, const DagStore& store) {
    std::vector<std::pair<std::uint32_t, BlockId>> keyed;
    keyed.reserve(blocks.size());
    for (const auto& id : blocks) keyed.emplace_back(store.depth(id), id);
    std::sort(keyed.begin(), keyed.end());
    std::vector<BlockId> out;
    out.reserve(keyed.size());
    for (const auto& [d, id] : keyed) out.push_back(id);
    return out;
}

ClosureState::ClosureState(ProcessId self, ClosureMode mode, std::size_t capacity, IncompatibleFn incompatible)
    : self_(self), mode_(mode), capacity_(capacity), incompatible_(std::move(incompatible)),
      last_(genesis_block().id) {
    processed_.insert(last_);
}

BlockSet ClosureState::ancestry_of_new(const Block& b, const DagStore& store) const {
    BlockSet out;
    auto add = [&](BlockId ref) {
        if (!store.contains(ref)) throw Error(ErrorCode::UnresolvedAncestry, b.id.hex() + " -> " + ref.hex());
        out.insert(ref);
        auto anc = store.ancestors(ref, EdgeSet::StrongAndWeak);
        out.insert(anc.begin(), anc.end());
    };
    for (const auto& p : b.parents) add(p);
    for (const auto& w : b.weak_refs) add(w);
    return out;
}

BlockSet ClosureState::abandoned(const Block& b, const DagStore& store) const {
    const BlockSet anc = ancestry_of_new(b, store);
    BlockSet out;
    for (const auto& id : dprime_) {
        if (id == b.id || anc.contains(id)) continue;
        if (!incompatible_(store, b, id)) continue;
        if (!vb_prime(store.block(id))) continue;
        out.insert(id);
    }
    return out;
}

Block ClosureState::greedy_weak_refs(Block b, const DagStore& store) const {
    const BlockSet anc = ancestry_of_new(b, store);
    BlockSet candidates;
    for (const auto& id : dprime_)
        if (id != b.id && !anc.contains(id)) candidates.insert(id);
    b.weak_refs = tau(store.leaves(candidates), store);
    return b;
}

std::vector<BlockId> ClosureState::weak_refs_for(const Block& b, const DagStore& store) const {
    switch (mode_) {
    case ClosureMode::Off: return {};
    case ClosureMode::LeavesOfAbandoned: return tau(store.leaves(abandoned(b, store)), store);
    case ClosureMode::Greedy: return greedy_weak_refs(b, store).weak_refs;
    }
    return {};
}

std::optional<Block> ClosureState::on_base_mined(const Block& b, ProcessId miner, const DagStore& store) {
    if (miner != self_) return std::nullopt;
    Block out = b;
    out.weak_refs = weak_refs_for(b, store);
    dprime_.insert(out.id);
    return out;
}

bool ClosureState::vb_prime(const Block& b) const {
    if (!vb(strip_weak_refs(b), capacity_)) return false;
    return std::any_of(b.txs.begin(), b.txs.end(),
                       [&](const Transaction& tx) { return vt(tx) && !delivered_txs_.contains(tx.id); });
}

bool ClosureState::on_foreign_mined(const Block& b) {
    if (!vb_prime(b)) return false;
    dprime_.insert(b.id);
    return true;
}

BlockSet ClosureState::ready_set(BlockId id, const DagStore& store) {
    BlockSet ready;
    const bool extends_last = id == last_ || store.is_strong_ancestor(last_, id) ||
                              store.ancestors(id, EdgeSet::StrongAndWeak).contains(last_);
    if (extends_last) {
        // processed_ is closed under ancestry, so a walk that stops at it
        // yields exactly the set difference.
        std::vector<BlockId> stack{id};
        while (!stack.empty()) {
            BlockId cur = stack.back();
            stack.pop_back();
            if (processed_.contains(cur) || !ready.insert(cur).second) continue;
            const Block& b = store.block(cur);
            for (const auto& p : b.parents) stack.push_back(p);
            for (const auto& w : b.weak_refs) stack.push_back(w);
        }
        processed_.insert(ready.begin(), ready.end());
    } else {
        BlockSet now = store.ancestors(id, EdgeSet::StrongAndWeak);
        now.insert(id);
        for (const auto& x : now)
            if (!processed_.contains(x)) ready.insert(x);
        processed_ = std::unordered_set<BlockId>(now.begin(), now.end());
    }
    return ready;
}

std::vector<BlockId> ClosureState::on_base_deliver(BlockId id, const DagStore& store) {
    if (!store.contains(id)) throw Error(ErrorCode::MissingTwin, id.hex());

    BlockSet ready = ready_set(id, store);
    last_ = id;
    for (auto it = ready.begin(); it != ready.end();) {
        if (delivered_set_.contains(*it) || store.block(*it).is_genesis()) {
            it = ready.erase(it);
        } else {
            ++it;
        }
    }

    std::vector<BlockId> out;
    for (const auto& x : tau(ready, store)) {
        const Block& b = store.block(x);
        if (!vb_prime(b)) {
            skipped_.push_back(x);
            continue;
        }
        out.push_back(x);
        delivered_.push_back(x);
        delivered_set_.insert(x);
        for (const auto& tx : b.txs) delivered_txs_.insert(tx.id);
    }
    return out;
}

} // namespace tcsim
