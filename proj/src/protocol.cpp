#include "tcsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tcsim/errors.hpp"

namespace tcsim {

std::string_view to_string(ForkChoice rule) {
    return rule == ForkChoice::Ghost ? "ghost" : "nakamoto";
}

ForkChoice fork_choice_from_string(std::string_view text) {
    if (text == "nakamoto" || text == "longest") return ForkChoice::LongestChain;
    if (text == "ghost") return ForkChoice::Ghost;
    throw Error(ErrorCode::InvalidConfig, "unknown base protocol '" + std::string(text) + "'");
}

BlockId tip_selection_longest(const DagStore& view) { return view.deepest_tip(); }

BlockId tip_selection_ghost(const DagStore& view) { return view.heaviest_tip(); }

BlockId select_tip(const DagStore& view, ForkChoice rule) {
    return rule == ForkChoice::Ghost ? tip_selection_ghost(view) : tip_selection_longest(view);
}

double forked_round_probability(double q, std::uint32_t n) {
    const double none = std::pow(1.0 - q, n);
    const double one = n * q * std::pow(1.0 - q, n - 1);
    return 1.0 - none - one;
}

bool vt(const Transaction& tx) { return tx.id.value != 0; }

bool vb(const Block& b, std::size_t capacity) {
    if (b.is_genesis()) return b.weak_refs.empty() && b.txs.empty();
    if (b.parents.size() != 1) return false;
    if (b.txs.size() > capacity) return false;
    std::unordered_set<TxId> seen;
    for (const auto& tx : b.txs)
        if (!vt(tx) || !seen.insert(tx.id).second) return false;
    std::unordered_set<BlockId> refs;
    for (const auto& w : b.weak_refs)
        if (w == b.parents.front() || !refs.insert(w).second) return false;
    return true;
}

Block build_block(BlockId parent, ProcessId miner, Round round, const DagStore& view, TxPool& pool,
                  const BlockTemplate& tmpl) {
    std::vector<Transaction> txs;
    std::size_t room = tmpl.capacity;
    if (tmpl.coinbase && room > 0) {
        txs.push_back(make_coinbase(miner, round));
        --room;
    }
    auto picked = pool.select(view, parent, round, room);
    txs.insert(txs.end(), picked.begin(), picked.end());
    return make_block({parent}, std::move(txs), miner, round);
}

std::optional<Block> mine_attempt(const MiningLottery& lottery, ProcessId p, Round round, const DagStore& view,
                                  ForkChoice rule, TxPool& pool, const BlockTemplate& tmpl) {
    if (!lottery.success(round, p)) return std::nullopt;
    return build_block(select_tip(view, rule), p, round, view, pool, tmpl);
}

std::vector<BlockId> ChainDelivery::deliver_step(const DagStore& view, const DeliveryRule& rule) {
    const BlockId tip = select_tip(view, rule.kind);
    const auto tip_height = view.height(tip);
    const auto last_height = view.height(last_);
    if (tip_height < rule.confirmation_depth + last_height + 1) return {};

    BlockId target = tip;
    for (std::uint32_t i = 0; i < rule.confirmation_depth; ++i) target = view.block(target).parents.front();

    std::vector<BlockId> path;
    BlockId cur = target;
    while (view.height(cur) > last_height) {
        path.push_back(cur);
        cur = view.block(cur).parents.front();
    }
    if (cur != last_) {
        ++stalls_;
        return {};
    }
    std::reverse(path.begin(), path.end());
    for (const auto& id : path) {
        delivered_.push_back(id);
        delivered_set_.insert(id);
    }
    last_ = target;
    return path;
}

} // namespace tcsim
