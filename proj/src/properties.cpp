#include "tcsim/properties.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "tcsim/protocol.hpp"

namespace tcsim {

std::string_view to_string(Property p) {
    switch (p) {
    case Property::NoDuplication: return "no-duplication";
    case Property::Integrity: return "integrity";
    case Property::Agreement: return "agreement";
    case Property::TotalOrder: return "total-order";
    case Property::Validity: return "validity";
    case Property::ExternalValidity: return "external-validity";
    case Property::ChainShape: return "chain-shape";
    }
    return "?";
}

const std::vector<Property>& all_properties() {
    static const std::vector<Property> list{Property::NoDuplication, Property::Integrity,        Property::Agreement,
                                            Property::TotalOrder,    Property::Validity,         Property::ExternalValidity,
                                            Property::ChainShape};
    return list;
}

bool PropertyReport::passed(Property p) const {
    auto it = violations.find(p);
    return it == violations.end() || it->second.empty();
}

bool PropertyReport::all_passed() const {
    return std::all_of(all_properties().begin(), all_properties().end(), [&](Property p) { return passed(p); });
}

std::size_t PropertyReport::violation_count() const {
    std::size_t n = 0;
    for (const auto& [p, v] : violations) n += v.size();
    return n;
}

namespace {

struct Delivery {
    BlockId block;
    Round round;
};

std::string who(ProcessId p) { return "P" + std::to_string(p); }

class Checker {
public:
    Checker(const ExecutionTrace& trace, const PropertyOptions& options)
        : trace_(trace), options_(options), honest_(trace.honest_processes()), layer_(trace.effective_layer()) {
        for (const auto& ev : trace.events) {
            if (ev.kind == EventKind::Mine) mined_round_.try_emplace(ev.block, ev.round);
            if (ev.kind == EventKind::Deliver && trace.is_honest(ev.actor)) {
                if (ev.layer == layer_) output_[ev.actor].push_back({ev.block, ev.round});
                if (ev.layer == Layer::Base) base_output_[ev.actor].push_back({ev.block, ev.round});
            }
        }
        for (auto p : honest_) {
            output_[p];
            base_output_[p];
        }
    }

    PropertyReport run() {
        for (auto p : all_properties()) report_.violations[p];
        no_duplication();
        integrity();
        agreement();
        total_order();
        validity();
        external_validity();
        chain_shape();
        return std::move(report_);
    }

private:
    void fail(Property p, std::string what) { report_.violations[p].push_back(std::move(what)); }

    bool known(BlockId id) const { return trace_.has_block(id); }

    Round cutoff() const {
        return trace_.header.rounds > options_.tail ? trace_.header.rounds - options_.tail : 0;
    }

    void no_duplication() {
        for (const auto& [p, seq] : output_) {
            std::unordered_set<BlockId> seen;
            for (const auto& d : seq)
                if (!seen.insert(d.block).second)
                    fail(Property::NoDuplication, who(p) + " delivered " + d.block.hex() + " twice");
        }
    }

    void integrity() {
        for (const auto& [p, seq] : output_) {
            for (const auto& d : seq) {
                auto it = mined_round_.find(d.block);
                if (it == mined_round_.end())
                    fail(Property::Integrity, who(p) + " delivered unmined block " + d.block.hex());
                else if (it->second > d.round)
                    fail(Property::Integrity, who(p) + " delivered " + d.block.hex() + " before it was mined");
            }
        }
    }

    void agreement() {
        // Diffusion bounds: honest broadcasts reach every honest process at
        // r+1, adversarial injections by r+2.
        std::unordered_map<BlockId, std::unordered_map<ProcessId, Round>> first_seen;
        bool has_receives = false;
        for (const auto& ev : trace_.events) {
            if (ev.kind == EventKind::Receive) {
                has_receives = true;
                first_seen[ev.block].try_emplace(ev.actor, ev.round);
            } else if (ev.kind == EventKind::Mine) {
                first_seen[ev.block].try_emplace(ev.actor, ev.round);
            }
        }
        const Round rounds = trace_.header.rounds;
        if (has_receives) {
            for (const auto& ev : trace_.events) {
                Round bound = 0;
                if (ev.kind == EventKind::Broadcast && trace_.is_honest(ev.actor)) bound = ev.round + 1;
                else if (ev.kind == EventKind::Inject) bound = ev.round + 2;
                else continue;
                if (bound >= rounds) continue;
                const auto& seen = first_seen[ev.block];
                for (auto p : honest_) {
                    auto it = seen.find(p);
                    if (it == seen.end() || it->second > bound)
                        fail(Property::Agreement, who(p) + " missed " + ev.block.hex() + " past round " +
                                                      std::to_string(bound));
                }
            }
        }

        // Every block one honest process delivered ahead of the tail is
        // delivered by every honest process.
        std::unordered_map<ProcessId, std::unordered_set<BlockId>> sets;
        for (const auto& [p, seq] : output_)
            for (const auto& d : seq) sets[p].insert(d.block);
        std::unordered_set<BlockId> reported;
        for (const auto& [p, seq] : output_) {
            for (const auto& d : seq) {
                if (d.round >= cutoff() || reported.contains(d.block)) continue;
                for (auto other : honest_) {
                    if (!sets[other].contains(d.block)) {
                        fail(Property::Agreement, who(other) + " never delivered " + d.block.hex() + " delivered by " +
                                                      who(p));
                        reported.insert(d.block);
                        break;
                    }
                }
            }
        }
    }

    void total_order() {
        for (std::size_t i = 0; i < honest_.size(); ++i) {
            for (std::size_t j = i + 1; j < honest_.size(); ++j) {
                const auto& a = output_[honest_[i]];
                const auto& b = output_[honest_[j]];
                const std::size_t len = std::min(a.size(), b.size());
                for (std::size_t x = 0; x < len; ++x) {
                    if (a[x].block != b[x].block) {
                        fail(Property::TotalOrder, who(honest_[i]) + " and " + who(honest_[j]) +
                                                       " diverge at position " + std::to_string(x));
                        break;
                    }
                }
            }
        }
    }

    void validity() {
        for (auto p : honest_) {
            std::unordered_set<TxId> delivered;
            for (const auto& d : output_[p]) {
                if (!known(d.block)) continue;
                for (const auto& tx : trace_.block(d.block).txs) delivered.insert(tx.id);
            }
            for (const auto& ev : trace_.events) {
                if (ev.kind != EventKind::Tx || ev.round >= cutoff()) continue;
                if (!delivered.contains(ev.tx))
                    fail(Property::Validity, who(p) + " never delivered tx " + ev.tx.hex() + " broadcast in round " +
                                                 std::to_string(ev.round));
            }
        }
    }

    void external_validity() {
        const auto m = trace_.header.m;
        for (auto p : honest_) {
            std::unordered_set<TxId> delivered;
            for (const auto& d : output_[p]) {
                if (!known(d.block)) continue;
                const Block& b = trace_.block(d.block);
                bool ok = vb(strip_weak_refs(b), m) &&
                          std::all_of(b.txs.begin(), b.txs.end(), [](const Transaction& tx) { return vt(tx); });
                if (layer_ == Layer::Closure) {
                    ok = ok && std::any_of(b.txs.begin(), b.txs.end(),
                                           [&](const Transaction& tx) { return !delivered.contains(tx.id); });
                }
                if (!ok) fail(Property::ExternalValidity, who(p) + " delivered invalid block " + d.block.hex());
                for (const auto& tx : b.txs) delivered.insert(tx.id);
            }
        }
    }

    // Chain protocol shape: one parent per block, no weak references in
    // base runs, and each base-delivered sequence is a single chain.
    void chain_shape() {
        const bool base_run = trace_.header.closure == ClosureMode::Off;
        for (const auto& [id, b] : trace_.blocks()) {
            if (b->parents.size() != 1)
                fail(Property::ChainShape, "block " + id.hex() + " has " + std::to_string(b->parents.size()) +
                                               " parents");
            if (base_run && !b->weak_refs.empty())
                fail(Property::ChainShape, "base block " + id.hex() + " carries weak references");
        }
        for (const auto& [p, seq] : base_output_) {
            BlockId prev = genesis_block().id;
            for (const auto& d : seq) {
                if (!known(d.block)) break;
                const auto& parents = trace_.block(d.block).parents;
                if (parents.size() != 1 || parents.front() != prev) {
                    fail(Property::ChainShape, who(p) + " base delivery " + d.block.hex() + " does not extend " +
                                                   prev.hex());
                    break;
                }
                prev = d.block;
            }
        }
    }

    const ExecutionTrace& trace_;
    const PropertyOptions& options_;
    std::vector<ProcessId> honest_;
    Layer layer_;
    std::unordered_map<BlockId, Round> mined_round_;
    std::map<ProcessId, std::vector<Delivery>> output_;
    std::map<ProcessId, std::vector<Delivery>> base_output_;
    PropertyReport report_;
};

} // namespace

PropertyReport check_properties(const ExecutionTrace& trace, const PropertyOptions& options) {
    return Checker(trace, options).run();
}

} // namespace tcsim
