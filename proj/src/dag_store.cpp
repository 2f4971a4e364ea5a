#include "tcsim/dag_store.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "tcsim/errors.hpp"

namespace tcsim {

DagStore DagStore::with_genesis() {
    DagStore store;
    store.insert(genesis_ptr());
    return store;
}

DagStore::DagStore(const DagStore& other)
    : entries_(other.entries_),
      order_(other.order_),
      genesis_(other.genesis_),
      best_tip_(other.best_tip_),
      pending_subtree_(other.pending_subtree_),
      heaviest_tip_(other.heaviest_tip_),
      multi_parent_(other.multi_parent_) {
    relink();
}

DagStore& DagStore::operator=(const DagStore& other) {
    if (this != &other) {
        DagStore copy(other);
        *this = std::move(copy);
    }
    return *this;
}

void DagStore::relink() {
    for (auto& [id, e] : entries_) {
        e.parent_entries.clear();
        e.child_entries.clear();
        for (const auto& p : e.block->parents) e.parent_entries.push_back(&entries_.at(p));
        for (const auto& c : e.strong_children) e.child_entries.push_back(&entries_.at(c));
    }
}

const DagStore::Entry& DagStore::entry(BlockId id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw Error(ErrorCode::UnknownBlock, id.hex());
    return it->second;
}

const Block& DagStore::block(BlockId id) const { return *entry(id).block; }
BlockPtr DagStore::block_ptr(BlockId id) const { return entry(id).block; }
std::uint32_t DagStore::depth(BlockId id) const { return entry(id).depth; }
std::uint32_t DagStore::height(BlockId id) const { return entry(id).height; }
std::uint64_t DagStore::subtree_size(BlockId id) const {
    const Entry& e = entry(id);
    refresh_subtrees();
    return e.subtree;
}

void DagStore::refresh_subtrees() const {
    if (pending_subtree_.empty()) return;
    if (!multi_parent_) {
        for (const auto& id : pending_subtree_) {
            for (const Entry* cur = &entries_.at(id); !cur->parent_entries.empty();) {
                cur = cur->parent_entries.front();
                ++cur->subtree;
            }
        }
    } else {
        // Shared descendants must be counted once.
        for (const auto& [id, e] : entries_) {
            std::unordered_set<BlockId> seen;
            std::vector<BlockId> stack(e.strong_children);
            while (!stack.empty()) {
                BlockId cur = stack.back();
                stack.pop_back();
                if (!seen.insert(cur).second) continue;
                const auto& kids = entries_.at(cur).strong_children;
                stack.insert(stack.end(), kids.begin(), kids.end());
            }
            e.subtree = 1 + seen.size();
        }
    }
    pending_subtree_.clear();
}

const std::vector<BlockId>& DagStore::strong_children(BlockId id) const { return entry(id).strong_children; }
const std::vector<BlockId>& DagStore::children(BlockId id) const { return entry(id).children; }

std::optional<BlockId> DagStore::missing_reference(const Block& b) const {
    for (const auto& p : b.parents)
        if (!contains(p)) return p;
    for (const auto& w : b.weak_refs)
        if (!contains(w)) return w;
    return std::nullopt;
}

void DagStore::insert(BlockPtr block) {
    const Block& b = *block;
    if (contains(b.id)) throw Error(ErrorCode::DuplicateBlock, b.id.hex());
    if (auto missing = missing_reference(b)) {
        throw Error(ErrorCode::DanglingReference, b.id.hex() + " -> " + missing->hex());
    }
    if (b.is_genesis() && genesis_) throw Error(ErrorCode::DuplicateBlock, "second genesis " + b.id.hex());
    if (!b.is_genesis() && !genesis_) throw Error(ErrorCode::DanglingReference, "store has no genesis");

    Entry e;
    e.block = block;
    for (const auto& p : b.parents) {
        const Entry& pe = entries_.at(p);
        e.depth = std::max(e.depth, pe.depth + 1);
        e.height = std::max(e.height, pe.height + 1);
    }
    for (const auto& w : b.weak_refs) e.depth = std::max(e.depth, entries_.at(w).depth + 1);

    for (const auto& p : b.parents) {
        Entry& pe = entries_.at(p);
        pe.strong_children.push_back(b.id);
        pe.children.push_back(b.id);
        e.parent_entries.push_back(&pe);
    }
    for (const auto& w : b.weak_refs) entries_.at(w).children.push_back(b.id);

    if (b.parents.size() > 1) multi_parent_ = true;
    pending_subtree_.push_back(b.id);
    heaviest_tip_.reset();

    const auto height = e.height;
    auto parents = e.parent_entries;
    Entry* placed = &entries_.emplace(b.id, std::move(e)).first->second;
    for (Entry* pe : parents) pe->child_entries.push_back(placed);
    order_.push_back(b.id);
    if (b.is_genesis()) {
        genesis_ = b.id;
        best_tip_ = b.id;
    } else {
        const auto best_height = entries_.at(best_tip_).height;
        if (height > best_height || (height == best_height && b.id < best_tip_)) best_tip_ = b.id;
    }
}

BlockSet DagStore::ancestors(BlockId id, EdgeSet edges) const {
    BlockSet out;
    std::vector<BlockId> stack;
    auto push_refs = [&](const Block& b) {
        for (const auto& p : b.parents) stack.push_back(p);
        if (edges == EdgeSet::StrongAndWeak)
            for (const auto& w : b.weak_refs) stack.push_back(w);
    };
    push_refs(block(id));
    while (!stack.empty()) {
        BlockId cur = stack.back();
        stack.pop_back();
        if (!out.insert(cur).second) continue;
        push_refs(block(cur));
    }
    return out;
}

BlockSet DagStore::leaves(const BlockSet& subset) const {
    if (subset.empty()) return {};
    std::uint32_t min_depth = std::numeric_limits<std::uint32_t>::max();
    for (const auto& id : subset) min_depth = std::min(min_depth, depth(id));

    // A member stops being a leaf once it is reached from another member.
    BlockSet covered;
    std::unordered_set<BlockId> visited;
    for (const auto& start : subset) {
        std::vector<BlockId> stack;
        auto push_refs = [&](BlockId id) {
            const Block& b = block(id);
            for (const auto& p : b.parents) stack.push_back(p);
            for (const auto& w : b.weak_refs) stack.push_back(w);
        };
        push_refs(start);
        while (!stack.empty()) {
            BlockId cur = stack.back();
            stack.pop_back();
            if (depth(cur) < min_depth) continue;
            if (subset.contains(cur)) covered.insert(cur);
            if (!visited.insert(cur).second) continue;
            push_refs(cur);
        }
    }
    BlockSet out;
    std::set_difference(subset.begin(), subset.end(), covered.begin(), covered.end(), std::inserter(out, out.end()));
    return out;
}

bool DagStore::is_strong_ancestor(BlockId ancestor, BlockId descendant) const {
    const auto target_height = height(ancestor);
    std::vector<BlockId> stack{block(descendant).parents};
    std::unordered_set<BlockId> seen;
    while (!stack.empty()) {
        BlockId cur = stack.back();
        stack.pop_back();
        if (cur == ancestor) return true;
        if (!seen.insert(cur).second) continue;
        if (height(cur) <= target_height) continue;
        for (const auto& p : block(cur).parents) stack.push_back(p);
    }
    return false;
}

BlockId DagStore::deepest_tip() const {
    if (!genesis_) throw Error(ErrorCode::UnknownBlock, "empty store has no tip");
    return best_tip_;
}

BlockId DagStore::heaviest_tip() const {
    if (!genesis_) throw Error(ErrorCode::UnknownBlock, "empty store has no tip");
    if (heaviest_tip_) return *heaviest_tip_;
    refresh_subtrees();
    const Entry* cur = &entries_.at(*genesis_);
    while (!cur->child_entries.empty()) {
        const Entry* best = nullptr;
        for (const Entry* ce : cur->child_entries) {
            if (!best || ce->subtree > best->subtree ||
                (ce->subtree == best->subtree && ce->block->id < best->block->id))
                best = ce;
        }
        cur = best;
    }
    heaviest_tip_ = cur->block->id;
    return *heaviest_tip_;
}

std::vector<BlockPtr> OrphanPool::accept(DagStore& store, BlockPtr block) {
    std::vector<BlockPtr> inserted;
    if (store.contains(block->id) || buffered_.contains(block->id)) return inserted;

    std::vector<BlockPtr> queue{std::move(block)};
    while (!queue.empty()) {
        BlockPtr cur = std::move(queue.back());
        queue.pop_back();
        if (store.contains(cur->id)) continue;
        if (auto missing = store.missing_reference(*cur)) {
            if (buffered_.insert(cur->id).second) waiting_[*missing].push_back(cur);
            continue;
        }
        buffered_.erase(cur->id);
        store.insert(cur);
        inserted.push_back(cur);
        if (auto it = waiting_.find(cur->id); it != waiting_.end()) {
            auto unblocked = std::move(it->second);
            waiting_.erase(it);
            // Reverse so that the earliest-buffered orphan is retried first.
            for (auto rit = unblocked.rbegin(); rit != unblocked.rend(); ++rit) {
                buffered_.erase((*rit)->id);
                queue.push_back(*rit);
            }
        }
    }
    return inserted;
}

std::string to_dot(const DagStore& store, const DotStyle& style) {
    auto name = [&](BlockId id) { return style.label ? style.label(id) : id.hex().substr(0, 8); };
    std::ostringstream out;
    out << "digraph dag {\n";
    out << "  rankdir=RL;\n";
    out << "  node [shape=box, fontname=\"Helvetica\"];\n";
    for (const auto& id : store.insertion_order()) {
        const Block& b = store.block(id);
        out << "  \"" << id.hex() << "\" [label=\"" << name(id) << "\"";
        if (b.is_genesis() || style.delivered.contains(id)) {
            out << ", style=filled, fillcolor=\"lightblue\"";
        } else {
            out << ", style=dashed, color=\"grey\"";
        }
        out << "];\n";
    }
    for (const auto& id : store.insertion_order()) {
        const Block& b = store.block(id);
        for (const auto& p : b.parents) out << "  \"" << id.hex() << "\" -> \"" << p.hex() << "\";\n";
        for (const auto& w : b.weak_refs)
            out << "  \"" << id.hex() << "\" -> \"" << w.hex() << "\" [style=dashed, color=\"blue\"];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace tcsim
