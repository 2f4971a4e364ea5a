#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tcsim/block.hpp"

namespace tcsim {

using BlockSet = std::set<BlockId>;

enum class EdgeSet { Strong, StrongAndWeak };

// Append-only block DAG. Blocks are shared immutable values, so copying a
// store is cheap relative to the blocks it holds.
class DagStore {
public:
    DagStore() = default;
    DagStore(const DagStore& other);
    DagStore& operator=(const DagStore& other);
    DagStore(DagStore&&) noexcept = default;
    DagStore& operator=(DagStore&&) noexcept = default;

    static DagStore with_genesis();

    // Throws DuplicateBlock or DanglingReference.
    void insert(BlockPtr block);
    void insert(const Block& block) { insert(std::make_shared<const Block>(block)); }

    bool contains(BlockId id) const { return entries_.contains(id); }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    const Block& block(BlockId id) const;
    BlockPtr block_ptr(BlockId id) const;

    // First reference of `b` not present in the store, if any.
    std::optional<BlockId> missing_reference(const Block& b) const;

    // Predecessors of `id` along the chosen edges, excluding `id` itself.
    BlockSet ancestors(BlockId id, EdgeSet edges) const;

    // Members of `subset` without a descendant inside `subset`.
    BlockSet leaves(const BlockSet& subset) const;

    // Longest strong+weak path from genesis.
    std::uint32_t depth(BlockId id) const;
    // Longest strong-edge path from genesis (chain height).
    std::uint32_t height(BlockId id) const;
    // Number of blocks in the strong-edge subtree rooted at `id`, itself included.
    std::uint64_t subtree_size(BlockId id) const;

    const std::vector<BlockId>& strong_children(BlockId id) const;
    // Blocks that reference `id` through a strong or weak edge.
    const std::vector<BlockId>& children(BlockId id) const;

    bool is_strong_ancestor(BlockId ancestor, BlockId descendant) const;

    // Strong-edge leaf of maximal height; ties go to the smaller id.
    BlockId deepest_tip() const;
    // Greedy heaviest-subtree descent from genesis; ties go to the smaller id.
    BlockId heaviest_tip() const;

    std::optional<BlockId> genesis() const { return genesis_; }

    // Insertion order; always a topological order of the DAG.
    const std::vector<BlockId>& insertion_order() const noexcept { return order_; }

private:
    struct Entry {
        BlockPtr block;
        std::uint32_t depth = 0;
        std::uint32_t height = 0;
        mutable std::uint64_t subtree = 1;
        std::vector<BlockId> strong_children;
        std::vector<BlockId> children;
        // Map nodes never move, so parents can be reached without lookups.
        std::vector<Entry*> parent_entries;
        std::vector<Entry*> child_entries; // strong children
    };

    const Entry& entry(BlockId id) const;
    void relink();
    void refresh_subtrees() const;

    std::unordered_map<BlockId, Entry> entries_;
    std::vector<BlockId> order_;
    std::optional<BlockId> genesis_;
    BlockId best_tip_{};
    // Subtree sizes are only needed by GHOST and recomputed on demand.
    mutable std::vector<BlockId> pending_subtree_;
    mutable std::optional<BlockId> heaviest_tip_;
    bool multi_parent_ = false;
};

// Buffers blocks whose references have not arrived yet and inserts them
// once they resolve.
class OrphanPool {
public:
    // Inserts `block` (and any orphans it unblocks) into `store`. Returns the
    // blocks actually inserted, in insertion order. Known blocks are ignored.
    std::vector<BlockPtr> accept(DagStore& store, BlockPtr block);

    std::size_t size() const noexcept { return buffered_.size(); }
    bool contains(BlockId id) const { return buffered_.contains(id); }

private:
    std::unordered_map<BlockId, std::vector<BlockPtr>> waiting_;
    std::unordered_set<BlockId> buffered_;
};

struct DotStyle {
    BlockSet delivered;
    std::function<std::string(BlockId)> label;
};

// Strong edges solid, weak edges dashed blue, delivered blocks filled.
std::string to_dot(const DagStore& store, const DotStyle& style);

} // namespace tcsim
