#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tcsim/block.hpp"
#include "tcsim/closure.hpp"
#include "tcsim/protocol.hpp"

namespace tcsim {

enum class EventKind { Tx, Mine, Broadcast, Receive, Inject, Deliver };
enum class Layer { Base, Closure };

std::string_view to_string(EventKind kind);
std::string_view to_string(Layer layer);

struct TraceEvent {
    EventKind kind = EventKind::Tx;
    Round round = 0;
    ProcessId actor = kAdversary;
    BlockId block{};
    TxId tx{};
    ProcessId target = kAdversary; // Inject only
    Layer layer = Layer::Base;     // Deliver only
    bool honest = true;            // Mine only

    bool operator==(const TraceEvent&) const = default;
};

// How a trace came to be; strip_to_equivalent needs to know.
enum class TraceOrigin { Base, Closure, Stripped };

std::string_view to_string(TraceOrigin origin);

struct TraceHeader {
    std::uint64_t seed = 0;
    std::uint32_t n = 0;
    std::uint32_t f = 0;
    std::uint32_t rounds = 0;
    double q = 0.0;
    std::uint32_t m = 0;
    std::uint32_t k = 0;
    ForkChoice protocol = ForkChoice::LongestChain;
    ClosureMode closure = ClosureMode::Off;
    std::string adversary = "honest";
    std::vector<ProcessId> corrupted;
    bool coinbase = true;
    double tx_rate = 0.0;
    TraceOrigin origin = TraceOrigin::Base;
    // Optional human-readable block names (fixtures).
    std::map<BlockId, std::string> labels;

    bool operator==(const TraceHeader&) const = default;
};

// One entry per round per action: transaction broadcasts, mining,
// broadcasts, receipts, adversarial injections and deliveries.
class ExecutionTrace {
public:
    TraceHeader header;
    std::vector<TraceEvent> events;

    void record_tx(Round round, const Transaction& tx);
    void record_mine(Round round, BlockPtr block, bool honest);
    void record(const TraceEvent& ev) { events.push_back(ev); }

    const std::unordered_map<BlockId, BlockPtr>& blocks() const noexcept { return blocks_; }
    const std::unordered_map<TxId, Transaction>& txs() const noexcept { return txs_; }
    const Block& block(BlockId id) const;
    bool has_block(BlockId id) const { return blocks_.contains(id); }

    // Layer whose deliveries define the protocol output of this trace.
    Layer effective_layer() const {
        return header.closure == ClosureMode::Off ? Layer::Base : Layer::Closure;
    }
    bool is_honest(ProcessId p) const;
    std::vector<ProcessId> honest_processes() const;

    std::vector<BlockId> delivered(ProcessId observer, Layer layer) const;
    std::vector<BlockId> delivered(ProcessId observer) const { return delivered(observer, effective_layer()); }

    std::string label(BlockId id) const;

    std::string to_jsonl() const;
    static ExecutionTrace from_jsonl(std::string_view text);
    void write(const std::filesystem::path& path) const;
    static ExecutionTrace read(const std::filesystem::path& path);

    // Replace a block's content (used when stripping weak references).
    void replace_block(BlockPtr block) { blocks_[block->id] = std::move(block); }

private:
    std::unordered_map<BlockId, BlockPtr> blocks_;
    std::unordered_map<TxId, Transaction> txs_;
};

// 64-bit digest of the serialized trace.
std::uint64_t trace_digest(const ExecutionTrace& trace);

} // namespace tcsim
