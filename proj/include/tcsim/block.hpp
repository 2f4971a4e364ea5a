#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tcsim/ids.hpp"

namespace tcsim {

struct Transaction {
    TxId id;
    std::uint32_t payload_size = 1;
    Round broadcast_round = 0;
    ProcessId origin = kAdversary;
    // Coinbase transactions are created by the miner with the block, never bab-broadcast.
    bool coinbase = false;

    bool operator==(const Transaction&) const = default;
};

Transaction make_coinbase(ProcessId miner, Round round);

struct Block {
    BlockId id;
    std::vector<BlockId> parents;   // strong references
    std::vector<BlockId> weak_refs; // added by the throughput closure only
    std::vector<Transaction> txs;
    ProcessId miner = kAdversary;
    Round mined_round = 0;

    bool is_genesis() const noexcept { return parents.empty(); }
    bool operator==(const Block&) const = default;
};

using BlockPtr = std::shared_ptr<const Block>;

// Digest of the canonical length-prefixed encoding of
// (parents, tx ids, miner, mined_round). Weak references are deliberately
// not part of the identity: a closure block and its stripped base twin
// share one id, so fork-choice tie breaks and the closure ordering agree.
BlockId compute_block_id(const Block& block);

Block make_block(std::vector<BlockId> parents, std::vector<Transaction> txs, ProcessId miner, Round round);

const Block& genesis_block();
BlockPtr genesis_ptr();

// Same block with weak references removed.
Block strip_weak_refs(Block block);

} // namespace tcsim
