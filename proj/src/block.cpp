#include "tcsim/block.hpp"

#include <charconv>
#include <cstdio>

#include "tcsim/errors.hpp"

namespace tcsim {
namespace {

std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex(std::string_view text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 16);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorCode::MalformedTrace, "bad hex id '" + std::string(text) + "'");
    }
    return v;
}

// FNV-1a over little-endian words, finished with mix64.
class Digest {
public:
    void word(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            state_ ^= (v >> (8 * i)) & 0xffU;
            state_ *= 0x100000001b3ULL;
        }
    }
    std::uint64_t finish() const { return mix64(state_); }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

} // namespace

std::string BlockId::hex() const { return to_hex(value); }
BlockId BlockId::from_hex(std::string_view text) { return BlockId{parse_hex(text)}; }
std::string TxId::hex() const { return to_hex(value); }
TxId TxId::from_hex(std::string_view text) { return TxId{parse_hex(text)}; }

Transaction make_coinbase(ProcessId miner, Round round) {
    Digest d;
    d.word(0x636f696e62617365ULL); // "coinbase"
    d.word(miner);
    d.word(round);
    Transaction tx;
    tx.id = TxId{d.finish()};
    tx.broadcast_round = round;
    tx.origin = miner;
    tx.coinbase = true;
    return tx;
}

BlockId compute_block_id(const Block& block) {
    Digest d;
    d.word(block.parents.size());
    for (const auto& p : block.parents) d.word(p.value);
    d.word(block.txs.size());
    for (const auto& tx : block.txs) d.word(tx.id.value);
    d.word(block.miner);
    d.word(block.mined_round);
    return BlockId{d.finish()};
}

Block make_block(std::vector<BlockId> parents, std::vector<Transaction> txs, ProcessId miner, Round round) {
    Block b;
    b.parents = std::move(parents);
    b.txs = std::move(txs);
    b.miner = miner;
    b.mined_round = round;
    b.id = compute_block_id(b);
    return b;
}

const Block& genesis_block() {
    static const Block genesis = make_block({}, {}, kAdversary, 0);
    return genesis;
}

BlockPtr genesis_ptr() {
    static const BlockPtr ptr = std::make_shared<const Block>(genesis_block());
    return ptr;
}

Block strip_weak_refs(Block block) {
    block.weak_refs.clear();
    return block;
}

} // namespace tcsim
