#include "tcsim/trace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tcsim/errors.hpp"

namespace tcsim {

using nlohmann::json;

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::Tx: return "tx";
    case EventKind::Mine: return "mine";
    case EventKind::Broadcast: return "broadcast";
    case EventKind::Receive: return "receive";
    case EventKind::Inject: return "inject";
    case EventKind::Deliver: return "deliver";
    }
    return "?";
}

std::string_view to_string(Layer layer) { return layer == Layer::Base ? "base" : "closure"; }

std::string_view to_string(TraceOrigin origin) {
    switch (origin) {
    case TraceOrigin::Base: return "base";
    case TraceOrigin::Closure: return "closure";
    case TraceOrigin::Stripped: return "stripped";
    }
    return "?";
}

namespace {

EventKind event_kind_from(std::string_view s) {
    for (auto k : {EventKind::Tx, EventKind::Mine, EventKind::Broadcast, EventKind::Receive, EventKind::Inject,
                   EventKind::Deliver})
        if (to_string(k) == s) return k;
    throw Error(ErrorCode::MalformedTrace, "unknown event type '" + std::string(s) + "'");
}

TraceOrigin origin_from(std::string_view s) {
    for (auto o : {TraceOrigin::Base, TraceOrigin::Closure, TraceOrigin::Stripped})
        if (to_string(o) == s) return o;
    throw Error(ErrorCode::MalformedTrace, "unknown trace origin '" + std::string(s) + "'");
}

json actor_json(ProcessId p) { return p == kAdversary ? json("adversary") : json(p); }

ProcessId actor_from(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "adversary") return kAdversary;
        throw Error(ErrorCode::MalformedTrace, "bad actor " + j.dump());
    }
    return j.get<ProcessId>();
}

json ids_json(const std::vector<BlockId>& ids) {
    json arr = json::array();
    for (const auto& id : ids) arr.push_back(id.hex());
    return arr;
}

std::vector<BlockId> ids_from(const json& j) {
    std::vector<BlockId> out;
    for (const auto& e : j) out.push_back(BlockId::from_hex(e.get<std::string>()));
    return out;
}

json tx_json(const Transaction& tx) {
    json j;
    j["id"] = tx.id.hex();
    j["size"] = tx.payload_size;
    j["round"] = tx.broadcast_round;
    j["origin"] = actor_json(tx.origin);
    if (tx.coinbase) j["coinbase"] = true;
    return j;
}

Transaction tx_from(const json& j) {
    Transaction tx;
    tx.id = TxId::from_hex(j.at("id").get<std::string>());
    tx.payload_size = j.value("size", 1U);
    tx.broadcast_round = j.at("round").get<Round>();
    tx.origin = actor_from(j.at("origin"));
    tx.coinbase = j.value("coinbase", false);
    return tx;
}

json block_json(const Block& b) {
    json j;
    j["id"] = b.id.hex();
    j["parents"] = ids_json(b.parents);
    j["weak"] = ids_json(b.weak_refs);
    json txs = json::array();
    for (const auto& tx : b.txs) txs.push_back(tx_json(tx));
    j["txs"] = std::move(txs);
    j["miner"] = actor_json(b.miner);
    j["round"] = b.mined_round;
    return j;
}

Block block_from(const json& j) {
    Block b;
    b.id = BlockId::from_hex(j.at("id").get<std::string>());
    b.parents = ids_from(j.at("parents"));
    b.weak_refs = ids_from(j.at("weak"));
    for (const auto& t : j.at("txs")) b.txs.push_back(tx_from(t));
    b.miner = actor_from(j.at("miner"));
    b.mined_round = j.at("round").get<Round>();
    if (compute_block_id(b) != b.id) throw Error(ErrorCode::MalformedTrace, "block id mismatch for " + b.id.hex());
    return b;
}

json header_json(const TraceHeader& h) {
    json j;
    j["type"] = "header";
    j["seed"] = h.seed;
    j["n"] = h.n;
    j["f"] = h.f;
    j["rounds"] = h.rounds;
    j["q"] = h.q;
    j["m"] = h.m;
    j["k"] = h.k;
    j["protocol"] = std::string(to_string(h.protocol));
    j["closure"] = std::string(to_string(h.closure));
    j["adversary"] = h.adversary;
    j["corrupted"] = h.corrupted;
    j["coinbase"] = h.coinbase;
    j["tx_rate"] = h.tx_rate;
    j["origin"] = std::string(to_string(h.origin));
    if (!h.labels.empty()) {
        json labels = json::object();
        for (const auto& [id, name] : h.labels) labels[id.hex()] = name;
        j["labels"] = std::move(labels);
    }
    return j;
}

TraceHeader header_from(const json& j) {
    TraceHeader h;
    h.seed = j.at("seed").get<std::uint64_t>();
    h.n = j.at("n").get<std::uint32_t>();
    h.f = j.at("f").get<std::uint32_t>();
    h.rounds = j.at("rounds").get<std::uint32_t>();
    h.q = j.at("q").get<double>();
    h.m = j.at("m").get<std::uint32_t>();
    h.k = j.at("k").get<std::uint32_t>();
    h.protocol = fork_choice_from_string(j.at("protocol").get<std::string>());
    h.closure = closure_mode_from_string(j.at("closure").get<std::string>());
    h.adversary = j.at("adversary").get<std::string>();
    h.corrupted = j.at("corrupted").get<std::vector<ProcessId>>();
    h.coinbase = j.at("coinbase").get<bool>();
    h.tx_rate = j.at("tx_rate").get<double>();
    h.origin = origin_from(j.at("origin").get<std::string>());
    if (j.contains("labels"))
        for (const auto& [k, v] : j.at("labels").items()) h.labels[BlockId::from_hex(k)] = v.get<std::string>();
    return h;
}

} // namespace

void ExecutionTrace::record_tx(Round round, const Transaction& tx) {
    txs_.emplace(tx.id, tx);
    TraceEvent ev;
    ev.kind = EventKind::Tx;
    ev.round = round;
    ev.actor = tx.origin;
    ev.tx = tx.id;
    events.push_back(ev);
}

void ExecutionTrace::record_mine(Round round, BlockPtr block, bool honest) {
    TraceEvent ev;
    ev.kind = EventKind::Mine;
    ev.round = round;
    ev.actor = block->miner;
    ev.block = block->id;
    ev.honest = honest;
    blocks_[block->id] = std::move(block);
    events.push_back(ev);
}

const Block& ExecutionTrace::block(BlockId id) const {
    if (id == genesis_block().id) return genesis_block();
    auto it = blocks_.find(id);
    if (it == blocks_.end()) throw Error(ErrorCode::UnknownBlock, id.hex());
    return *it->second;
}

bool ExecutionTrace::is_honest(ProcessId p) const {
    return p < header.n && std::find(header.corrupted.begin(), header.corrupted.end(), p) == header.corrupted.end();
}

std::vector<ProcessId> ExecutionTrace::honest_processes() const {
    std::vector<ProcessId> out;
    for (ProcessId p = 0; p < header.n; ++p)
        if (is_honest(p)) out.push_back(p);
    return out;
}

std::vector<BlockId> ExecutionTrace::delivered(ProcessId observer, Layer layer) const {
    std::vector<BlockId> out;
    for (const auto& ev : events)
        if (ev.kind == EventKind::Deliver && ev.actor == observer && ev.layer == layer) out.push_back(ev.block);
    return out;
}

std::string ExecutionTrace::label(BlockId id) const {
    if (id == genesis_block().id) return "genesis";
    if (auto it = header.labels.find(id); it != header.labels.end()) return it->second;
    return id.hex().substr(0, 8);
}

std::string ExecutionTrace::to_jsonl() const {
    std::string out = header_json(header).dump();
    out += '\n';
    for (const auto& ev : events) {
        json j;
        j["type"] = std::string(to_string(ev.kind));
        j["round"] = ev.round;
        switch (ev.kind) {
        case EventKind::Tx:
            j["tx"] = tx_json(txs_.at(ev.tx));
            break;
        case EventKind::Mine: {
            const Block& b = block(ev.block);
            j["actor"] = actor_json(ev.actor);
            j["honest"] = ev.honest;
            j["block"] = block_json(b);
            j["weak_count"] = b.weak_refs.size();
            break;
        }
        case EventKind::Broadcast:
        case EventKind::Receive:
            j["actor"] = actor_json(ev.actor);
            j["block"] = ev.block.hex();
            break;
        case EventKind::Inject:
            j["target"] = actor_json(ev.target);
            j["block"] = ev.block.hex();
            break;
        case EventKind::Deliver:
            j["actor"] = actor_json(ev.actor);
            j["block"] = ev.block.hex();
            j["layer"] = std::string(to_string(ev.layer));
            break;
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

ExecutionTrace ExecutionTrace::from_jsonl(std::string_view text) {
    ExecutionTrace trace;
    std::istringstream in{std::string(text)};
    std::string line;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            const auto type = j.at("type").get<std::string>();
            if (type == "header") {
                if (have_header) throw Error(ErrorCode::MalformedTrace, "duplicate header");
                trace.header = header_from(j);
                have_header = true;
                continue;
            }
            if (!have_header) throw Error(ErrorCode::MalformedTrace, "missing header");
            TraceEvent ev;
            ev.kind = event_kind_from(type);
            ev.round = j.at("round").get<Round>();
            switch (ev.kind) {
            case EventKind::Tx: {
                Transaction tx = tx_from(j.at("tx"));
                trace.record_tx(ev.round, tx);
                continue;
            }
            case EventKind::Mine: {
                auto b = std::make_shared<const Block>(block_from(j.at("block")));
                ev.actor = actor_from(j.at("actor"));
                ev.honest = j.at("honest").get<bool>();
                ev.block = b->id;
                trace.blocks_[b->id] = std::move(b);
                break;
            }
            case EventKind::Broadcast:
            case EventKind::Receive:
                ev.actor = actor_from(j.at("actor"));
                ev.block = BlockId::from_hex(j.at("block").get<std::string>());
                break;
            case EventKind::Inject:
                ev.target = actor_from(j.at("target"));
                ev.block = BlockId::from_hex(j.at("block").get<std::string>());
                break;
            case EventKind::Deliver: {
                ev.actor = actor_from(j.at("actor"));
                ev.block = BlockId::from_hex(j.at("block").get<std::string>());
                const auto layer = j.at("layer").get<std::string>();
                if (layer != "base" && layer != "closure")
                    throw Error(ErrorCode::MalformedTrace, "unknown layer '" + layer + "'");
                ev.layer = layer == "base" ? Layer::Base : Layer::Closure;
                break;
            }
            }
            trace.events.push_back(ev);
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedTrace, "line " + std::to_string(lineno) + ": " + e.what());
        } catch (const json::exception& e) {
            throw Error(ErrorCode::MalformedTrace, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_header) throw Error(ErrorCode::MalformedTrace, "missing header");
    return trace;
}

void ExecutionTrace::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    out << to_jsonl();
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

ExecutionTrace ExecutionTrace::read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_jsonl(buf.str());
}

std::uint64_t trace_digest(const ExecutionTrace& trace) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : trace.to_jsonl()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

} // namespace tcsim
