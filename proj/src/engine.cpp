#include "tcsim/engine.hpp"

#include <cmath>
#include <string>

#include "tcsim/errors.hpp"

namespace tcsim {

void validate(const SimulationConfig& c) {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
    if (c.n == 0) fail("n must be positive");
    if (c.rounds < 1) fail("rounds must be >= 1");
    if (!(c.q >= 0.0 && c.q < 1.0)) fail("q must lie in [0, 1)");
    if (c.m < 1) fail("m must be >= 1");
    if (c.k < 1) fail("k must be >= 1");
    if (!(c.tx_rate >= 0.0)) fail("tx_rate must be non-negative");
}

std::vector<Transaction> transaction_arrivals(const KeyedRng& rng, Round round, double rate,
                                              std::uint64_t& next_serial, std::uint32_t n) {
    std::vector<Transaction> out;
    if (rate <= 0.0) return out;
    // Knuth's product method on the keyed stream.
    const double limit = std::exp(-rate);
    double product = rng.uniform(Stream::Transactions, round, 0);
    std::uint64_t draw = 1;
    while (product > limit) {
        Transaction tx;
        ++next_serial;
        tx.id = TxId{mix64(rng.seed() * 0x9e3779b97f4a7c15ULL + next_serial) | 1ULL};
        tx.broadcast_round = round;
        tx.origin = static_cast<ProcessId>(rng.bits(Stream::Transactions, round, 1000 + draw) % n);
        out.push_back(tx);
        product *= rng.uniform(Stream::Transactions, round, draw++);
    }
    return out;
}

Simulation::Simulation(SimulationConfig config, AdversaryProgram& adversary)
    : config_(config), adversary_(adversary), rng_(config.seed), lottery_(rng_, config.q),
      tmpl_{config.m, config.coinbase}, rule_{config.protocol, config.k},
      mailbox_(config.n, [&] {
          validate(config);
          auto corrupted = adversary.corrupt(config.n);
          if (corrupted.size() >= config.n) throw Error(ErrorCode::InvalidConfig, "f must be < n");
          return corrupted;
      }()) {
    auto& h = trace_.header;
    h.seed = config.seed;
    h.n = config.n;
    h.f = static_cast<std::uint32_t>(mailbox_.corrupted().size());
    h.rounds = config.rounds;
    h.q = config.q;
    h.m = config.m;
    h.k = config.k;
    h.protocol = config.protocol;
    h.closure = config.closure;
    h.adversary = adversary.name();
    h.corrupted.assign(mailbox_.corrupted().begin(), mailbox_.corrupted().end());
    h.coinbase = config.coinbase;
    h.tx_rate = config.tx_rate;
    h.origin = config.closure == ClosureMode::Off ? TraceOrigin::Base : TraceOrigin::Closure;

    for (ProcessId p = 0; p < config.n; ++p) {
        if (!mailbox_.is_honest(p)) continue;
        ProcessState ps;
        ps.id = p;
        ps.seen.insert(genesis_block().id);
        if (config.closure != ClosureMode::Off) ps.closure.emplace(p, config.closure, config.m);
        processes_.push_back(std::move(ps));
    }
}

void Simulation::receive_block(ProcessState& ps, const BlockPtr& block, Round round) {
    if (!ps.seen.insert(block->id).second) return;
    if (config_.record_receives) {
        TraceEvent ev;
        ev.kind = EventKind::Receive;
        ev.round = round;
        ev.actor = ps.id;
        ev.block = block->id;
        trace_.record(ev);
    }
    if (!vb(strip_weak_refs(*block), config_.m)) return;
    for (const auto& inserted : ps.orphans.accept(ps.view, block)) {
        if (ps.closure && inserted->miner != ps.id) ps.closure->on_foreign_mined(*inserted);
    }
}

void Simulation::honest_turn(ProcessState& ps) {
    const Round r = mailbox_.round();
    for (const auto& msg : mailbox_.begin_round(ps.id)) {
        if (msg.kind == MessageKind::BlockAnnounce) receive_block(ps, msg.block, r);
    }

    for (const auto& id : ps.chain.deliver_step(ps.view, rule_)) {
        TraceEvent ev;
        ev.kind = EventKind::Deliver;
        ev.round = r;
        ev.actor = ps.id;
        ev.block = id;
        ev.layer = Layer::Base;
        trace_.record(ev);
        if (ps.closure) {
            for (const auto& cid : ps.closure->on_base_deliver(id, ps.view)) {
                ev.block = cid;
                ev.layer = Layer::Closure;
                trace_.record(ev);
            }
        }
    }

    std::vector<Message> out;
    if (auto mined = mine_attempt(lottery_, ps.id, r, ps.view, config_.protocol, pool_, tmpl_)) {
        Block b = std::move(*mined);
        if (ps.closure) b = *ps.closure->on_base_mined(b, ps.id, ps.view);
        auto ptr = std::make_shared<const Block>(std::move(b));
        ps.view.insert(ptr);
        ps.seen.insert(ptr->id);
        trace_.record_mine(r, ptr, true);
        TraceEvent ev;
        ev.kind = EventKind::Broadcast;
        ev.round = r;
        ev.actor = ps.id;
        ev.block = ptr->id;
        trace_.record(ev);
        out.push_back(Message::announce(ptr, ps.id));
    }
    mailbox_.broadcast(ps.id, std::move(out));
}

void Simulation::step() {
    const Round r = mailbox_.round();
    for (const auto& tx : transaction_arrivals(rng_, r, config_.tx_rate, tx_serial_, config_.n)) {
        Transaction t = tx;
        if (!mailbox_.is_honest(t.origin)) {
            // Transactions come from honest processes only.
            for (ProcessId p = 0; p < config_.n; ++p) {
                const ProcessId cand = (t.origin + p) % config_.n;
                if (mailbox_.is_honest(cand)) {
                    t.origin = cand;
                    break;
                }
            }
        }
        pool_.add(t);
        trace_.record_tx(r, t);
    }

    for (auto& ps : processes_) honest_turn(ps);

    AdversaryContext ctx(r, mailbox_, trace_, pool_, lottery_, rng_, config_.protocol, tmpl_);
    adversary_.on_round(ctx);
    mailbox_.adversary_conclude();
    mailbox_.end_round();
}

void Simulation::run() {
    while (mailbox_.round() < config_.rounds) step();
}

ExecutionTrace simulate(const SimulationConfig& config, AdversaryProgram& adversary) {
    Simulation sim(config, adversary);
    sim.run();
    return sim.take_trace();
}

} // namespace tcsim
