#include "tcsim/adversary.hpp"

#include <algorithm>

#include "tcsim/errors.hpp"

namespace tcsim {

BlockPtr AdversaryContext::mine(Block block) {
    auto ptr = std::make_shared<const Block>(std::move(block));
    trace_.record_mine(round_, ptr, false);
    return ptr;
}

void AdversaryContext::inject(ProcessId target, BlockPtr block) {
    TraceEvent ev;
    ev.kind = EventKind::Inject;
    ev.round = round_;
    ev.actor = kAdversary;
    ev.target = target;
    ev.block = block->id;
    trace_.record(ev);
    mailbox_.adversary_inject(target, Message::announce(std::move(block), kAdversary));
}

std::vector<ProcessId> AdversaryContext::honest_processes() const {
    std::vector<ProcessId> out;
    for (ProcessId p = 0; p < mailbox_.process_count(); ++p)
        if (mailbox_.is_honest(p)) out.push_back(p);
    return out;
}

void ViewingAdversary::absorb(AdversaryContext& ctx) {
    for (const auto& [origin, msg] : ctx.mailbox().round_broadcasts()) {
        if (msg.kind == MessageKind::BlockAnnounce) orphans_.accept(view_, msg.block);
    }
}

void ViewingAdversary::add_own(const BlockPtr& block) { orphans_.accept(view_, block); }

namespace {

std::set<ProcessId> last_f(std::uint32_t n, std::uint32_t f) {
    std::set<ProcessId> out;
    for (std::uint32_t i = 0; i < f && i < n; ++i) out.insert(n - 1 - i);
    return out;
}

class HonestAdversary final : public AdversaryProgram {
public:
    std::string name() const override { return "honest"; }
    std::set<ProcessId> corrupt(std::uint32_t) override { return {}; }
    void on_round(AdversaryContext&) override {}
};

class ForkAmplifier final : public ViewingAdversary {
public:
    explicit ForkAmplifier(std::uint32_t f) : f_(f) {}

    std::string name() const override { return "fork_amplifier"; }
    std::set<ProcessId> corrupt(std::uint32_t n) override { return corrupted_ = last_f(n, f_); }

    void on_round(AdversaryContext& ctx) override {
        absorb(ctx);
        std::uint64_t draw = 0;
        for (ProcessId c : corrupted_) {
            if (!ctx.lottery().success(ctx.round(), c)) continue;
            const BlockId parent = second_best_tip(ctx.fork_choice());
            auto block = ctx.mine(build_block(parent, c, ctx.round(), view_, ctx.tx_pool(), ctx.block_template()));
            add_own(block);

            auto honest = ctx.honest_processes();
            std::vector<ProcessId> targets;
            for (ProcessId p : honest)
                if (ctx.uniform(draw++) < 0.5) targets.push_back(p);
            if (targets.empty() && !honest.empty())
                targets.push_back(honest[static_cast<std::size_t>(ctx.uniform(draw++) * honest.size())]);
            for (ProcessId p : targets) ctx.inject(p, block);
        }
    }

private:
    BlockId second_best_tip(ForkChoice rule) const {
        const BlockId best = select_tip(view_, rule);
        std::optional<BlockId> runner_up;
        for (const auto& id : view_.insertion_order()) {
            if (id == best || !view_.strong_children(id).empty()) continue;
            if (!runner_up || view_.height(id) > view_.height(*runner_up) ||
                (view_.height(id) == view_.height(*runner_up) && id < *runner_up))
                runner_up = id;
        }
        if (runner_up) return *runner_up;
        const Block& b = view_.block(best);
        return b.is_genesis() ? best : b.parents.front();
    }

    std::uint32_t f_;
    std::set<ProcessId> corrupted_;
};

class Withholding final : public ViewingAdversary {
public:
    Withholding(std::uint32_t f, std::uint32_t delay) : f_(f), delay_(delay) {}

    std::string name() const override { return "withholding"; }
    std::set<ProcessId> corrupt(std::uint32_t n) override { return corrupted_ = last_f(n, f_); }

    void on_round(AdversaryContext& ctx) override {
        absorb(ctx);
        for (ProcessId c : corrupted_) {
            if (!ctx.lottery().success(ctx.round(), c)) continue;
            const BlockId parent = select_tip(view_, ctx.fork_choice());
            auto block = ctx.mine(build_block(parent, c, ctx.round(), view_, ctx.tx_pool(), ctx.block_template()));
            add_own(block);
            held_.emplace(ctx.round() + delay_, block);
        }
        auto due = held_.equal_range(ctx.round());
        for (auto it = due.first; it != due.second; ++it)
            for (ProcessId p : ctx.honest_processes()) ctx.inject(p, it->second);
        held_.erase(due.first, due.second);
    }

private:
    std::uint32_t f_;
    std::uint32_t delay_;
    std::set<ProcessId> corrupted_;
    std::multimap<Round, BlockPtr> held_;
};

} // namespace

std::unique_ptr<AdversaryProgram> honest_adversary() { return std::make_unique<HonestAdversary>(); }

std::unique_ptr<AdversaryProgram> fork_amplifier(std::uint32_t f) {
    if (f == 0) return honest_adversary();
    return std::make_unique<ForkAmplifier>(f);
}

std::unique_ptr<AdversaryProgram> withholding(std::uint32_t f, std::uint32_t delay) {
    if (f == 0) return honest_adversary();
    return std::make_unique<Withholding>(f, delay);
}

std::unique_ptr<AdversaryProgram> make_adversary(const AdversarySpec& spec) {
    if (spec.name == "honest") return honest_adversary();
    if (spec.name == "fork_amplifier") return fork_amplifier(spec.f);
    if (spec.name == "withholding") return withholding(spec.f, spec.delay);
    throw Error(ErrorCode::InvalidConfig, "unknown adversary '" + spec.name + "'");
}

ExecutionTrace strip_to_equivalent(const ExecutionTrace& closure_trace) {
    if (closure_trace.header.origin == TraceOrigin::Base)
        throw Error(ErrorCode::NotAClosureTrace, "trace was produced by a base run");

    ExecutionTrace out;
    out.header = closure_trace.header;
    out.header.closure = ClosureMode::Off;
    out.header.origin = TraceOrigin::Stripped;

    for (const auto& ev : closure_trace.events) {
        switch (ev.kind) {
        case EventKind::Tx:
            out.record_tx(ev.round, closure_trace.txs().at(ev.tx));
            break;
        case EventKind::Mine:
            out.record_mine(ev.round, std::make_shared<const Block>(strip_weak_refs(closure_trace.block(ev.block))),
                            ev.honest);
            break;
        case EventKind::Deliver:
            if (ev.layer == Layer::Base) out.record(ev);
            break;
        default:
            out.record(ev);
        }
    }
    return out;
}

} // namespace tcsim
