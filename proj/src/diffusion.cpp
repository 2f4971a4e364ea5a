#include "tcsim/diffusion.hpp"

#include <algorithm>

#include "tcsim/errors.hpp"

namespace tcsim {

Message Message::announce(BlockPtr block, ProcessId origin) {
    Message m;
    m.kind = MessageKind::BlockAnnounce;
    m.block = std::move(block);
    m.origin = origin;
    return m;
}

Message Message::announce(const Transaction& tx, ProcessId origin) {
    Message m;
    m.kind = MessageKind::TxAnnounce;
    m.tx = tx;
    m.origin = origin;
    return m;
}

std::uint64_t Message::key() const { return kind == MessageKind::BlockAnnounce ? block->id.value : tx.id.value; }

RoundMailbox::RoundMailbox(std::uint32_t n, std::set<ProcessId> corrupted)
    : n_(n), corrupted_(std::move(corrupted)), receive_(n), begun_(n, false), completed_(n, false) {}

std::vector<Message> RoundMailbox::begin_round(ProcessId p) {
    if (begun_.at(p)) throw Error(ErrorCode::AlreadyRead, "process " + std::to_string(p));
    begun_[p] = true;
    return std::exchange(receive_[p], {});
}

void RoundMailbox::broadcast(ProcessId p, std::vector<Message> msgs) {
    if (!begun_.at(p)) throw Error(ErrorCode::NotBegun, "process " + std::to_string(p));
    if (completed_[p]) throw Error(ErrorCode::AlreadyCompleted, "process " + std::to_string(p));
    completed_[p] = true;
    for (auto& m : msgs) {
        m.origin = p;
        broadcasts_.emplace_back(p, std::move(m));
    }
}

void RoundMailbox::adversary_inject(ProcessId target, Message msg) {
    msg.origin = kAdversary;
    injections_.push_back(Injection{target, std::move(msg), round_});
}

void RoundMailbox::end_round() {
    for (ProcessId p = 0; p < n_; ++p) {
        if (is_honest(p) && !completed_[p]) {
            throw Error(ErrorCode::IncompleteRound, "process " + std::to_string(p) + " has not completed");
        }
    }
    if (!adversary_done_) throw Error(ErrorCode::IncompleteRound, "adversary has not concluded");

    std::vector<std::vector<Message>> next(n_);
    for (const auto& inj : injections_) {
        if (inj.target < n_) next[inj.target].push_back(inj.msg);
    }

    auto sorted_broadcasts = broadcasts_;
    std::stable_sort(sorted_broadcasts.begin(), sorted_broadcasts.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second.key() < b.second.key();
    });
    auto echoes = echo_next_;
    std::stable_sort(echoes.begin(), echoes.end(), [](const Message& a, const Message& b) { return a.key() < b.key(); });
    echoes.erase(std::unique(echoes.begin(), echoes.end(),
                             [](const Message& a, const Message& b) { return a.key() == b.key(); }),
                 echoes.end());

    for (ProcessId p = 0; p < n_; ++p) {
        for (const auto& [origin, m] : sorted_broadcasts) next[p].push_back(m);
        if (is_honest(p))
            for (const auto& m : echoes) next[p].push_back(m);
    }

    echo_next_.clear();
    for (const auto& inj : injections_) echo_next_.push_back(inj.msg);

    receive_ = std::move(next);
    broadcasts_.clear();
    injections_.clear();
    std::fill(begun_.begin(), begun_.end(), false);
    std::fill(completed_.begin(), completed_.end(), false);
    adversary_done_ = false;
    ++round_;
}

} // namespace tcsim
