#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "tcsim/block.hpp"

namespace tcsim {

enum class MessageKind { BlockAnnounce, TxAnnounce };

struct Message {
    MessageKind kind = MessageKind::BlockAnnounce;
    BlockPtr block;  // BlockAnnounce
    Transaction tx;  // TxAnnounce
    ProcessId origin = kAdversary;

    static Message announce(BlockPtr block, ProcessId origin);
    static Message announce(const Transaction& tx, ProcessId origin);

    // Block id or tx id, used for the deterministic ordering rule.
    std::uint64_t key() const;
};

struct Injection {
    ProcessId target;
    Message msg;
    Round round;
};

// Synchronous-round diffusion functionality.
//
// RECEIVE_i for round r+1 is assembled at end_round(r) in a fixed order:
//   1. adversary injections aimed at i during r, in injection order;
//   2. honest broadcasts of round r, sorted by (origin, id);
//   3. echoes of injections made during r-1 (every honest process gets
//      them, which yields the r+2 guarantee), sorted by id.
class RoundMailbox {
public:
    RoundMailbox(std::uint32_t n, std::set<ProcessId> corrupted);

    Round round() const noexcept { return round_; }
    std::uint32_t process_count() const noexcept { return n_; }
    bool is_honest(ProcessId p) const { return p < n_ && !corrupted_.contains(p); }
    const std::set<ProcessId>& corrupted() const noexcept { return corrupted_; }

    // Drains RECEIVE_p. Throws AlreadyRead.
    std::vector<Message> begin_round(ProcessId p);

    // Marks p complete and queues msgs for every process at r+1.
    // Throws NotBegun or AlreadyCompleted.
    void broadcast(ProcessId p, std::vector<Message> msgs);

    // Places msg in RECEIVE_target at r+1; all honest processes get it by r+2.
    void adversary_inject(ProcessId target, Message msg);

    // The adversary's end-of-turn signal.
    void adversary_conclude() { adversary_done_ = true; }

    // Rushing read access.
    const std::vector<Message>& peek_receive(ProcessId p) const { return receive_.at(p); }
    const std::vector<std::pair<ProcessId, Message>>& round_broadcasts() const noexcept { return broadcasts_; }
    const std::vector<Injection>& round_injections() const noexcept { return injections_; }

    // Throws IncompleteRound unless every honest process completed and the
    // adversary concluded.
    void end_round();

private:
    std::uint32_t n_;
    std::set<ProcessId> corrupted_;
    Round round_ = 0;
    std::vector<std::vector<Message>> receive_;
    std::vector<bool> begun_;
    std::vector<bool> completed_;
    bool adversary_done_ = false;
    std::vector<std::pair<ProcessId, Message>> broadcasts_;
    std::vector<Injection> injections_;
    std::vector<Message> echo_next_; // injected last round, echoed at end of this one
};

} // namespace tcsim
