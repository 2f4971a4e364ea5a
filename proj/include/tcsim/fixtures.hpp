#pragma once

#include <map>
#include <string>

#include "tcsim/trace.hpp"

namespace tcsim {

// Hand-scripted eleven-block Nakamoto execution over four honest processes.
// Main chain b1 b2 b3 b5 b6 b10 b11; b4 forks off b3 in b6's round (so b6
// cannot reference it) and is extended by b7 and b8; b9 is mined next to
// b10 on b6. The forks ignore the fork-choice rule on purpose. Every block
// carries a coinbase, and transaction t1 sits in b4 and again in b10. All processes deliver the
// whole main chain in the final round.
struct ScriptedExecution {
    ExecutionTrace trace;
    std::map<std::string, BlockId> ids;

    BlockId operator[](const std::string& label) const { return ids.at(label); }
};

ScriptedExecution figure2_execution(ClosureMode mode);

} // namespace tcsim
