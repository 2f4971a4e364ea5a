#pragma once

#include <string>

#include "tcsim/trace.hpp"

namespace tcsim {

// The observer's view at the end of `round`: blocks it mined or received
// by then, its deliveries up to then highlighted. Throws UnknownRound past
// the trace.
DagStore view_at(const ExecutionTrace& trace, Round round, ProcessId observer);
std::string export_dot(const ExecutionTrace& trace, Round round, ProcessId observer);

} // namespace tcsim
