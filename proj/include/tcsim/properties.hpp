#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tcsim/trace.hpp"

namespace tcsim {

enum class Property { NoDuplication, Integrity, Agreement, TotalOrder, Validity, ExternalValidity, ChainShape };

std::string_view to_string(Property p);
const std::vector<Property>& all_properties();

struct PropertyOptions {
    // Transactions broadcast and blocks delivered in the last `tail` rounds
    // are exempt from the liveness-style checks (Validity, delivery agreement).
    std::uint32_t tail = 50;
};

struct PropertyReport {
    std::map<Property, std::vector<std::string>> violations;

    bool passed(Property p) const;
    bool all_passed() const;
    std::size_t violation_count() const;
};

// Evaluates the atomic broadcast properties over the honest processes'
// protocol output (closure layer for closure traces, base layer otherwise).
PropertyReport check_properties(const ExecutionTrace& trace, const PropertyOptions& options = {});

} // namespace tcsim
