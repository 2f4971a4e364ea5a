#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>

namespace tcsim {

using ProcessId = std::uint32_t;
using Round = std::uint32_t;

// Marks messages that originate from the adversary rather than a process.
inline constexpr ProcessId kAdversary = std::numeric_limits<ProcessId>::max();

struct BlockId {
    std::uint64_t value = 0;

    auto operator<=>(const BlockId&) const = default;

    std::string hex() const;
    static BlockId from_hex(std::string_view text);
};

struct TxId {
    std::uint64_t value = 0;

    auto operator<=>(const TxId&) const = default;

    std::string hex() const;
    static TxId from_hex(std::string_view text);
};

// splitmix64 finalizer; used for ids and for keyed randomness.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace tcsim

template <>
struct std::hash<tcsim::BlockId> {
    std::size_t operator()(const tcsim::BlockId& id) const noexcept { return static_cast<std::size_t>(id.value); }
};

template <>
struct std::hash<tcsim::TxId> {
    std::size_t operator()(const tcsim::TxId& id) const noexcept { return static_cast<std::size_t>(id.value); }
};
