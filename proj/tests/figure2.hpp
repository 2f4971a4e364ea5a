#pragma once

// Hand-encoded eleven-block example, by label, independent of the library's
// scripted fixture: strong parent and (closure) weak references.

#include <map>
#include <string>
#include <vector>

namespace fig2 {

struct Node {
    std::string parent;
    std::vector<std::string> weak;
};

inline const std::map<std::string, Node>& nodes() {
    static const std::map<std::string, Node> n{
        {"b1", {"genesis", {}}},  {"b2", {"b1", {}}},          {"b3", {"b2", {}}},
        {"b4", {"b3", {"b5"}}},   {"b5", {"b3", {}}},          {"b6", {"b5", {}}},
        {"b7", {"b4", {"b6"}}},   {"b8", {"b4", {"b6"}}},      {"b9", {"b6", {"b7", "b8"}}},
        {"b10", {"b6", {"b7", "b8"}}}, {"b11", {"b10", {"b9"}}},
    };
    return n;
}

inline const std::vector<std::string>& main_chain() {
    static const std::vector<std::string> c{"b1", "b2", "b3", "b5", "b6", "b10", "b11"};
    return c;
}

} // namespace fig2
