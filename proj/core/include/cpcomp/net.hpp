#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace cpcomp {

using NodeId = int32_t; // dense index into the node table of a document
using EdgeIdx = int32_t;

// IPv4 prefix. addr is stored with the host bits zeroed.
struct Prefix {
    uint32_t addr = 0;
    int len = 0;

    bool contains(const Prefix& other) const;        // this ⊇ other
    bool overlaps(const Prefix& other) const;
    uint32_t mask() const { return len == 0 ? 0u : ~uint32_t(0) << (32 - len); }

    friend bool operator==(const Prefix& a, const Prefix& b) = default;
    friend bool operator<(const Prefix& a, const Prefix& b) {
        return std::tie(a.addr, a.len) < std::tie(b.addr, b.len);
    }
};

Prefix parse_prefix(const std::string& text);  // "A.B.C.D/len", throws ParseError
std::string format_prefix(const Prefix& p);

// BGP community "N:M" packed into 32 bits.
using Community = uint32_t;
Community parse_community(const std::string& text); // throws ParseError
std::string format_community(Community c);

} // namespace cpcomp
