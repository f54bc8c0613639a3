#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cpcomp/net.hpp"

namespace cpcomp {

// Routing attribute domains. One domain per instance; ⊥ is modelled as an
// empty optional at the use sites (OptAttr).

struct RipAttr {
    int hops = 0; // 0..15, 16 would be infinity and is represented as ⊥
    friend bool operator==(const RipAttr&, const RipAttr&) = default;
};

struct OspfAttr {
    int64_t cost = 0;
    bool inter_area = false;
    friend bool operator==(const OspfAttr&, const OspfAttr&) = default;
};

struct BgpAttr {
    uint32_t local_pref = 100;
    std::vector<Community> communities; // sorted, unique
    std::vector<NodeId> as_path;        // nearest hop first
    friend bool operator==(const BgpAttr&, const BgpAttr&) = default;
};

struct StaticAttr {
    friend bool operator==(const StaticAttr&, const StaticAttr&) = default;
};

using Attribute = std::variant<RipAttr, OspfAttr, BgpAttr, StaticAttr>;
using OptAttr = std::optional<Attribute>;

enum class Ordering { Less, Greater, Incomparable };

// Strict partial order ≺ per domain. Attributes must come from the same domain.
Ordering compare_attrs(const Attribute& a, const Attribute& b);

// a ≈ b: neither a ≺ b nor b ≺ a (includes equality).
bool attrs_tied(const Attribute& a, const Attribute& b);

bool bgp_has_community(const BgpAttr& a, Community c);
void bgp_add_community(BgpAttr& a, Community c);
void bgp_delete_community(BgpAttr& a, Community c);

std::string format_attr(const OptAttr& a, const std::vector<std::string>& node_names);

// Stable hash for solution dedup.
size_t hash_attr(const OptAttr& a);

} // namespace cpcomp
