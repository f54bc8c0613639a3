#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cpcomp/attribute.hpp"
#include "cpcomp/dest_ecs.hpp"

namespace cpcomp {

// Per-protocol transfer functions over specialized edge programs. These are
// the direct interpreters; the BDD relations in policy_bdd are compiled
// independently and the two are cross-checked in tests.

// Direct evaluation of one clause stage on a concrete BGP route state
// (first match wins, present stage with no match denies, absent stage
// permits unchanged; community match = all listed present).
// Returns nullopt when the stage denies the route.
struct BgpState {
    uint32_t local_pref = 100;
    std::vector<Community> communities; // sorted unique
};
std::optional<BgpState> eval_clause_stage(const std::vector<SpecClause>& clauses, bool present,
                                          BgpState state);

OptAttr rip_transfer(const EdgeProgram& prog, const OptAttr& a);
OptAttr ospf_transfer(const EdgeProgram& prog, bool area_flip, const OptAttr& a);
// u receives what v exports over e=(u,v); v prepends itself, u loop-checks.
OptAttr bgp_transfer(NodeId u, NodeId v, const EdgeProgram& prog, const OptAttr& a);
OptAttr static_transfer(const EdgeProgram& prog, const OptAttr& a);

Ordering rip_compare(const RipAttr& a, const RipAttr& b);
Ordering ospf_compare(const OspfAttr& a, const OspfAttr& b);
Ordering bgp_compare(const BgpAttr& a, const BgpAttr& b);

// Attribute abstraction h applied alongside a topology abstraction f.
struct AttrAbstraction {
    enum class Kind { Identity, BgpPathRename, BgpDropUnusedTags };
    Kind kind = Kind::Identity;
    std::set<Community> unused_tags;     // dropped from communities
    std::map<NodeId, NodeId> node_map;   // concrete -> abstract (as_path rename)
};

OptAttr apply_h(const AttrAbstraction& h, const OptAttr& a); // UnmappedNode on gaps

} // namespace cpcomp
