#pragma once

// Shared builders for hand-made fixtures. Keeping NetworkSpec invariants
// (sorted nodes/edges, a < b) here so the tests stay terse.

#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"

#include "cpcomp/compress.hpp"
#include "cpcomp/config_ir.hpp"
#include "cpcomp/dest_ecs.hpp"
#include "cpcomp/equiv_oracle.hpp"
#include "cpcomp/srp.hpp"

namespace cpcomp::testutil {

inline NodeRecord tnode(std::string id, int64_t asn, std::string proto) {
    return NodeRecord{std::move(id), asn, {std::move(proto)}};
}

inline EdgeRecord tedge(std::string a, std::string b, int cost = 1, int area = 0) {
    EdgeRecord e;
    e.a = std::move(a);
    e.b = std::move(b);
    if (e.b < e.a) std::swap(e.a, e.b);
    e.ospf_cost = cost;
    e.ospf_area = area;
    return e;
}

inline void finish(NetworkSpec& spec) {
    std::sort(spec.nodes.begin(), spec.nodes.end(),
              [](const NodeRecord& x, const NodeRecord& y) { return x.id < y.id; });
    std::sort(spec.edges.begin(), spec.edges.end(), [](const EdgeRecord& x, const EdgeRecord& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
}

// d - a - b path running RIP, destination prefix at d.
inline NetworkSpec rip_chain3() {
    NetworkSpec spec;
    spec.nodes = {tnode("a", 0, "rip"), tnode("b", 0, "rip"), tnode("d", 0, "rip")};
    spec.edges = {tedge("a", "b"), tedge("a", "d")};
    spec.origins["d"] = {parse_prefix("10.0.0.0/24")};
    finish(spec);
    return spec;
}

inline SpecializedSpec specialize_first(const NetworkSpec& spec) {
    auto ecs = compute_ecs(spec);
    REQUIRE(!ecs.empty());
    return specialize_spec(spec, ecs[0]);
}

inline SrpInstance srp_at(const SpecializedSpec& sp, const std::string& dest) {
    for (NodeId u = 0; u < (NodeId)sp.node_names.size(); ++u)
        if (sp.node_names[u] == dest) return sp.make_srp(u);
    REQUIRE(false);
    return sp.make_srp(0);
}

inline NodeId dense_id(const SpecializedSpec& sp, const std::string& name) {
    for (NodeId u = 0; u < (NodeId)sp.node_names.size(); ++u)
        if (sp.node_names[u] == name) return u;
    REQUIRE(false);
    return -1;
}

// The sidecar speaks document ids; the oracle wants dense ids on both sides.
inline OracleMapping oracle_mapping(const SpecializedSpec& sp, const SpecializedSpec& abs_sp,
                                    const AbstractNetwork& abs) {
    OracleMapping om;
    for (NodeId u = 0; u < (NodeId)sp.node_names.size(); ++u)
        om.f[u] = dense_id(abs_sp, abs.f.at(sp.node_names[u]));
    for (const auto& [base, copies] : abs.copy_groups) {
        std::vector<NodeId>& g = om.copy_groups[dense_id(abs_sp, base)];
        for (const std::string& c : copies) g.push_back(dense_id(abs_sp, c));
    }
    om.h_kind = abs.h.kind;
    om.unused_tags = abs.h.unused_tags;
    return om;
}

} // namespace cpcomp::testutil
