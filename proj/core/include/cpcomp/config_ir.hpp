#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpcomp/net.hpp"

namespace cpcomp {

// Vendor-neutral configuration IR, serialized as JSON with schema version
// "bonsai-net/1". Parsing rejects unknown fields; emission uses a stable
// field and record order so equal documents are byte-identical.

struct PolicyClause {
    // Match conditions are AND-ed; an absent condition matches everything.
    std::vector<Prefix> match_prefix;       // route destination within any listed prefix
    std::vector<Community> match_community; // route carries every listed community
    std::optional<std::string> match_protocol; // "rip" | "ospf" | "bgp" | "static"

    bool permit = true; // deny drops the route; either way the clause terminates
    std::vector<Community> add_community;
    std::vector<Community> delete_community;
    std::optional<uint32_t> set_local_pref;

    bool matches_everything() const {
        return match_prefix.empty() && match_community.empty() && !match_protocol;
    }
};

using RoutePolicy = std::vector<PolicyClause>; // first matching clause wins; no match = deny

struct AclEntry {
    Prefix prefix;
    bool permit = true;
};
// First matching entry decides; a present ACL ends in an implicit deny.
// An interface without an ACL id permits everything.
using AclList = std::vector<AclEntry>;

struct InterfaceCfg {
    std::string import_policy; // policy id, "" = permit-all
    std::string export_policy;
    std::string acl;           // acl id, "" = permit-all
    bool is_default() const { return import_policy.empty() && export_policy.empty() && acl.empty(); }
};

struct EdgeRecord {
    std::string a, b;     // endpoint node ids, a < b after normalization
    int ospf_cost = 1;    // ≥ 1
    int ospf_area = 0;
    InterfaceCfg if_ab;   // a's interface facing b (a's import/export, ACL for a→b forwarding)
    InterfaceCfg if_ba;
};

struct NodeRecord {
    std::string id;
    int64_t asn = 0;
    std::vector<std::string> protocols; // typically one of rip|ospf|bgp|static
};

struct StaticRouteEntry {
    Prefix prefix;
    std::string next_hop;
};

struct NetworkSpec {
    std::vector<NodeRecord> nodes; // sorted by id
    std::vector<EdgeRecord> edges; // sorted by (a,b)
    std::map<std::string, RoutePolicy> policies;
    std::map<std::string, AclList> acls;
    std::map<std::string, std::vector<StaticRouteEntry>> static_routes;
    std::map<std::string, std::vector<Prefix>> origins;

    int node_index(const std::string& id) const; // -1 when absent
    const EdgeRecord* find_edge(const std::string& x, const std::string& y) const;
    const InterfaceCfg& iface(const std::string& from, const std::string& to) const;
};

extern const char* const kSchemaVersion; // "bonsai-net/1"

NetworkSpec parse_network_spec(const std::string& json_text); // ParseError / DanglingReference
std::string emit_network_spec(const NetworkSpec& spec);       // canonical form

} // namespace cpcomp
