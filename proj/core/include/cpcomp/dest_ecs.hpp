#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cpcomp/attribute.hpp"
#include "cpcomp/config_ir.hpp"
#include "cpcomp/topology.hpp"

namespace cpcomp {

enum class Protocol { Rip, Ospf, Bgp, Static };
Protocol parse_protocol(const std::string& name);
std::string protocol_name(Protocol p);

// A destination equivalence class: a set of address blocks that every filter
// and origin in the spec treats identically.
struct DestEquivClass {
    std::vector<Prefix> prefixes;        // disjoint maximal blocks, ascending
    std::vector<std::string> dest_nodes; // nodes originating the class, ascending
    Prefix representative;               // lowest block; all matches are uniform across blocks
};

// Binary trie over prefix space used to atomize the address space at every
// origin/filter boundary.
class PrefixTrie {
public:
    void insert(const Prefix& p);
    // Maximal regions of the space with a uniform set of covering inserted
    // prefixes. Callback: (region, covering prefixes sorted).
    void atoms(const std::function<void(const Prefix&, const std::vector<Prefix>&)>& fn) const;

private:
    struct Node {
        std::unique_ptr<Node> child[2];
        bool boundary = false;
    };
    void walk(const Node* n, Prefix here, std::vector<Prefix>& cover,
              const std::function<void(const Prefix&, const std::vector<Prefix>&)>& fn) const;
    Node root_;
};

// All classes induced by origins, policy prefix matches, ACL prefixes and
// static-route prefixes. Deterministic: ascending by representative.
std::vector<DestEquivClass> compute_ecs(const NetworkSpec& spec);

// ---- specialization ----

// A policy clause with the destination-dependent conditions folded away for
// a fixed EC: only the community/pass-through behavior remains.
struct SpecClause {
    std::vector<Community> match_community; // empty = matches everything
    bool permit = true;
    std::vector<Community> add_community;
    std::vector<Community> delete_community;
    std::optional<uint32_t> set_local_pref;
};

// Everything the transfer function of one directed edge e=(u,v) needs,
// with all prefix matches resolved against the EC representative.
struct EdgeProgram {
    bool acl_deny = false;       // ACL of iface (u,v) drops the class
    bool static_present = false; // u has an EC-covering static route via v
    int ospf_cost = 1;
    int ospf_area = 0; // inter-area flip is relative to the destination, see make_srp
    std::vector<SpecClause> import_clauses; // u's import on (u,v); valid when import_present
    std::vector<SpecClause> export_clauses; // v's export on (v,u)
    bool import_present = false; // false = permit-all (no policy configured)
    bool export_present = false;
};

struct SrpInstance; // srp.hpp

// A network spec specialized to one destination class. Destination-node
// independent except where noted; make_srp pins the destination.
struct SpecializedSpec {
    Protocol protocol = Protocol::Bgp;
    std::vector<std::string> node_names; // dense id -> document id
    std::vector<int64_t> node_asn;
    Topology topo;                        // dest = -1 until make_srp
    std::vector<EdgeProgram> programs;    // per directed edge, same index as topo.edges
    DestEquivClass ec;
    std::set<Community> all_communities;  // every community mentioned in the spec
    std::set<Community> matched_communities; // matched by some specialized clause
    std::set<uint32_t> lp_values;         // {100} ∪ set-local-pref constants (specialized)
    std::vector<std::set<uint32_t>> node_prefs; // per node: {100} ∪ own interface lp constants

    std::set<Community> unused_communities() const;
    int ospf_dest_area(NodeId dest) const;
    SrpInstance make_srp(NodeId dest) const;
};

// Resolve the spec against one EC: protocol check, dense ids, edge programs,
// pref/community universes. Throws ParseError on mixed protocols.
SpecializedSpec specialize_spec(const NetworkSpec& spec, const DestEquivClass& ec);

} // namespace cpcomp
