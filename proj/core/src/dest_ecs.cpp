#include "cpcomp/dest_ecs.hpp"

#include <algorithm>

#include "cpcomp/errors.hpp"
#include "cpcomp/policy_bdd.hpp"
#include "cpcomp/protocols.hpp"
#include "cpcomp/srp.hpp"

namespace cpcomp {

Protocol parse_protocol(const std::string& name) {
    if (name == "rip") return Protocol::Rip;
    if (name == "ospf") return Protocol::Ospf;
    if (name == "bgp") return Protocol::Bgp;
    if (name == "static") return Protocol::Static;
    throw ParseError("protocol", "unknown protocol '" + name + "'");
}

std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::Rip: return "rip";
        case Protocol::Ospf: return "ospf";
        case Protocol::Bgp: return "bgp";
        case Protocol::Static: return "static";
    }
    return "?";
}

void PrefixTrie::insert(const Prefix& p) {
    Node* n = &root_;
    for (int i = 0; i < p.len; ++i) {
        int b = (p.addr >> (31 - i)) & 1;
        if (!n->child[b]) n->child[b] = std::make_unique<Node>();
        n = n->child[b].get();
    }
    n->boundary = true;
}

void PrefixTrie::walk(const Node* n, Prefix here, std::vector<Prefix>& cover,
                      const std::function<void(const Prefix&, const std::vector<Prefix>&)>& fn) const {
    if (n->boundary) cover.push_back(here);
    if (!n->child[0] && !n->child[1]) {
        fn(here, cover);
    } else {
        for (int b = 0; b < 2; ++b) {
            Prefix q{here.addr | (b ? (1u << (31 - here.len)) : 0u), here.len + 1};
            if (n->child[b])
                walk(n->child[b].get(), q, cover, fn);
            else
                fn(q, cover); // uniform hole: no boundary anywhere below
        }
    }
    if (n->boundary) cover.pop_back();
}

void PrefixTrie::atoms(const std::function<void(const Prefix&, const std::vector<Prefix>&)>& fn) const {
    std::vector<Prefix> cover;
    walk(&root_, Prefix{0, 0}, cover, fn);
}

namespace {

bool covers(const Prefix& p, const Prefix& region) {
    return p.len <= region.len && p.contains(region);
}

} // namespace

std::vector<DestEquivClass> compute_ecs(const NetworkSpec& spec) {
    PrefixTrie trie;
    for (const auto& [node, prefixes] : spec.origins)
        for (const auto& p : prefixes) trie.insert(p);
    for (const auto& [id, pol] : spec.policies)
        for (const auto& clause : pol)
            for (const auto& p : clause.match_prefix) trie.insert(p);
    for (const auto& [id, acl] : spec.acls)
        for (const auto& entry : acl) trie.insert(entry.prefix);
    for (const auto& [node, routes] : spec.static_routes)
        for (const auto& r : routes) trie.insert(r.prefix);

    // Atom signature: one bit per (origin prefix | clause prefix filter |
    // acl entry | static route), in a fixed document order.
    struct Group {
        std::vector<Prefix> blocks;
        std::vector<std::string> dests;
    };
    std::map<std::vector<bool>, Group> groups;

    trie.atoms([&](const Prefix& region, const std::vector<Prefix>&) {
        std::vector<bool> sig;
        std::vector<std::string> dests;
        for (const auto& [node, prefixes] : spec.origins) {
            bool orig = false;
            for (const auto& p : prefixes) {
                bool c = covers(p, region);
                sig.push_back(c);
                orig = orig || c;
            }
            if (orig) dests.push_back(node);
        }
        if (dests.empty()) return; // unoriginated space forms no class
        for (const auto& [id, pol] : spec.policies)
            for (const auto& clause : pol) {
                bool hit = clause.match_prefix.empty();
                for (const auto& p : clause.match_prefix) hit = hit || covers(p, region);
                sig.push_back(hit);
            }
        for (const auto& [id, acl] : spec.acls)
            for (const auto& entry : acl) sig.push_back(covers(entry.prefix, region));
        for (const auto& [node, routes] : spec.static_routes)
            for (const auto& r : routes) sig.push_back(covers(r.prefix, region));

        Group& g = groups[sig];
        g.blocks.push_back(region); // DFS emits regions in ascending order
        if (g.dests.empty()) g.dests = std::move(dests);
    });

    std::vector<DestEquivClass> out;
    for (auto& [sig, g] : groups) {
        DestEquivClass ec;
        ec.prefixes = std::move(g.blocks);
        ec.dest_nodes = std::move(g.dests);
        ec.representative = ec.prefixes.front();
        out.push_back(std::move(ec));
    }
    std::sort(out.begin(), out.end(), [](const DestEquivClass& a, const DestEquivClass& b) {
        return a.representative < b.representative;
    });
    return out;
}

std::set<Community> SpecializedSpec::unused_communities() const {
    std::set<Community> out;
    for (Community c : all_communities)
        if (!matched_communities.count(c)) out.insert(c);
    return out;
}

int SpecializedSpec::ospf_dest_area(NodeId dest) const {
    int area = -1;
    for (EdgeIdx e : topo.out_edges[dest])
        if (area < 0 || programs[e].ospf_area < area) area = programs[e].ospf_area;
    return area < 0 ? 0 : area;
}

SpecializedSpec specialize_spec(const NetworkSpec& spec, const DestEquivClass& ec) {
    SpecializedSpec sp;
    sp.ec = ec;

    if (spec.nodes.empty()) throw ParseError("nodes", "empty network");
    std::string proto_name;
    for (const auto& n : spec.nodes) {
        if (n.protocols.size() != 1)
            throw ParseError("nodes." + n.id, "exactly one routing protocol per node is supported");
        if (proto_name.empty())
            proto_name = n.protocols[0];
        else if (n.protocols[0] != proto_name)
            throw ParseError("nodes." + n.id, "mixed-protocol networks are not supported");
    }
    sp.protocol = parse_protocol(proto_name);

    for (const auto& n : spec.nodes) {
        sp.node_names.push_back(n.id);
        sp.node_asn.push_back(n.asn);
    }
    sp.topo.num_nodes = (int)spec.nodes.size();
    sp.topo.dest = -1;
    for (const auto& e : spec.edges) {
        NodeId ia = spec.node_index(e.a), ib = spec.node_index(e.b);
        sp.topo.edges.push_back({ia, ib});
        sp.topo.edges.push_back({ib, ia});
    }
    sp.topo.build_adjacency();

    sp.programs.resize(sp.topo.edges.size());
    for (size_t i = 0; i < sp.topo.edges.size(); ++i) {
        auto [u, v] = sp.topo.edges[i];
        const std::string& nu = sp.node_names[u];
        const std::string& nv = sp.node_names[v];
        const EdgeRecord* rec = spec.find_edge(nu, nv);
        EdgeProgram& prog = sp.programs[i];
        prog.ospf_cost = rec->ospf_cost;
        prog.ospf_area = rec->ospf_area;

        const InterfaceCfg& side_u = rec->a == nu ? rec->if_ab : rec->if_ba; // u's side
        const InterfaceCfg& side_v = rec->a == nv ? rec->if_ab : rec->if_ba;
        if (!side_u.acl.empty()) prog.acl_deny = acl_denies(spec.acls.at(side_u.acl), ec);
        if (!side_u.import_policy.empty()) {
            prog.import_present = true;
            prog.import_clauses =
                specialize_policy(spec.policies.at(side_u.import_policy), ec, sp.protocol);
        }
        if (!side_v.export_policy.empty()) {
            prog.export_present = true;
            prog.export_clauses =
                specialize_policy(spec.policies.at(side_v.export_policy), ec, sp.protocol);
        }

        auto it = spec.static_routes.find(nu);
        if (it != spec.static_routes.end())
            for (const auto& r : it->second)
                if (r.next_hop == nv && covers(r.prefix, ec.representative))
                    prog.static_present = true;
    }

    // A community match can only fire once some policy has added the tag:
    // routes start with none. Clauses matching a tag nothing adds are dead,
    // and everything downstream (relations, pref sets, tag universes) should
    // see only live behavior. Dropping a clause removes its adds, so iterate.
    for (;;) {
        std::set<Community> addable;
        for (const EdgeProgram& prog : sp.programs) {
            for (const auto& cl : prog.import_clauses)
                addable.insert(cl.add_community.begin(), cl.add_community.end());
            for (const auto& cl : prog.export_clauses)
                addable.insert(cl.add_community.begin(), cl.add_community.end());
        }
        auto dead = [&](const SpecClause& cl) {
            for (Community c : cl.match_community)
                if (!addable.count(c)) return true;
            return false;
        };
        bool changed = false;
        for (EdgeProgram& prog : sp.programs) {
            size_t n = prog.import_clauses.size() + prog.export_clauses.size();
            std::erase_if(prog.import_clauses, dead);
            std::erase_if(prog.export_clauses, dead);
            if (prog.import_clauses.size() + prog.export_clauses.size() != n) changed = true;
        }
        if (!changed) break;
    }

    for (const auto& [id, pol] : spec.policies)
        for (const auto& clause : pol) {
            for (Community c : clause.match_community) sp.all_communities.insert(c);
            for (Community c : clause.add_community) sp.all_communities.insert(c);
            for (Community c : clause.delete_community) sp.all_communities.insert(c);
        }

    sp.lp_values.insert(100);
    sp.node_prefs.assign(sp.topo.num_nodes, {100});
    for (size_t i = 0; i < sp.topo.edges.size(); ++i) {
        auto [u, v] = sp.topo.edges[i];
        const EdgeProgram& prog = sp.programs[i];
        for (const auto& cl : prog.import_clauses) {
            for (Community c : cl.match_community) sp.matched_communities.insert(c);
            if (cl.set_local_pref) {
                sp.lp_values.insert(*cl.set_local_pref);
                sp.node_prefs[u].insert(*cl.set_local_pref);
            }
        }
        for (const auto& cl : prog.export_clauses) {
            for (Community c : cl.match_community) sp.matched_communities.insert(c);
            if (cl.set_local_pref) {
                sp.lp_values.insert(*cl.set_local_pref);
                sp.node_prefs[v].insert(*cl.set_local_pref); // the export side belongs to v
            }
        }
    }
    return sp;
}

namespace {

// Owned snapshot captured by the SRP closures; keeps the instance valid
// after the SpecializedSpec that produced it goes away.
struct TransferState {
    Protocol proto;
    std::vector<EdgeProgram> progs;
    std::vector<bool> flip; // ospf: edge area != destination area
    std::vector<std::pair<NodeId, NodeId>> ends;
};

} // namespace

SrpInstance SpecializedSpec::make_srp(NodeId dest) const {
    auto st = std::make_shared<TransferState>();
    st->proto = protocol;
    st->progs = programs;
    st->ends = topo.edges;
    if (protocol == Protocol::Ospf) {
        int dest_area = ospf_dest_area(dest);
        for (const auto& prog : programs) st->flip.push_back(prog.ospf_area != dest_area);
    }

    SrpInstance srp;
    srp.topo = topo;
    srp.topo.dest = dest;
    srp.attr_domain = protocol_name(protocol);
    switch (protocol) {
        case Protocol::Rip: srp.init_attr = RipAttr{0}; break;
        case Protocol::Ospf: srp.init_attr = OspfAttr{0, false}; break;
        case Protocol::Bgp: srp.init_attr = BgpAttr{}; break;
        case Protocol::Static: srp.init_attr = StaticAttr{}; break;
    }
    srp.compare = [](const Attribute& a, const Attribute& b) { return compare_attrs(a, b); };
    srp.transfer = [st](EdgeIdx e, const OptAttr& a) -> OptAttr {
        switch (st->proto) {
            case Protocol::Rip: return rip_transfer(st->progs[e], a);
            case Protocol::Ospf: return ospf_transfer(st->progs[e], st->flip[e], a);
            case Protocol::Bgp:
                return bgp_transfer(st->ends[e].first, st->ends[e].second, st->progs[e], a);
            case Protocol::Static: return static_transfer(st->progs[e], a);
        }
        return std::nullopt;
    };
    return srp;
}

} // namespace cpcomp
