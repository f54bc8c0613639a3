#include "cpcomp/protocols.hpp"

#include <algorithm>

#include "cpcomp/errors.hpp"

namespace cpcomp {

std::optional<BgpState> eval_clause_stage(const std::vector<SpecClause>& clauses, bool present,
                                          BgpState state) {
    if (!present) return state;
    for (const auto& cl : clauses) {
        bool hit = true;
        for (Community c : cl.match_community)
            if (!std::binary_search(state.communities.begin(), state.communities.end(), c)) {
                hit = false;
                break;
            }
        if (!hit) continue;
        if (!cl.permit) return std::nullopt;
        // deletes run before adds, so a tag in both lists survives
        for (Community c : cl.delete_community) {
            auto it = std::lower_bound(state.communities.begin(), state.communities.end(), c);
            if (it != state.communities.end() && *it == c) state.communities.erase(it);
        }
        for (Community c : cl.add_community) {
            auto it = std::lower_bound(state.communities.begin(), state.communities.end(), c);
            if (it == state.communities.end() || *it != c) state.communities.insert(it, c);
        }
        if (cl.set_local_pref) state.local_pref = *cl.set_local_pref;
        return state;
    }
    return std::nullopt; // implicit trailing deny
}

OptAttr rip_transfer(const EdgeProgram& prog, const OptAttr& a) {
    if (!a || prog.acl_deny) return std::nullopt;
    int hops = std::get<RipAttr>(*a).hops + 1;
    if (hops > 15) return std::nullopt;
    return RipAttr{hops};
}

OptAttr ospf_transfer(const EdgeProgram& prog, bool area_flip, const OptAttr& a) {
    if (!a || prog.acl_deny) return std::nullopt;
    const auto& in = std::get<OspfAttr>(*a);
    return OspfAttr{in.cost + prog.ospf_cost, in.inter_area || area_flip};
}

OptAttr bgp_transfer(NodeId u, NodeId v, const EdgeProgram& prog, const OptAttr& a) {
    if (!a || prog.acl_deny) return std::nullopt;
    const auto& in = std::get<BgpAttr>(*a);
    for (NodeId w : in.as_path)
        if (w == u) return std::nullopt; // u would appear twice

    BgpState state{in.local_pref, in.communities};
    auto exported = eval_clause_stage(prog.export_clauses, prog.export_present, std::move(state));
    if (!exported) return std::nullopt;
    auto imported = eval_clause_stage(prog.import_clauses, prog.import_present, std::move(*exported));
    if (!imported) return std::nullopt;

    BgpAttr out;
    out.local_pref = imported->local_pref;
    out.communities = std::move(imported->communities);
    out.as_path.reserve(in.as_path.size() + 1);
    out.as_path.push_back(v); // the sender prepends itself
    out.as_path.insert(out.as_path.end(), in.as_path.begin(), in.as_path.end());
    return out;
}

OptAttr static_transfer(const EdgeProgram& prog, const OptAttr&) {
    // Spontaneous: the configured route exists whether or not the neighbor
    // has one. A deny ACL leaves the route unusable, so no label.
    if (prog.static_present && !prog.acl_deny) return StaticAttr{};
    return std::nullopt;
}

Ordering rip_compare(const RipAttr& a, const RipAttr& b) {
    return compare_attrs(Attribute{a}, Attribute{b});
}

Ordering ospf_compare(const OspfAttr& a, const OspfAttr& b) {
    return compare_attrs(Attribute{a}, Attribute{b});
}

Ordering bgp_compare(const BgpAttr& a, const BgpAttr& b) {
    return compare_attrs(Attribute{a}, Attribute{b});
}

OptAttr apply_h(const AttrAbstraction& h, const OptAttr& a) {
    if (!a || h.kind == AttrAbstraction::Kind::Identity) return a;
    if (!std::holds_alternative<BgpAttr>(*a)) return a;
    BgpAttr out = std::get<BgpAttr>(*a);
    for (NodeId& w : out.as_path) {
        auto it = h.node_map.find(w);
        if (it == h.node_map.end()) throw UnmappedNode("as-path node " + std::to_string(w));
        w = it->second;
    }
    if (h.kind == AttrAbstraction::Kind::BgpDropUnusedTags && !h.unused_tags.empty()) {
        auto& cs = out.communities;
        cs.erase(std::remove_if(cs.begin(), cs.end(),
                                [&](Community c) { return h.unused_tags.count(c) != 0; }),
                 cs.end());
    }
    return out;
}

} // namespace cpcomp
