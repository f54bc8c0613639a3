#include "cpcomp/attribute.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "cpcomp/net.hpp"

namespace cpcomp {

namespace {

Ordering from_less(bool a_less, bool b_less) {
    if (a_less) return Ordering::Less;
    if (b_less) return Ordering::Greater;
    return Ordering::Incomparable;
}

} // namespace

Ordering compare_attrs(const Attribute& a, const Attribute& b) {
    if (a.index() != b.index())
        throw std::logic_error("compare_attrs: mixed attribute domains");
    if (std::holds_alternative<RipAttr>(a)) {
        const auto& x = std::get<RipAttr>(a);
        const auto& y = std::get<RipAttr>(b);
        return from_less(x.hops < y.hops, y.hops < x.hops);
    }
    if (std::holds_alternative<OspfAttr>(a)) {
        // Intra-area routes beat inter-area routes; cost breaks the tie.
        const auto& x = std::get<OspfAttr>(a);
        const auto& y = std::get<OspfAttr>(b);
        auto key = [](const OspfAttr& o) { return std::pair<int, int64_t>(o.inter_area ? 1 : 0, o.cost); };
        return from_less(key(x) < key(y), key(y) < key(x));
    }
    if (std::holds_alternative<BgpAttr>(a)) {
        // Higher local-pref wins, then shorter AS path; otherwise incomparable
        // (communities and path contents never decide).
        const auto& x = std::get<BgpAttr>(a);
        const auto& y = std::get<BgpAttr>(b);
        if (x.local_pref != y.local_pref)
            return x.local_pref > y.local_pref ? Ordering::Less : Ordering::Greater;
        if (x.as_path.size() != y.as_path.size())
            return x.as_path.size() < y.as_path.size() ? Ordering::Less : Ordering::Greater;
        return Ordering::Incomparable;
    }
    return Ordering::Incomparable; // static: empty order
}

bool attrs_tied(const Attribute& a, const Attribute& b) {
    return compare_attrs(a, b) == Ordering::Incomparable;
}

bool bgp_has_community(const BgpAttr& a, Community c) {
    return std::binary_search(a.communities.begin(), a.communities.end(), c);
}

void bgp_add_community(BgpAttr& a, Community c) {
    auto it = std::lower_bound(a.communities.begin(), a.communities.end(), c);
    if (it == a.communities.end() || *it != c) a.communities.insert(it, c);
}

void bgp_delete_community(BgpAttr& a, Community c) {
    auto it = std::lower_bound(a.communities.begin(), a.communities.end(), c);
    if (it != a.communities.end() && *it == c) a.communities.erase(it);
}

std::string format_attr(const OptAttr& a, const std::vector<std::string>& node_names) {
    if (!a) return "none";
    std::ostringstream out;
    if (const auto* r = std::get_if<RipAttr>(&*a)) {
        out << "hops=" << r->hops;
    } else if (const auto* o = std::get_if<OspfAttr>(&*a)) {
        out << "cost=" << o->cost << (o->inter_area ? " inter-area" : " intra-area");
    } else if (const auto* g = std::get_if<BgpAttr>(&*a)) {
        out << "lp=" << g->local_pref << " tags={";
        for (size_t i = 0; i < g->communities.size(); ++i)
            out << (i ? "," : "") << format_community(g->communities[i]);
        out << "} path=[";
        for (size_t i = 0; i < g->as_path.size(); ++i) {
            NodeId n = g->as_path[i];
            out << (i ? "," : "");
            if (n >= 0 && n < (NodeId)node_names.size())
                out << node_names[n];
            else
                out << n;
        }
        out << "]";
    } else {
        out << "static";
    }
    return out.str();
}

size_t hash_attr(const OptAttr& a) {
    auto mix = [](size_t h, size_t v) { return h * 1000003u ^ v; };
    if (!a) return 0x9e3779b9;
    size_t h = a->index() + 1;
    if (const auto* r = std::get_if<RipAttr>(&*a)) {
        h = mix(h, (size_t)r->hops);
    } else if (const auto* o = std::get_if<OspfAttr>(&*a)) {
        h = mix(mix(h, (size_t)o->cost), o->inter_area);
    } else if (const auto* g = std::get_if<BgpAttr>(&*a)) {
        h = mix(h, g->local_pref);
        for (Community c : g->communities) h = mix(h, c);
        h = mix(h, 0xfeed);
        for (NodeId n : g->as_path) h = mix(h, (size_t)(n + 1));
    }
    return h;
}

} // namespace cpcomp
