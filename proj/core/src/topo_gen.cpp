#include "cpcomp/topo_gen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "cpcomp/errors.hpp"

namespace cpcomp {

namespace {

std::string pad(int v, int width) {
    std::string s = std::to_string(v);
    while ((int)s.size() < width) s.insert(s.begin(), '0');
    return s;
}

Prefix slash24(int i) {
    // 10.x.y.0/24 with the node index split across the middle octets
    return Prefix{uint32_t(10u << 24 | (i / 256) << 16 | (i % 256) << 8), 24};
}

NodeRecord node(std::string id, int64_t asn, std::string proto) {
    return NodeRecord{std::move(id), asn, {std::move(proto)}};
}

EdgeRecord edge(std::string a, std::string b) {
    EdgeRecord e;
    if (b < a) std::swap(a, b);
    e.a = std::move(a);
    e.b = std::move(b);
    return e;
}

// Assign an interface policy on `node`'s side of edge {x,y}.
InterfaceCfg& side(EdgeRecord& e, const std::string& node) {
    return node == e.a ? e.if_ab : e.if_ba;
}

void sort_edges(NetworkSpec& spec) {
    std::sort(spec.edges.begin(), spec.edges.end(), [](const EdgeRecord& l, const EdgeRecord& r) {
        return std::tie(l.a, l.b) < std::tie(r.a, r.b);
    });
}

PolicyClause permit_all() { return PolicyClause{}; }

PolicyClause set_lp(uint32_t lp) {
    PolicyClause cl;
    cl.set_local_pref = lp;
    return cl;
}

// 2t pods of t ToRs + t aggregations, t² cores. Every ToR–agg pair inside a
// pod is linked; core c reaches aggregation slots {c, c+1, c+2 mod t} in every
// pod; cores form a circulant ring with offsets 1..11. Each ToR originates its
// own /24 and its export filter announces only that prefix.
NetworkSpec make_fattree(int size) {
    int t = (int)std::lround(std::sqrt(size / 5.0));
    if (t < 3 || 5 * t * t != size) throw UnsupportedSize("fattree size must be 5t^2 with t >= 3");

    NetworkSpec spec;
    int pods = 2 * t;
    auto tor_name = [&](int p, int i) { return "t" + pad(p, 2) + "_" + pad(i, 2); };
    auto agg_name = [&](int p, int j) { return "a" + pad(p, 2) + "_" + pad(j, 2); };
    auto core_name = [&](int c) { return "c" + pad(c, 3); };

    int asn = 65001;
    for (int c = 0; c < t * t; c++) spec.nodes.push_back(node(core_name(c), asn++, "bgp"));
    for (int p = 0; p < pods; p++)
        for (int j = 0; j < t; j++) spec.nodes.push_back(node(agg_name(p, j), asn++, "bgp"));
    int tor_idx = 0;
    for (int p = 0; p < pods; p++)
        for (int i = 0; i < t; i++) {
            std::string id = tor_name(p, i);
            spec.nodes.push_back(node(id, asn++, "bgp"));
            Prefix own = slash24(tor_idx++);
            spec.origins[id] = {own};
            PolicyClause cl;
            cl.match_prefix = {own};
            spec.policies["exp_" + id] = {cl}; // implicit trailing deny
        }
    std::sort(spec.nodes.begin(), spec.nodes.end(),
              [](const NodeRecord& l, const NodeRecord& r) { return l.id < r.id; });

    for (int p = 0; p < pods; p++)
        for (int i = 0; i < t; i++)
            for (int j = 0; j < t; j++) {
                EdgeRecord e = edge(tor_name(p, i), agg_name(p, j));
                side(e, tor_name(p, i)).export_policy = "exp_" + tor_name(p, i);
                spec.edges.push_back(e);
            }
    for (int c = 0; c < t * t; c++)
        for (int p = 0; p < pods; p++)
            for (int o = 0; o < 3; o++)
                spec.edges.push_back(edge(core_name(c), agg_name(p, (c + o) % t)));
    std::set<std::pair<std::string, std::string>> seen;
    for (int c = 0; c < t * t; c++)
        for (int o = 1; o <= 11; o++) {
            EdgeRecord e = edge(core_name(c), core_name((c + o) % (t * t)));
            if (e.a != e.b && seen.insert({e.a, e.b}).second) spec.edges.push_back(e);
        }
    sort_edges(spec);
    return spec;
}

NetworkSpec make_ring(int size) {
    if (size < 4 || size % 2 != 0) throw UnsupportedSize("ring size must be even and >= 4");
    NetworkSpec spec;
    auto name = [](int i) { return "r" + pad(i, 3); };
    for (int i = 0; i < size; i++) {
        spec.nodes.push_back(node(name(i), 65001 + i, "bgp"));
        spec.origins[name(i)] = {slash24(i)};
        spec.edges.push_back(edge(name(i), name((i + 1) % size)));
    }
    sort_edges(spec);
    return spec;
}

NetworkSpec make_mesh(int size) {
    if (size < 3) throw UnsupportedSize("mesh size must be >= 3");
    NetworkSpec spec;
    auto name = [](int i) { return "m" + pad(i, 3); };
    for (int i = 0; i < size; i++) {
        spec.nodes.push_back(node(name(i), 65001 + i, "bgp"));
        spec.origins[name(i)] = {slash24(i)};
        for (int j = i + 1; j < size; j++) spec.edges.push_back(edge(name(i), name(j)));
    }
    sort_edges(spec);
    return spec;
}

// Destination, three border routers b1..b3 and a reflector a. Each b imports
// routes heard from a at local-pref 200, so exactly one b uses its direct
// link and the others detour; the block of b's needs two copies.
NetworkSpec make_lp_gadget(int size) {
    if (size != 5) throw UnsupportedSize("lp-gadget has a fixed size of 5");
    NetworkSpec spec;
    spec.nodes = {node("a", 65001, "bgp"), node("b1", 65002, "bgp"), node("b2", 65003, "bgp"),
                  node("b3", 65004, "bgp"), node("d", 65005, "bgp")};
    spec.origins["d"] = {slash24(0)};
    spec.policies["lp200"] = {set_lp(200)};
    for (std::string b : {"b1", "b2", "b3"}) {
        spec.edges.push_back(edge(b, "d"));
        EdgeRecord e = edge(b, "a");
        side(e, b).import_policy = "lp200";
        spec.edges.push_back(e);
    }
    sort_edges(spec);
    return spec;
}

// d—a—b2 and d—b1—b2: a tags its exports, b2 lifts tagged routes to lp 200,
// so b2 prefers the a-path even though both have equal length.
NetworkSpec make_tag_gadget(int size) {
    if (size != 4) throw UnsupportedSize("tag-gadget has a fixed size of 4");
    NetworkSpec spec;
    spec.nodes = {node("a", 65001, "bgp"), node("b1", 65002, "bgp"), node("b2", 65003, "bgp"),
                  node("d", 65004, "bgp")};
    spec.origins["d"] = {slash24(0)};
    Community tag = parse_community("65001:1");
    PolicyClause add;
    add.add_community = {tag};
    spec.policies["tag_out"] = {add};
    PolicyClause lift;
    lift.match_community = {tag};
    lift.set_local_pref = 200;
    spec.policies["tag_lift"] = {lift, permit_all()};
    spec.edges.push_back(edge("a", "d"));
    spec.edges.push_back(edge("b1", "d"));
    EdgeRecord ab = edge("a", "b2");
    side(ab, "a").export_policy = "tag_out";
    side(ab, "b2").import_policy = "tag_lift";
    spec.edges.push_back(ab);
    spec.edges.push_back(edge("b1", "b2"));
    sort_edges(spec);
    return spec;
}

// k borders u1..uk, k-1 reflectors h1..h_{k-1} and a destination. Every u has
// a direct link plus a link to every reflector; hearing from h_j is imported
// at local-pref 100(j+1). Reflectors re-export whatever they pick, so a stable
// solution stacks the borders across all k preference levels at once.
NetworkSpec make_chain(int k) {
    if (k < 2 || k > 4) throw UnsupportedSize("chain size must be in 2..4");
    NetworkSpec spec;
    spec.nodes.push_back(node("d", 65000, "bgp"));
    spec.origins["d"] = {slash24(0)};
    for (int j = 1; j < k; j++) {
        spec.nodes.push_back(node("h" + std::to_string(j), 65000 + j, "bgp"));
        spec.policies["lp" + std::to_string(100 * (j + 1))] = {set_lp(100 * (j + 1))};
    }
    for (int i = 1; i <= k; i++) {
        std::string u = "u" + std::to_string(i);
        spec.nodes.push_back(node(u, 65100 + i, "bgp"));
        spec.edges.push_back(edge(u, "d"));
        for (int j = 1; j < k; j++) {
            EdgeRecord e = edge(u, "h" + std::to_string(j));
            side(e, u).import_policy = "lp" + std::to_string(100 * (j + 1));
            spec.edges.push_back(e);
        }
    }
    std::sort(spec.nodes.begin(), spec.nodes.end(),
              [](const NodeRecord& l, const NodeRecord& r) { return l.id < r.id; });
    sort_edges(spec);
    return spec;
}

// Directed preference ring: each r_i may only hear ring routes from r_{i+1},
// ring routes must still carry the "came straight from d" tag, and taking one
// strips the tag. Every configuration leaves someone wanting to switch.
NetworkSpec make_oscillator(int size) {
    if (size != 4) throw UnsupportedSize("oscillator has a fixed size of 4");
    NetworkSpec spec;
    spec.nodes = {node("d", 65000, "bgp"), node("r1", 65001, "bgp"), node("r2", 65002, "bgp"),
                  node("r3", 65003, "bgp")};
    spec.origins["d"] = {slash24(0)};
    Community direct = parse_community("65000:1");

    PolicyClause mark;
    mark.add_community = {direct};
    spec.policies["direct_in"] = {mark};
    PolicyClause take;
    take.match_community = {direct};
    take.delete_community = {direct};
    take.set_local_pref = 200;
    spec.policies["ring_in"] = {take}; // untagged ring routes fall to the implicit deny
    PolicyClause pass;
    pass.match_community = {direct};
    spec.policies["ring_out"] = {pass};
    PolicyClause deny;
    deny.permit = false;
    spec.policies["block"] = {deny};

    const std::string r[3] = {"r1", "r2", "r3"};
    for (int i = 0; i < 3; i++) {
        EdgeRecord to_d = edge(r[i], "d");
        side(to_d, r[i]).import_policy = "direct_in";
        spec.edges.push_back(to_d);
        // r_i listens to r_{i+1}; the reverse direction is shut off entirely
        const std::string& next = r[(i + 1) % 3];
        EdgeRecord ring = edge(r[i], next);
        side(ring, r[i]).import_policy = "ring_in";
        side(ring, r[i]).export_policy = "block";
        side(ring, next).export_policy = "ring_out";
        spec.edges.push_back(ring);
    }
    sort_edges(spec);
    return spec;
}

// a and b point static routes for d's prefix at each other: every stable
// solution forwards traffic in a two-node cycle.
NetworkSpec make_static_loop(int size) {
    if (size != 3) throw UnsupportedSize("static-loop has a fixed size of 3");
    NetworkSpec spec;
    spec.nodes = {node("a", 0, "static"), node("b", 0, "static"), node("d", 0, "static")};
    Prefix p = slash24(0);
    spec.origins["d"] = {p};
    spec.edges = {edge("a", "b"), edge("a", "d"), edge("b", "d")};
    spec.static_routes["a"] = {{p, "b"}};
    spec.static_routes["b"] = {{p, "a"}};
    sort_edges(spec);
    return spec;
}

NetworkSpec make_random(int size, uint64_t seed) {
    if (size < 2 || size > 10) throw UnsupportedSize("random size must be in 2..10");
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
    auto pick = [&](int n) { return (int)(rng() % (uint64_t)n); };

    const char* kProtos[] = {"rip", "ospf", "bgp", "static"};
    std::string proto = kProtos[pick(4)];

    NetworkSpec spec;
    auto name = [](int i) { return "n" + std::to_string(i); };
    for (int i = 0; i < size; i++) spec.nodes.push_back(node(name(i), 65001 + i, proto));

    std::set<std::pair<int, int>> pairs;
    for (int i = 1; i < size; i++) pairs.insert({pick(i), i}); // random spanning tree
    for (int i = 0; i < size; i++)
        for (int j = i + 1; j < size; j++)
            if (pick(10) < 3) pairs.insert({i, j});
    std::vector<std::vector<int>> adj(size);
    for (auto [i, j] : pairs) {
        EdgeRecord e = edge(name(i), name(j));
        if (proto == "ospf") {
            e.ospf_cost = 1 + pick(5);
            e.ospf_area = pick(3) == 0 ? 1 : 0;
        }
        spec.edges.push_back(e);
        adj[i].push_back(j);
        adj[j].push_back(i);
    }

    int dest = pick(size);
    spec.origins[name(dest)] = {slash24(0)};
    if (pick(3) == 0) spec.origins[name(dest)].push_back(slash24(1));

    int next_policy = 0;
    auto fresh_policy = [&](RoutePolicy pol) {
        std::string id = "p" + std::to_string(next_policy++);
        spec.policies[id] = std::move(pol);
        return id;
    };
    Community tags[3] = {parse_community("65001:1"), parse_community("65001:2"),
                         parse_community("65001:3")};
    auto random_clause = [&]() {
        PolicyClause cl;
        switch (pick(6)) {
            case 0: cl.set_local_pref = 100u * (1 + pick(3)); break;
            case 1: cl.add_community = {tags[pick(3)]}; break;
            case 2:
                cl.match_community = {tags[pick(3)]};
                cl.set_local_pref = 100u * (1 + pick(3));
                break;
            case 3:
                cl.match_community = {tags[pick(3)]};
                cl.permit = false;
                break;
            case 4: cl.match_prefix = {slash24(0)}; break;
            default: cl.delete_community = {tags[pick(3)]}; break;
        }
        return cl;
    };

    if (proto == "bgp") {
        for (auto& e : spec.edges) {
            for (std::string end : {e.a, e.b}) {
                if (pick(4) == 0) {
                    RoutePolicy pol = {random_clause()};
                    if (pick(2) == 0) pol.push_back(permit_all());
                    side(e, end).import_policy = fresh_policy(std::move(pol));
                }
                if (pick(6) == 0) {
                    side(e, end).export_policy = fresh_policy({random_clause(), permit_all()});
                }
            }
        }
    }
    if (proto == "static") {
        for (int i = 0; i < size; i++) {
            if (i == dest || adj[i].empty() || pick(3) != 0) continue;
            spec.static_routes[name(i)] = {{slash24(0), name(adj[i][pick((int)adj[i].size())])}};
        }
    }
    if (pick(5) == 0 && !spec.edges.empty()) {
        AclEntry block{slash24(0), false};
        AclEntry rest{Prefix{0, 0}, true};
        spec.acls["acl0"] = {block, rest};
        EdgeRecord& e = spec.edges[pick((int)spec.edges.size())];
        side(e, pick(2) ? e.a : e.b).acl = "acl0";
    }
    sort_edges(spec);
    return spec;
}

} // namespace

NetworkSpec generate_network(const std::string& kind, int size, uint64_t seed) {
    if (kind == "fattree") return make_fattree(size);
    if (kind == "ring") return make_ring(size);
    if (kind == "mesh") return make_mesh(size);
    if (kind == "lp-gadget") return make_lp_gadget(size);
    if (kind == "tag-gadget") return make_tag_gadget(size);
    if (kind == "chain") return make_chain(size);
    if (kind == "oscillator") return make_oscillator(size);
    if (kind == "static-loop") return make_static_loop(size);
    if (kind == "random") return make_random(size, seed);
    throw UnsupportedSize("unknown generator kind: " + kind);
}

std::vector<std::string> generator_kinds() {
    return {"fattree", "ring",       "mesh",        "lp-gadget", "tag-gadget",
            "chain",   "oscillator", "static-loop", "random"};
}

} // namespace cpcomp
