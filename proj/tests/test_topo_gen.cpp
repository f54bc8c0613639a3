#include "doctest.h"

#include <algorithm>
#include <queue>
#include <set>

#include "cpcomp/dest_ecs.hpp"
#include "cpcomp/errors.hpp"
#include "cpcomp/topo_gen.hpp"

using namespace cpcomp;

namespace {

bool connected(const NetworkSpec& spec) {
    if (spec.nodes.empty()) return true;
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& e : spec.edges) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    std::set<std::string> seen{spec.nodes[0].id};
    std::queue<std::string> q;
    q.push(spec.nodes[0].id);
    while (!q.empty()) {
        auto x = q.front();
        q.pop();
        for (const auto& y : adj[x])
            if (seen.insert(y).second) q.push(y);
    }
    return seen.size() == spec.nodes.size();
}

} // namespace

TEST_CASE("generator catalog") {
    auto kinds = generator_kinds();
    CHECK(kinds.size() == 9);
    for (const char* k : {"fattree", "ring", "mesh", "lp-gadget", "tag-gadget", "chain",
                          "oscillator", "static-loop", "random"})
        CHECK(std::find(kinds.begin(), kinds.end(), k) != kinds.end());
    CHECK_THROWS_AS(generate_network("torus", 9), UnsupportedSize);
}

TEST_CASE("fattree size arithmetic") {
    // t=3: 9 cores, 6 pods of 3+3, 54 tor-agg + 162 agg-core links, and the
    // 1..11 core offsets close the 9-core ring into a complete graph (36)
    NetworkSpec net = generate_network("fattree", 45);
    CHECK(net.nodes.size() == 45);
    CHECK(net.edges.size() == 252);
    CHECK(net.origins.size() == 18); // one rack prefix per ToR
    CHECK(connected(net));
    // every ToR exports only its own block
    int tors = 0;
    for (const auto& n : net.nodes)
        if (n.id[0] == 't') {
            ++tors;
            CHECK(net.origins.count(n.id));
        }
    CHECK(tors == 18);
    // distinct ASNs
    std::set<int64_t> asns;
    for (const auto& n : net.nodes) asns.insert(n.asn);
    CHECK(asns.size() == net.nodes.size());

    CHECK(generate_network("fattree", 180).edges.size() == 2124);
    CHECK_THROWS_AS(generate_network("fattree", 20), UnsupportedSize);  // t=2 too small
    CHECK_THROWS_AS(generate_network("fattree", 100), UnsupportedSize); // not 5t^2
}

TEST_CASE("ring and mesh shapes") {
    NetworkSpec ring = generate_network("ring", 100);
    CHECK(ring.nodes.size() == 100);
    CHECK(ring.edges.size() == 100);
    CHECK(ring.origins.size() == 100);
    CHECK(connected(ring));
    CHECK_THROWS_AS(generate_network("ring", 5), UnsupportedSize); // odd
    CHECK_THROWS_AS(generate_network("ring", 2), UnsupportedSize);

    NetworkSpec mesh = generate_network("mesh", 10);
    CHECK(mesh.nodes.size() == 10);
    CHECK(mesh.edges.size() == 45);
    CHECK_THROWS_AS(generate_network("mesh", 2), UnsupportedSize);
}

TEST_CASE("gadget shapes are fixed") {
    NetworkSpec lp = generate_network("lp-gadget", 5);
    CHECK(lp.nodes.size() == 5);
    CHECK(lp.edges.size() == 6);
    CHECK(lp.policies.count("lp200"));
    CHECK_THROWS_AS(generate_network("lp-gadget", 6), UnsupportedSize);

    NetworkSpec tg = generate_network("tag-gadget", 4);
    CHECK(tg.nodes.size() == 4);
    CHECK(tg.edges.size() == 4);

    NetworkSpec osc = generate_network("oscillator", 4);
    CHECK(osc.nodes.size() == 4);
    CHECK(osc.edges.size() == 6);

    NetworkSpec sl = generate_network("static-loop", 3);
    CHECK(sl.nodes.size() == 3);
    CHECK(sl.edges.size() == 3);
    CHECK(sl.static_routes.size() == 2);

    // chain k: k border nodes, k-1 reflectors, k^2 links
    for (int k : {2, 3, 4}) {
        NetworkSpec ch = generate_network("chain", k);
        CHECK((int)ch.nodes.size() == 2 * k);
        CHECK((int)ch.edges.size() == k * k);
        CHECK((int)compute_ecs(ch).size() == 1);
    }
    CHECK_THROWS_AS(generate_network("chain", 5), UnsupportedSize);
}

TEST_CASE("random instances are deterministic per seed") {
    for (uint64_t seed : {1ull, 7ull, 42ull}) {
        NetworkSpec a = generate_network("random", 6, seed);
        NetworkSpec b = generate_network("random", 6, seed);
        CHECK(emit_network_spec(a) == emit_network_spec(b));
        CHECK(connected(a));
        CHECK(!compute_ecs(a).empty());
        // single protocol across the instance
        std::set<std::string> protos;
        for (const auto& n : a.nodes) protos.insert(n.protocols.at(0));
        CHECK(protos.size() == 1);
    }
    CHECK(emit_network_spec(generate_network("random", 6, 1)) !=
          emit_network_spec(generate_network("random", 6, 2)));
    CHECK_THROWS_AS(generate_network("random", 1), UnsupportedSize);
    CHECK_THROWS_AS(generate_network("random", 11), UnsupportedSize);
}

TEST_CASE("generated documents parse back") {
    for (const auto& kind : generator_kinds()) {
        int size = kind == "fattree"     ? 45
                   : kind == "ring"      ? 6
                   : kind == "mesh"      ? 4
                   : kind == "lp-gadget" ? 5
                   : kind == "chain"     ? 3
                   : kind == "tag-gadget" || kind == "oscillator" ? 4
                   : kind == "static-loop"                        ? 3
                                                                  : 8;
        NetworkSpec net = generate_network(kind, size, 3);
        std::string text = emit_network_spec(net);
        NetworkSpec back = parse_network_spec(text);
        CHECK(emit_network_spec(back) == text);
    }
}
