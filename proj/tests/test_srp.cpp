#include "doctest.h"

#include <algorithm>
#include <set>
#include <variant>

#include "cpcomp/errors.hpp"
#include "cpcomp/srp.hpp"
#include "cpcomp/topo_gen.hpp"
#include "helpers.hpp"

using namespace cpcomp;
using namespace cpcomp::testutil;

namespace {

SrpInstance gadget_srp(const char* kind, int size, const char* dest) {
    NetworkSpec net = generate_network(kind, size);
    auto ecs = compute_ecs(net);
    REQUIRE(!ecs.empty());
    SpecializedSpec sp = specialize_spec(net, ecs[0]);
    return srp_at(sp, dest);
}

size_t label_count(const Solution& s) {
    size_t n = 0;
    for (const auto& l : s.labels)
        if (l) ++n;
    return n;
}

} // namespace

TEST_CASE("rip chain reaches a unique fixed point") {
    SpecializedSpec sp = specialize_first(rip_chain3()); // nodes a=0 b=1 d=2
    SrpInstance srp = sp.make_srp(2);

    auto res = simulate_solution(srp);
    REQUIRE(std::holds_alternative<Solution>(res));
    const Solution& sol = std::get<Solution>(res);
    CHECK(sol.labels[2] == OptAttr{RipAttr{0}});
    CHECK(sol.labels[0] == OptAttr{RipAttr{1}});
    CHECK(sol.labels[1] == OptAttr{RipAttr{2}});
    // a forwards to d, b to a, d nowhere
    REQUIRE(sol.fwd[0].size() == 1);
    CHECK(srp.topo.edges[sol.fwd[0][0]].second == 2);
    REQUIRE(sol.fwd[1].size() == 1);
    CHECK(srp.topo.edges[sol.fwd[1][0]].second == 0);
    CHECK(sol.fwd[2].empty());
    CHECK(is_stable(srp, sol.labels));

    // the enumeration agrees and finds nothing else
    auto all = enumerate_solutions(srp);
    REQUIRE(all.size() == 1);
    CHECK(all[0].labels == sol.labels);

    // perturbed labels are rejected
    auto bad = sol.labels;
    bad[1] = RipAttr{7};
    CHECK(!is_stable(srp, bad));

    CHECK(validate_well_formed(srp).empty());
}

TEST_CASE("choices and fwd edges at a rip node") {
    SpecializedSpec sp = specialize_first(rip_chain3());
    SrpInstance srp = sp.make_srp(2);
    auto sol = std::get<Solution>(simulate_solution(srp));

    // a hears 3 hops via b and 1 hop via d; only d is a fwd edge
    auto cs = choices(srp, sol.labels, 0);
    REQUIRE(cs.size() == 2);
    std::set<int> hop_counts;
    for (const auto& [e, attr] : cs) hop_counts.insert(std::get<RipAttr>(attr).hops);
    CHECK(hop_counts == std::set<int>{1, 3});
    auto fe = fwd_edges(srp, sol.labels, 0);
    REQUIRE(fe.size() == 1);
    CHECK(srp.topo.edges[fe[0]].second == 2);

    Solution rebuilt = solution_from_labels(srp, sol.labels);
    CHECK(rebuilt.fwd == sol.fwd);
}

TEST_CASE("incomparable bgp choices: tie-break and enumeration") {
    SrpInstance srp = gadget_srp("lp-gadget", 5, "d");
    // node order a b1 b2 b3 d; a picks among three incomparable routes
    auto low = std::get<Solution>(simulate_solution(srp, TieBreak::LowestNeighborId));
    auto high = std::get<Solution>(simulate_solution(srp, TieBreak::HighestNeighborId));
    REQUIRE(low.labels[0]);
    REQUIRE(high.labels[0]);
    CHECK(std::get<BgpAttr>(*low.labels[0]).as_path[0] == 1);  // via b1
    CHECK(std::get<BgpAttr>(*high.labels[0]).as_path[0] == 3); // via b3

    auto all = enumerate_solutions(srp);
    CHECK(all.size() == 3);
    for (const auto& s : all) {
        CHECK(is_stable(srp, s.labels));
        CHECK(label_count(s) == 5); // everyone routes
    }
    // the two simulations appear among the enumerated solutions
    auto has = [&](const Solution& x) {
        return std::any_of(all.begin(), all.end(),
                           [&](const Solution& s) { return s.labels == x.labels; });
    };
    CHECK(has(low));
    CHECK(has(high));
    // dedup: all label vectors distinct
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i + 1; j < all.size(); ++j) CHECK(all[i].labels != all[j].labels);
}

TEST_CASE("oscillator has no stable solution") {
    SrpInstance srp = gadget_srp("oscillator", 4, "d");
    auto res = simulate_solution(srp);
    REQUIRE(std::holds_alternative<Divergence>(res));
    CHECK(std::get<Divergence>(res).rounds > 0);
    CHECK(enumerate_solutions(srp).empty());
}

TEST_CASE("static domain is spontaneous and loops") {
    SrpInstance srp = gadget_srp("static-loop", 3, "d");
    auto sol = std::get<Solution>(simulate_solution(srp));
    // a and b point at each other; d originates and forwards nowhere
    CHECK(label_count(sol) == 3);
    NodeId a = 0, b = 1;
    REQUIRE(sol.fwd[a].size() == 1);
    CHECK(srp.topo.edges[sol.fwd[a][0]].second == b);
    REQUIRE(sol.fwd[b].size() == 1);
    CHECK(srp.topo.edges[sol.fwd[b][0]].second == a);
    CHECK(validate_well_formed(srp).empty()); // spontaneity is legal for static
}

TEST_CASE("enumeration refuses oversized instances") {
    NetworkSpec net = generate_network("ring", 24);
    auto ecs = compute_ecs(net);
    SpecializedSpec sp = specialize_spec(net, ecs[0]);
    SrpInstance srp = srp_at(sp, ecs[0].dest_nodes[0]);
    CHECK_THROWS_AS(enumerate_solutions(srp), InstanceTooLarge);
}

TEST_CASE("ring antipode splits the solution set in two") {
    NetworkSpec net = generate_network("ring", 12);
    auto ecs = compute_ecs(net);
    SpecializedSpec sp = specialize_spec(net, ecs[0]);
    SrpInstance srp = srp_at(sp, ecs[0].dest_nodes[0]);
    // the node opposite the destination holds two incomparable shortest
    // paths; everyone else has a strictly shorter side
    auto all = enumerate_solutions(srp, 12);
    CHECK(all.size() == 2);
    for (const auto& s : all) CHECK(s.fwd[6].size() == 2); // both ways tied
}

TEST_CASE("well-formedness flags broken instances") {
    SrpInstance bad;
    bad.topo.num_nodes = 2;
    bad.topo.dest = 1;
    bad.topo.edges = {{0, 0}, {0, 1}};
    bad.topo.build_adjacency();
    bad.attr_domain = "rip";
    bad.init_attr = RipAttr{0};
    bad.compare = [](const Attribute& x, const Attribute& y) { return compare_attrs(x, y); };
    // spontaneous in a non-static domain
    bad.transfer = [](EdgeIdx, const OptAttr&) -> OptAttr { return RipAttr{1}; };

    auto viol = validate_well_formed(bad);
    REQUIRE(viol.size() >= 2);
    bool self_loop = false, spont = false;
    for (const auto& v : viol) {
        if (v.find("self-loop") != std::string::npos) self_loop = true;
        if (v.find("spontaneous") != std::string::npos) spont = true;
    }
    CHECK(self_loop);
    CHECK(spont);
}

TEST_CASE("candidate attrs cover the reachable label values") {
    SpecializedSpec sp = specialize_first(rip_chain3());
    SrpInstance srp = sp.make_srp(2);
    auto cands = candidate_attrs(srp);
    REQUIRE(cands.size() == 3);
    CHECK(std::find(cands[0].begin(), cands[0].end(), Attribute{RipAttr{1}}) != cands[0].end());
    CHECK(std::find(cands[1].begin(), cands[1].end(), Attribute{RipAttr{2}}) != cands[1].end());
}
