#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

#include "cpcomp/compress.hpp"
#include "cpcomp/errors.hpp"
#include "cpcomp/topo_gen.hpp"

using namespace cpcomp;
using namespace cpcomp::testutil;

namespace {

NodeId nid(const SpecializedSpec& sp, const std::string& name) {
    for (NodeId u = 0; u < (NodeId)sp.node_names.size(); ++u)
        if (sp.node_names[u] == name) return u;
    REQUIRE(false);
    return -1;
}

struct Diamond {
    // the local-pref diamond: a - {b1,b2,b3} - d, b's import from a at lp 200
    NetworkSpec net;
    SpecializedSpec sp;
    CompressContext ctx;
    Diamond() : net(generate_network("lp-gadget", 5)) {
        auto ecs = compute_ecs(net);
        REQUIRE(ecs.size() == 1);
        sp = specialize_spec(net, ecs[0]);
        ctx = make_compress_context(sp);
    }
};

} // namespace

TEST_CASE("partition starts as a single block") {
    Partition p(6);
    CHECK(p.num_blocks() == 1);
    CHECK(p.generation() == 0);
    CHECK(p.block_ids() == std::vector<BlockId>{0});
    CHECK(p.members(0) == std::vector<NodeId>{0, 1, 2, 3, 4, 5});
    for (NodeId u = 0; u < 6; ++u) CHECK(p.block_of(u) == 0);
}

TEST_CASE("split keeps the id on the largest group") {
    Partition p(6);
    auto fresh = p.split(0, {{0}, {1, 2, 3, 4, 5}});
    CHECK(fresh == std::vector<BlockId>{1});
    CHECK(p.block_of(0) == 1);
    CHECK(p.block_of(3) == 0);
    CHECK(p.members(0).size() == 5);
    CHECK(p.members(1) == std::vector<NodeId>{0});
    CHECK(p.generation() == 1);
}

TEST_CASE("split ties go to the group holding the smallest node") {
    Partition p(4);
    auto fresh = p.split(0, {{1, 3}, {0, 2}});
    CHECK(fresh == std::vector<BlockId>{1});
    CHECK(p.block_of(0) == 0);
    CHECK(p.block_of(2) == 0);
    CHECK(p.members(1) == std::vector<NodeId>{1, 3});
}

TEST_CASE("split hands out fresh ids in group order") {
    Partition p(6);
    auto fresh = p.split(0, {{3}, {0, 1, 2}, {4}, {5}});
    CHECK(fresh == std::vector<BlockId>{1, 2, 3});
    CHECK(p.members(0) == std::vector<NodeId>{0, 1, 2});
    CHECK(p.members(1) == std::vector<NodeId>{3});
    CHECK(p.members(2) == std::vector<NodeId>{4});
    CHECK(p.members(3) == std::vector<NodeId>{5});
    CHECK(p.num_blocks() == 4);
}

TEST_CASE("split with a single group is a no-op") {
    Partition p(4);
    CHECK(p.split(0, {{0, 1, 2, 3}}).empty());
    CHECK(p.num_blocks() == 1);
    CHECK(p.generation() == 0);
}

TEST_CASE("isolate carves a subset out of a block") {
    Partition p(5);
    CHECK(p.isolate(0, {}) == 0);                // empty: no-op
    CHECK(p.isolate(0, {0, 1, 2, 3, 4}) == 0);   // everything: no-op
    CHECK(p.num_blocks() == 1);

    BlockId d = p.isolate(0, {4});
    CHECK(d == 1);
    CHECK(p.members(d) == std::vector<NodeId>{4});
    CHECK(p.members(0) == std::vector<NodeId>{0, 1, 2, 3});

    // the subset may keep the original id when it wins the split tie-break
    BlockId e = p.isolate(0, {0, 1});
    CHECK(e == 0);
    CHECK(p.members(0) == std::vector<NodeId>{0, 1});
    CHECK(p.members(2) == std::vector<NodeId>{2, 3});
}

TEST_CASE("edge signatures compare by content") {
    Diamond fx;
    const Topology& t = fx.sp.topo;
    NodeId a = nid(fx.sp, "a"), b1 = nid(fx.sp, "b1"), b2 = nid(fx.sp, "b2"),
           d = nid(fx.sp, "d");

    // all three b->a imports run the same lp200 program
    CHECK(fx.ctx.esig[t.edge_index(b1, a)] == fx.ctx.esig[t.edge_index(b2, a)]);
    // direct b->d edges carry no policy and agree with each other
    CHECK(fx.ctx.esig[t.edge_index(b1, d)] == fx.ctx.esig[t.edge_index(b2, d)]);
    // ... but differ from the policied edge
    CHECK(fx.ctx.esig[t.edge_index(b1, a)] != fx.ctx.esig[t.edge_index(b1, d)]);

    // two policies with equal content but different names get the same signature
    NetworkSpec net2 = fx.net;
    net2.policies["alt"] = net2.policies.at("lp200");
    for (EdgeRecord& e : net2.edges)
        if (e.a == "a" && e.b == "b2") e.if_ba.import_policy = "alt";
    auto ecs2 = compute_ecs(net2);
    REQUIRE(ecs2.size() == 1);
    SpecializedSpec sp2 = specialize_spec(net2, ecs2[0]);
    CompressContext ctx2 = make_compress_context(sp2);
    CHECK(ctx2.esig[sp2.topo.edge_index(b1, a)] == ctx2.esig[sp2.topo.edge_index(b2, a)]);
}

TEST_CASE("block preference sets") {
    Diamond fx;
    CHECK(block_prefs(fx.sp, {1, 2, 3}) == std::set<uint32_t>{100, 200});
    CHECK(block_prefs(fx.sp, {0}) == std::set<uint32_t>{100});
    CHECK(block_prefs(fx.sp, {4}) == std::set<uint32_t>{100});
}

TEST_CASE("refine splits by interface signature") {
    Diamond fx;
    Partition p(5);
    BlockId db = p.isolate(0, {nid(fx.sp, "d")});
    CHECK(db == 1);

    // a peels off {b1,b2,b3}: only the b's have an edge into the dest block
    CHECK(refine(fx.ctx, p, 0) == 1);
    CHECK(p.block_of(1) == 0);
    CHECK(p.block_of(2) == 0);
    CHECK(p.block_of(3) == 0);
    CHECK(p.block_of(0) == 2);

    // fixpoint: nothing left to split
    CHECK(refine(fx.ctx, p, 0) == 0);
    CHECK(refine(fx.ctx, p, 1) == 0);
    CHECK(refine(fx.ctx, p, 2) == 0);
}

TEST_CASE("find_abstraction on the local-pref diamond") {
    Diamond fx;
    NodeId d = nid(fx.sp, "d");
    AbstractionMap m = find_abstraction(fx.ctx, d);

    CHECK(m.dest == d);
    CHECK(m.partition.num_blocks() == 3);
    CHECK(m.dest_block == m.partition.block_of(d));
    CHECK(m.partition.members(m.dest_block) == std::vector<NodeId>{d});
    CHECK(m.refine_iterations == 2);

    BlockId bb = m.partition.block_of(nid(fx.sp, "b1"));
    CHECK(m.partition.block_of(nid(fx.sp, "b2")) == bb);
    CHECK(m.partition.block_of(nid(fx.sp, "b3")) == bb);
    CHECK(m.partition.block_of(nid(fx.sp, "a")) != bb);

    CHECK(m.mode == AbstractionMode::ForallForall);
    REQUIRE(m.copies.size() == 1);
    CHECK(m.copies.begin()->first == bb);
    CHECK(m.copies.begin()->second == 2);
    CHECK(m.num_abstract_nodes() == 4);

    CHECK(m.h.kind == AttrAbstraction::Kind::BgpPathRename);
    CHECK(m.h.unused_tags.empty());
    CHECK(m.h.node_map.size() == 5);
    CHECK(m.h.node_map.at(nid(fx.sp, "b3")) == bb);
    CHECK(m.h.node_map.at(d) == m.dest_block);

    Certificates certs = check_bgp_effective(fx.ctx, m);
    CHECK(certs.ok());
    auto has = [&](const std::string& name) {
        return std::count(certs.passed.begin(), certs.passed.end(), name) == 1;
    };
    CHECK(has("dest-singleton"));
    CHECK(has("trans-equivalence"));
    CHECK(has("forall-exists"));
    CHECK(has("forall-forall"));
    CHECK(has("rank-equivalence"));
    CHECK(has("case-split"));
}

TEST_CASE("dropping the preference case split is caught") {
    Diamond fx;
    AbstractionMap naive = find_abstraction(fx.ctx, nid(fx.sp, "d"));
    naive.copies.clear();
    Certificates certs = check_bgp_effective(fx.ctx, naive);
    CHECK(!certs.ok());
    bool case_split = false;
    for (const Violation& v : certs.violations) case_split |= v.check == "case-split";
    CHECK(case_split);
}

TEST_CASE("abstract network of the diamond") {
    Diamond fx;
    AbstractionMap m = find_abstraction(fx.ctx, nid(fx.sp, "d"));
    AbstractNetwork abs = build_abstract_network(fx.net, fx.ctx, m);

    CHECK(abs.abstract_node_names ==
          std::vector<std::string>{"a", "b1#1", "b1#2", "d"});
    CHECK(abs.f == std::map<std::string, std::string>{
                       {"a", "a"}, {"b1", "b1#1"}, {"b2", "b1#1"}, {"b3", "b1#1"}, {"d", "d"}});
    CHECK(abs.copy_groups ==
          std::map<std::string, std::vector<std::string>>{{"b1#1", {"b1#1", "b1#2"}}});
    CHECK(abs.dest == "d");
    CHECK(format_prefix(abs.ec_prefix) == "10.0.0.0/24");
    CHECK(abs.concrete_nodes == 5);
    CHECK(abs.concrete_edges == 6);
    CHECK(abs.abstract_nodes == 4);
    CHECK(abs.abstract_edges == 4);
    CHECK(abs.certificates.ok());

    // one policy for both copy edges: content-deduplicated
    REQUIRE(abs.spec.policies.size() == 1);
    const RoutePolicy& pol = abs.spec.policies.begin()->second;
    REQUIRE(pol.size() == 1);
    CHECK(pol[0].permit);
    CHECK(pol[0].set_local_pref == 200u);

    // copies share the base node's ASN and the document round-trips
    int i = abs.spec.node_index("b1#2");
    REQUIRE(i >= 0);
    CHECK(abs.spec.nodes[i].asn == 65002);
    std::string text = emit_network_spec(abs.spec);
    CHECK(emit_network_spec(parse_network_spec(text)) == text);

    // the emitted document is a well-formed single-class network
    auto ecs = compute_ecs(abs.spec);
    REQUIRE(ecs.size() == 1);
    CHECK(ecs[0].dest_nodes == std::vector<std::string>{"d"});
    SpecializedSpec abs_sp = specialize_spec(abs.spec, ecs[0]);
    CHECK(abs_sp.lp_values == std::set<uint32_t>{100, 200});
}

TEST_CASE("ring compresses to a path and recompresses to itself") {
    NetworkSpec net = generate_network("ring", 10);
    auto ecs = compute_ecs(net);
    REQUIRE(ecs.size() == 10);
    SpecializedSpec sp = specialize_spec(net, ecs[0]);
    CompressContext ctx = make_compress_context(sp);
    NodeId dest = nid(sp, ecs[0].dest_nodes.at(0));

    AbstractionMap m = find_abstraction(ctx, dest);
    CHECK(m.partition.num_blocks() == 6);
    CHECK(m.copies.empty());
    CHECK(m.mode == AbstractionMode::ForallExists);
    CHECK(check_bgp_effective(ctx, m).ok());

    AbstractNetwork abs = build_abstract_network(net, ctx, m);
    CHECK(abs.abstract_nodes == 6);
    CHECK(abs.abstract_edges == 5);
    CHECK(abs.concrete_nodes == 10);
    CHECK(abs.concrete_edges == 10);

    // the exact antipode node keeps both of its shortest-path edges
    // (blocks: dest, four distance pairs, one antipode singleton)
    std::set<size_t> sizes;
    for (BlockId b : m.partition.block_ids()) sizes.insert(m.partition.members(b).size());
    CHECK(sizes == std::set<size_t>{1, 2});

    // a path is already as small as it gets: recompression is the identity
    auto ecs2 = compute_ecs(abs.spec);
    REQUIRE(ecs2.size() == 1);
    SpecializedSpec sp2 = specialize_spec(abs.spec, ecs2[0]);
    CompressContext ctx2 = make_compress_context(sp2);
    AbstractionMap m2 = find_abstraction(ctx2, nid(sp2, abs.f.at(ecs[0].dest_nodes.at(0))));
    AbstractNetwork abs2 = build_abstract_network(abs.spec, ctx2, m2);
    CHECK(abs2.abstract_nodes == 6);
    CHECK(abs2.abstract_edges == 5);
    CHECK(emit_network_spec(abs2.spec) == emit_network_spec(abs.spec));
}

TEST_CASE("mutual static routes block the merge") {
    NetworkSpec net = generate_network("static-loop", 3);
    auto ecs = compute_ecs(net);
    REQUIRE(ecs.size() == 1);
    SpecializedSpec sp = specialize_spec(net, ecs[0]);
    CompressContext ctx = make_compress_context(sp);

    AbstractionMap m = find_abstraction(ctx, nid(sp, "d"));
    CHECK(m.partition.num_blocks() == 3); // a and b may not share a block
    CHECK(m.copies.empty());
    CHECK(m.mode == AbstractionMode::ForallExists);
    CHECK(m.h.kind == AttrAbstraction::Kind::Identity);
    CHECK(check_effective(ctx, m).ok());

    AbstractNetwork abs = build_abstract_network(net, ctx, m);
    CHECK(abs.abstract_nodes == 3);
    CHECK(abs.abstract_edges == 3);
    // static routes survive into the abstract document
    CHECK(abs.spec.static_routes.size() == 2);
}

TEST_CASE("mapping sidecar round-trips") {
    Diamond fx;
    AbstractionMap m = find_abstraction(fx.ctx, nid(fx.sp, "d"));
    AbstractNetwork abs = build_abstract_network(fx.net, fx.ctx, m);

    std::string text = emit_mapping_sidecar(abs);
    MappingSidecar ms = parse_mapping_sidecar(text);
    CHECK(ms.abstract_nodes == abs.abstract_node_names);
    CHECK(ms.f == abs.f);
    CHECK(ms.copy_groups == abs.copy_groups);
    CHECK(ms.h_kind == abs.h.kind);
    CHECK(ms.unused_tags == abs.h.unused_tags);
    CHECK(ms.dest == abs.dest);
    CHECK(format_prefix(ms.ec_prefix) == format_prefix(abs.ec_prefix));

    SUBCASE("wrong version is rejected") {
        std::string bad = text;
        bad.replace(bad.find("bonsai-net/1"), 12, "bonsai-net/9");
        CHECK_THROWS_AS(parse_mapping_sidecar(bad), ParseError);
    }
    SUBCASE("a sidecar without certificates is rejected") {
        std::string bad = text;
        bad.replace(bad.find("\"certificates\""), 14, "\"cert_records\"");
        CHECK_THROWS_AS(parse_mapping_sidecar(bad), CertificateMissing);
    }
    SUBCASE("garbage is a parse error") {
        CHECK_THROWS_AS(parse_mapping_sidecar("{]"), ParseError);
    }
}

TEST_CASE("unused tags are dropped by the attribute abstraction") {
    // b - a - d, a marks routes from d with a community nobody ever matches
    NetworkSpec net;
    net.nodes = {tnode("a", 65001, "bgp"), tnode("b", 65002, "bgp"), tnode("d", 65003, "bgp")};
    PolicyClause mark;
    mark.add_community = {parse_community("65000:9")};
    net.policies["mark"] = {mark};
    EdgeRecord ad = tedge("a", "d");
    ad.if_ab.import_policy = "mark";
    net.edges = {tedge("a", "b"), ad};
    net.origins["d"] = {parse_prefix("10.0.0.0/24")};
    finish(net);

    SpecializedSpec sp = specialize_first(net);
    CHECK(sp.unused_communities() == std::set<Community>{parse_community("65000:9")});
    CompressContext ctx = make_compress_context(sp);
    AbstractionMap m = find_abstraction(ctx, nid(sp, "d"));
    CHECK(m.h.kind == AttrAbstraction::Kind::BgpDropUnusedTags);
    CHECK(m.h.unused_tags == std::set<Community>{parse_community("65000:9")});

    // the dead tag is scrubbed from the abstract document's policies
    AbstractNetwork abs = build_abstract_network(net, ctx, m);
    for (const auto& [id, pol] : abs.spec.policies)
        for (const PolicyClause& cl : pol) CHECK(cl.add_community.empty());

    MappingSidecar ms = parse_mapping_sidecar(emit_mapping_sidecar(abs));
    CHECK(ms.h_kind == AttrAbstraction::Kind::BgpDropUnusedTags);
    CHECK(ms.unused_tags == std::set<Community>{parse_community("65000:9")});
}
