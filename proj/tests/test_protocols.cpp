#include "doctest.h"

#include <vector>

#include "cpcomp/attribute.hpp"
#include "cpcomp/errors.hpp"
#include "cpcomp/protocols.hpp"

using namespace cpcomp;

namespace {

Community tag(int n) { return parse_community("65001:" + std::to_string(n)); }

SpecClause clause(std::vector<Community> match, bool permit) {
    SpecClause c;
    c.match_community = std::move(match);
    c.permit = permit;
    return c;
}

} // namespace

TEST_CASE("attribute partial orders") {
    // rip: fewer hops wins, equal is tied
    CHECK(compare_attrs(RipAttr{2}, RipAttr{5}) == Ordering::Less);
    CHECK(compare_attrs(RipAttr{5}, RipAttr{2}) == Ordering::Greater);
    CHECK(compare_attrs(RipAttr{3}, RipAttr{3}) == Ordering::Incomparable);
    CHECK(attrs_tied(RipAttr{3}, RipAttr{3}));

    // ospf: intra-area beats inter-area before cost is even looked at
    CHECK(compare_attrs(OspfAttr{9, false}, OspfAttr{2, true}) == Ordering::Less);
    CHECK(compare_attrs(OspfAttr{2, true}, OspfAttr{9, false}) == Ordering::Greater);
    CHECK(compare_attrs(OspfAttr{2, false}, OspfAttr{3, false}) == Ordering::Less);
    CHECK(compare_attrs(OspfAttr{4, true}, OspfAttr{4, true}) == Ordering::Incomparable);

    // bgp: local-pref descending, then path length; contents never decide
    BgpAttr hi;
    hi.local_pref = 200;
    BgpAttr lo;
    lo.local_pref = 100;
    lo.as_path = {1};
    CHECK(compare_attrs(hi, lo) == Ordering::Less);
    CHECK(compare_attrs(lo, hi) == Ordering::Greater);
    BgpAttr short_path, long_path;
    short_path.as_path = {1};
    long_path.as_path = {2, 3};
    CHECK(compare_attrs(short_path, long_path) == Ordering::Less);
    BgpAttr p13, p2;
    p13.as_path = {1, 3};
    p2.as_path = {2, 4};
    CHECK(compare_attrs(p13, p2) == Ordering::Incomparable);

    // static: the empty order
    CHECK(compare_attrs(StaticAttr{}, StaticAttr{}) == Ordering::Incomparable);
    CHECK(attrs_tied(StaticAttr{}, StaticAttr{}));
}

TEST_CASE("community helpers keep the list sorted and unique") {
    BgpAttr a;
    bgp_add_community(a, tag(3));
    bgp_add_community(a, tag(1));
    bgp_add_community(a, tag(3));
    CHECK(a.communities == std::vector<Community>{tag(1), tag(3)});
    CHECK(bgp_has_community(a, tag(1)));
    CHECK(!bgp_has_community(a, tag(2)));
    bgp_delete_community(a, tag(1));
    bgp_delete_community(a, tag(2)); // deleting an absent tag is a no-op
    CHECK(a.communities == std::vector<Community>{tag(3)});
}

TEST_CASE("rip transfer adds a hop and drops at the horizon") {
    EdgeProgram open;
    CHECK(rip_transfer(open, RipAttr{0}) == OptAttr{RipAttr{1}});
    CHECK(rip_transfer(open, RipAttr{14}) == OptAttr{RipAttr{15}});
    CHECK(rip_transfer(open, RipAttr{15}) == OptAttr{});
    CHECK(rip_transfer(open, std::nullopt) == OptAttr{});
    EdgeProgram filtered;
    filtered.acl_deny = true;
    CHECK(rip_transfer(filtered, RipAttr{0}) == OptAttr{});
}

TEST_CASE("ospf transfer accumulates cost and latches the area flip") {
    EdgeProgram e;
    e.ospf_cost = 4;
    CHECK(ospf_transfer(e, false, OspfAttr{2, false}) == OptAttr{OspfAttr{6, false}});
    CHECK(ospf_transfer(e, true, OspfAttr{2, false}) == OptAttr{OspfAttr{6, true}});
    // once inter-area, always inter-area
    CHECK(ospf_transfer(e, false, OspfAttr{2, true}) == OptAttr{OspfAttr{6, true}});
    CHECK(ospf_transfer(e, false, std::nullopt) == OptAttr{});
}

TEST_CASE("static transfer is spontaneous") {
    EdgeProgram none;
    CHECK(static_transfer(none, std::nullopt) == OptAttr{});
    EdgeProgram configured;
    configured.static_present = true;
    CHECK(static_transfer(configured, std::nullopt) == OptAttr{StaticAttr{}});
    CHECK(static_transfer(configured, StaticAttr{}) == OptAttr{StaticAttr{}});
    configured.acl_deny = true;
    CHECK(static_transfer(configured, std::nullopt) == OptAttr{});
}

TEST_CASE("clause stage: first match wins, implicit deny, AND-match") {
    BgpState in;
    in.communities = {tag(1), tag(2)};

    // absent stage permits unchanged
    auto out = eval_clause_stage({}, false, in);
    REQUIRE(out);
    CHECK(out->communities == in.communities);

    // present but empty stage denies everything
    CHECK(!eval_clause_stage({}, true, in));

    // AND semantics: both tags must be present
    CHECK(eval_clause_stage({clause({tag(1), tag(2)}, true)}, true, in));
    CHECK(!eval_clause_stage({clause({tag(1), tag(3)}, true)}, true, in));

    // first matching clause terminates the scan
    SpecClause deny1 = clause({tag(1)}, false);
    SpecClause all = clause({}, true);
    all.set_local_pref = 300;
    CHECK(!eval_clause_stage({deny1, all}, true, in));
    BgpState other;
    other.communities = {tag(2)};
    auto lifted = eval_clause_stage({deny1, all}, true, other);
    REQUIRE(lifted);
    CHECK(lifted->local_pref == 300);

    // no clause matched: implicit trailing deny
    CHECK(!eval_clause_stage({clause({tag(3)}, true)}, true, in));
}

TEST_CASE("clause stage: deletes run before adds") {
    SpecClause cl = clause({}, true);
    cl.delete_community = {tag(1)};
    cl.add_community = {tag(1)};
    BgpState in;
    in.communities = {tag(1)};
    auto out = eval_clause_stage({cl}, true, in);
    REQUIRE(out);
    CHECK(out->communities == std::vector<Community>{tag(1)}); // survives a delete+add

    SpecClause swap = clause({}, true);
    swap.delete_community = {tag(1)};
    swap.add_community = {tag(2)};
    auto swapped = eval_clause_stage({swap}, true, in);
    REQUIRE(swapped);
    CHECK(swapped->communities == std::vector<Community>{tag(2)});
}

TEST_CASE("bgp transfer runs export, prepends the sender, then import") {
    // edge (u=0, v=1): v exports tag 9, u's import requires it and lifts pref
    EdgeProgram prog;
    SpecClause exp = clause({}, true);
    exp.add_community = {tag(9)};
    prog.export_clauses = {exp};
    prog.export_present = true;
    SpecClause imp = clause({tag(9)}, true);
    imp.set_local_pref = 250;
    prog.import_clauses = {imp};
    prog.import_present = true;

    BgpAttr in;
    in.as_path = {5};
    OptAttr out = bgp_transfer(0, 1, prog, in);
    REQUIRE(out);
    const BgpAttr& got = std::get<BgpAttr>(*out);
    CHECK(got.local_pref == 250);
    CHECK(got.communities == std::vector<Community>{tag(9)});
    CHECK(got.as_path == std::vector<NodeId>{1, 5}); // sender first

    // without the export stage the import's match fails -> deny
    EdgeProgram bare;
    bare.import_clauses = {imp};
    bare.import_present = true;
    CHECK(bgp_transfer(0, 1, bare, in) == OptAttr{});

    // receiver loop check: u already on the path
    BgpAttr loopy;
    loopy.as_path = {0, 5};
    CHECK(bgp_transfer(0, 1, prog, loopy) == OptAttr{});

    // acl wins over everything
    EdgeProgram filtered = prog;
    filtered.acl_deny = true;
    CHECK(bgp_transfer(0, 1, filtered, in) == OptAttr{});
}

TEST_CASE("attribute abstraction h") {
    BgpAttr a;
    a.local_pref = 200;
    a.communities = {tag(1), tag(7)};
    a.as_path = {2, 0};

    AttrAbstraction ident;
    CHECK(apply_h(ident, a) == OptAttr{a});
    CHECK(apply_h(ident, std::nullopt) == OptAttr{});

    AttrAbstraction ren;
    ren.kind = AttrAbstraction::Kind::BgpPathRename;
    ren.node_map = {{0, 0}, {2, 1}};
    OptAttr renamed = apply_h(ren, a);
    REQUIRE(renamed);
    CHECK(std::get<BgpAttr>(*renamed).as_path == std::vector<NodeId>{1, 0});
    CHECK(std::get<BgpAttr>(*renamed).communities == a.communities);

    AttrAbstraction gap;
    gap.kind = AttrAbstraction::Kind::BgpPathRename;
    gap.node_map = {{0, 0}};
    CHECK_THROWS_AS(apply_h(gap, a), UnmappedNode);

    AttrAbstraction drop;
    drop.kind = AttrAbstraction::Kind::BgpDropUnusedTags;
    drop.node_map = {{0, 0}, {2, 1}};
    drop.unused_tags = {tag(7)};
    OptAttr dropped = apply_h(drop, a);
    REQUIRE(dropped);
    CHECK(std::get<BgpAttr>(*dropped).communities == std::vector<Community>{tag(1)});

    // h is the identity on non-bgp domains
    AttrAbstraction ren2 = ren;
    CHECK(apply_h(ren2, RipAttr{3}) == OptAttr{RipAttr{3}});
}

TEST_CASE("format_attr names path nodes") {
    std::vector<std::string> names = {"a", "b", "d"};
    CHECK(format_attr(std::nullopt, names) == "none");
    BgpAttr a;
    a.as_path = {2, 1};
    std::string s = format_attr(OptAttr{a}, names);
    CHECK(s.find("d") != std::string::npos);
    CHECK(s.find("b") != std::string::npos);
    CHECK(format_attr(OptAttr{RipAttr{4}}, names).find("4") != std::string::npos);
}
