#include "doctest.h"

#include <algorithm>
#include <vector>

#include "cpcomp/errors.hpp"
#include "cpcomp/net.hpp"

using namespace cpcomp;

TEST_CASE("prefix parse and format round-trip") {
    Prefix p = parse_prefix("10.0.0.0/24");
    CHECK(p.addr == 0x0a000000u);
    CHECK(p.len == 24);
    CHECK(format_prefix(p) == "10.0.0.0/24");

    CHECK(parse_prefix("0.0.0.0/0") == Prefix{0, 0});
    CHECK(parse_prefix("255.255.255.255/32") == Prefix{0xffffffffu, 32});
    for (const char* s : {"192.168.3.0/24", "172.16.0.0/12", "8.8.8.8/32", "128.0.0.0/1"})
        CHECK(format_prefix(parse_prefix(s)) == s);
}

TEST_CASE("prefix parse rejects malformed input") {
    CHECK_THROWS_AS(parse_prefix("10.0.0.0"), ParseError);
    CHECK_THROWS_AS(parse_prefix("10.0.0.0/33"), ParseError);
    CHECK_THROWS_AS(parse_prefix("10.0.0.0/-1"), ParseError);
    CHECK_THROWS_AS(parse_prefix("300.0.0.0/8"), ParseError);
    CHECK_THROWS_AS(parse_prefix("10.0.0.1/24"), ParseError); // host bits set
    CHECK_THROWS_AS(parse_prefix("10.0.0.0/24x"), ParseError);
    CHECK_THROWS_AS(parse_prefix("banana"), ParseError);
    CHECK_THROWS_AS(parse_prefix(""), ParseError);
}

TEST_CASE("prefix mask and containment") {
    CHECK(Prefix{0, 0}.mask() == 0u);
    CHECK(parse_prefix("10.0.0.0/24").mask() == 0xffffff00u);
    CHECK(parse_prefix("1.2.3.4/32").mask() == 0xffffffffu);

    Prefix p24 = parse_prefix("10.0.0.0/24");
    Prefix p25 = parse_prefix("10.0.0.128/25");
    Prefix q24 = parse_prefix("10.0.1.0/24");
    CHECK(p24.contains(p25));
    CHECK(!p25.contains(p24));
    CHECK(p24.contains(p24));
    CHECK(!p24.contains(q24));
    CHECK(p24.overlaps(p25));
    CHECK(p25.overlaps(p24));
    CHECK(!p24.overlaps(q24));
    CHECK(parse_prefix("0.0.0.0/0").contains(q24));
}

TEST_CASE("prefix ordering is (addr, len) lexicographic") {
    std::vector<Prefix> v = {parse_prefix("10.0.1.0/24"), parse_prefix("10.0.0.0/24"),
                             parse_prefix("10.0.0.0/16")};
    std::sort(v.begin(), v.end());
    CHECK(format_prefix(v[0]) == "10.0.0.0/16");
    CHECK(format_prefix(v[1]) == "10.0.0.0/24");
    CHECK(format_prefix(v[2]) == "10.0.1.0/24");
}

TEST_CASE("community pack and unpack") {
    CHECK(parse_community("65001:7") == ((65001u << 16) | 7u));
    CHECK(format_community((65001u << 16) | 7u) == "65001:7");
    CHECK(parse_community("0:0") == 0u);
    CHECK(parse_community("65535:65535") == 0xffffffffu);
    CHECK(format_community(parse_community("64512:100")) == "64512:100");

    CHECK_THROWS_AS(parse_community("65536:1"), ParseError);
    CHECK_THROWS_AS(parse_community("1:65536"), ParseError);
    CHECK_THROWS_AS(parse_community("1:2:3"), ParseError);
    CHECK_THROWS_AS(parse_community("17"), ParseError);
    CHECK_THROWS_AS(parse_community("x"), ParseError);
}
