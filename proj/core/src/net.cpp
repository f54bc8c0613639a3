#include "cpcomp/net.hpp"

#include <cstdio>

#include "cpcomp/errors.hpp"

namespace cpcomp {

bool Prefix::contains(const Prefix& other) const {
    if (len > other.len) return false;
    return (addr & mask()) == (other.addr & mask());
}

bool Prefix::overlaps(const Prefix& other) const {
    return contains(other) || other.contains(*this);
}

Prefix parse_prefix(const std::string& text) {
    unsigned a, b, c, d;
    int len;
    char tail;
    int n = std::sscanf(text.c_str(), "%u.%u.%u.%u/%d%c", &a, &b, &c, &d, &len, &tail);
    if (n != 5 || a > 255 || b > 255 || c > 255 || d > 255 || len < 0 || len > 32)
        throw ParseError(text, "expected prefix A.B.C.D/len");
    Prefix p;
    p.len = len;
    p.addr = (a << 24) | (b << 16) | (c << 8) | d;
    if ((p.addr & ~p.mask()) != 0)
        throw ParseError(text, "prefix has host bits set");
    return p;
}

std::string format_prefix(const Prefix& p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u/%d", (p.addr >> 24) & 255, (p.addr >> 16) & 255,
                  (p.addr >> 8) & 255, p.addr & 255, p.len);
    return buf;
}

Community parse_community(const std::string& text) {
    unsigned hi, lo;
    char tail;
    int n = std::sscanf(text.c_str(), "%u:%u%c", &hi, &lo, &tail);
    if (n != 2 || hi > 0xffff || lo > 0xffff)
        throw ParseError(text, "expected community N:M");
    return (hi << 16) | lo;
}

std::string format_community(Community c) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u:%u", c >> 16, c & 0xffff);
    return buf;
}

} // namespace cpcomp
