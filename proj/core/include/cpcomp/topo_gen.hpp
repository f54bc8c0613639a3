#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpcomp/config_ir.hpp"

namespace cpcomp {

// Deterministic topology/config generators. `size` is the node count except
// where noted. Throws UnsupportedSize for kinds/sizes that cannot be built.
//
//   fattree     size = 5t² (t ≥ 3): 2t pods of t ToRs + t aggs, t² cores.
//               eBGP shortest path, per-ToR /24 origin + export filter.
//   ring        even size: eBGP ring, per-node /24 origin.
//   mesh        full mesh, eBGP, per-node /24 origin.
//   lp-gadget   size = 5: destination + three border routers preferring a
//               route reflector; the classic local-pref diamond.
//   tag-gadget  size = 4: community tagging + lp lift diamond.
//   chain       size = k ∈ {2,3,4}: k preference levels via k-1 reflectors;
//               solutions show up to k behaviors inside one block.
//   oscillator  size = 4: no stable solution (preference ring).
//   static-loop size = 3: two nodes with mutual static routes + destination.
//   random      size ≤ 10: seeded random instance across all protocols.
NetworkSpec generate_network(const std::string& kind, int size, uint64_t seed = 0);

std::vector<std::string> generator_kinds();

} // namespace cpcomp
