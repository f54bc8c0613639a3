#pragma once

#include <set>
#include <vector>

#include "cpcomp/srp.hpp"

namespace cpcomp {

// Data-plane property checks over one stable solution's forwarding graph.
// All of them are preserved by certified abstractions modulo the node map.

// Some forwarding path u → … → v exists.
bool reachable(const SrpInstance& srp, const Solution& sol, NodeId u, NodeId v);

// Lengths of all simple forwarding paths u → v.
std::set<int> path_lengths(const SrpInstance& srp, const Solution& sol, NodeId u, NodeId v);

// Some forwarding path from u ends at a node with no route (label ⊥).
// Only spontaneous domains (static) can forward into a ⊥ node, but a ⊥
// label at u itself also counts.
bool has_black_hole(const SrpInstance& srp, const Solution& sol, NodeId u);

// Traffic from u is not both delivered to v on one path and dropped on another.
bool multipath_consistent(const SrpInstance& srp, const Solution& sol, NodeId u, NodeId v);

// Every simple forwarding path u → v passes through the waypoint set.
// Vacuously true when v is unreachable.
bool waypointed(const SrpInstance& srp, const Solution& sol, NodeId u, NodeId v,
                const std::set<NodeId>& waypoints);

// The forwarding graph (all fwd edges) contains a directed cycle.
bool has_routing_loop(const SrpInstance& srp, const Solution& sol);
std::vector<NodeId> find_routing_loop(const SrpInstance& srp, const Solution& sol); // empty if none

} // namespace cpcomp
