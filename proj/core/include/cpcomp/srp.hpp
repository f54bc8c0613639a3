#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "cpcomp/attribute.hpp"
#include "cpcomp/topology.hpp"

namespace cpcomp {

// Stable routing problem instance. The algorithms below are generic over the
// transfer/compare functions; protocol knowledge lives in protocols.cpp.
struct SrpInstance {
    Topology topo;
    std::string attr_domain; // "rip" | "ospf" | "bgp" | "static"
    Attribute init_attr;     // the destination's label
    std::function<Ordering(const Attribute&, const Attribute&)> compare;
    std::function<OptAttr(EdgeIdx, const OptAttr&)> transfer;

    bool spontaneous_domain() const { return attr_domain == "static"; }
};

struct Solution {
    std::vector<OptAttr> labels;          // per node
    std::vector<std::vector<EdgeIdx>> fwd; // per node, ascending edge index
};

// (edge, transferred attribute) pairs a node may select from, given labels.
std::vector<std::pair<EdgeIdx, Attribute>> choices(const SrpInstance& srp,
                                                   const std::vector<OptAttr>& labels, NodeId u);

// Edges whose choice attribute is ≈-tied with u's label.
std::vector<EdgeIdx> fwd_edges(const SrpInstance& srp, const std::vector<OptAttr>& labels,
                               NodeId u);

Solution solution_from_labels(const SrpInstance& srp, std::vector<OptAttr> labels);

bool is_stable(const SrpInstance& srp, const std::vector<OptAttr>& labels);

// Structural checks: no self-loops, non-spontaneity (except static domains),
// compare irreflexive/transitive on sampled attributes. Violations as text.
std::vector<std::string> validate_well_formed(const SrpInstance& srp);

// Per-node attribute carriers: every label value reachable along simple
// paths from the destination, plus spontaneous transfer outputs.
std::vector<std::vector<Attribute>> candidate_attrs(const SrpInstance& srp);

enum class TieBreak { LowestNeighborId, HighestNeighborId };

struct Divergence {
    int rounds = 0;
};

// Deterministic synchronous-sweep fixed point (nodes in id order, explicit
// tie-break among ≺-minimal choices). Reports divergence after
// 2·|V|·|observed attribute values| rounds without stabilizing.
std::variant<Solution, Divergence> simulate_solution(const SrpInstance& srp,
                                                     TieBreak tie = TieBreak::LowestNeighborId);

// Exhaustive and exact: all stable labelings. Branches over per-node support
// choices (an out-edge or ⊥), derives labels by bounded iteration, filters
// with is_stable, dedups by labels. Throws InstanceTooLarge beyond max_nodes
// or when the support space exceeds an internal budget.
std::vector<Solution> enumerate_solutions(const SrpInstance& srp, int max_nodes = 10);

} // namespace cpcomp
