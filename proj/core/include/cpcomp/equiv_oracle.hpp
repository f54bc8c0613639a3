#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpcomp/protocols.hpp"
#include "cpcomp/srp.hpp"

namespace cpcomp {

// Brute-force control-plane equivalence oracle. Completely independent of
// the compression algorithm: it enumerates stable solutions on both sides
// and matches them up, searching over copy assignments where the abstraction
// split a block into BGP preference cases.

struct OracleMapping {
    // Base abstraction: concrete node -> abstract node (the block's first copy).
    std::map<NodeId, NodeId> f;
    // Copy groups: for each split base abstract node, all of its copies
    // (including itself). Nodes not listed have exactly one copy.
    std::map<NodeId, std::vector<NodeId>> copy_groups;
    AttrAbstraction::Kind h_kind = AttrAbstraction::Kind::Identity;
    std::set<Community> unused_tags;
};

bool check_label_equivalence(const Solution& sol, const Solution& abs_sol,
                             const std::map<NodeId, NodeId>& f, const AttrAbstraction& h);

// Forward equivalence: image of every concrete fwd edge is abstract fwd, and
// for every abstract fwd edge every concrete member has a witness.
bool check_fwd_equivalence(const SrpInstance& srp, const SrpInstance& abs_srp,
                           const Solution& sol, const Solution& abs_sol,
                           const std::map<NodeId, NodeId>& f);

// Choice equivalence (stronger, used for loop-free domains): every concrete
// choice maps to an abstract one, and every abstract choice is witnessed at
// every concrete pre-image edge.
bool check_choice_equivalence(const SrpInstance& srp, const SrpInstance& abs_srp,
                              const Solution& sol, const Solution& abs_sol,
                              const std::map<NodeId, NodeId>& f, const AttrAbstraction& h);

struct OracleCounterexample {
    std::string side;   // "concrete-unmatched" | "abstract-unmatched"
    int solution_index = -1;
    bool image_has_loop = false;        // the f-image of the solution's fwd graph has a cycle
    std::vector<NodeId> loop;           // abstract nodes on one such cycle
    std::string detail;
};

struct OracleVerdict {
    bool equivalent = false;
    std::vector<std::pair<int, int>> matched; // (concrete idx, abstract idx) pairs
    std::optional<OracleCounterexample> counterexample;
    int concrete_solutions = 0;
    int abstract_solutions = 0;
};

// The onto copy refinement under which one concrete solution matches one
// abstract solution (label + fwd equivalent), or nullopt. Property transfer
// works modulo this per-solution map, not the base f.
std::optional<std::map<NodeId, NodeId>> find_matching_refinement(
    const SrpInstance& srp, const SrpInstance& abs_srp, const OracleMapping& mapping,
    const Solution& sol, const Solution& abs_sol);

// Every concrete stable solution must have a label+fwd-equivalent abstract
// one under some onto copy refinement, and vice versa.
OracleVerdict check_cp_equivalence(const SrpInstance& srp, const SrpInstance& abs_srp,
                                   const OracleMapping& mapping, int max_nodes = 10);

} // namespace cpcomp
