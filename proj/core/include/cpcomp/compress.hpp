#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cpcomp/config_ir.hpp"
#include "cpcomp/dest_ecs.hpp"
#include "cpcomp/policy_bdd.hpp"
#include "cpcomp/protocols.hpp"

namespace cpcomp {

using BlockId = int32_t;

// Partition of the node set with deterministic splitting: the largest
// fragment (ties: the one holding the smallest node) keeps the block id,
// all others get fresh ids. Keeps signatures stable across iterations.
class Partition {
public:
    Partition() : Partition(0) {}
    explicit Partition(int num_nodes);

    BlockId block_of(NodeId u) const { return block_of_[u]; }
    const std::vector<NodeId>& members(BlockId b) const; // ascending
    std::vector<BlockId> block_ids() const;              // ascending
    int num_blocks() const { return (int)blocks_.size(); }
    int generation() const { return generation_; }

    // Split a block into the given groups (a partition of its members).
    // Returns ids of the freshly created blocks.
    std::vector<BlockId> split(BlockId b, const std::vector<std::vector<NodeId>>& groups);
    // Carve a subset out of a block (no-op if subset is empty or everything).
    BlockId isolate(BlockId b, const std::vector<NodeId>& subset);

private:
    std::vector<BlockId> block_of_;
    std::map<BlockId, std::vector<NodeId>> blocks_;
    BlockId next_id_ = 0;
    int generation_ = 0;
};

// Canonical per-directed-edge transfer summary: the compiled relation ids of
// both policy halves plus the protocol constants. Two edges with equal
// signatures have identical transfer behavior for this EC.
struct EdgeSig {
    BddManager::Ref import_rel = 0; // u's import on (u,v), ACL folded in
    BddManager::Ref export_rel = 0; // v's export on (v,u)
    int ospf_cost = 1;
    int ospf_area = 0; // raw area: finer than the inter-area flip, dest-independent
    bool static_present = false;
    friend auto operator<=>(const EdgeSig&, const EdgeSig&) = default;
};

// Everything find_abstraction needs for one (spec, EC) pair.
struct CompressContext {
    const SpecializedSpec* sp = nullptr;
    VarLayout layout;
    std::shared_ptr<BddManager> mgr;
    std::vector<EdgeSig> esig; // per directed edge, index-aligned with sp->topo.edges
    BddManager::Ref neutral_rel = 0; // relation of a policy-free interface
};

CompressContext make_compress_context(const SpecializedSpec& sp);

std::set<uint32_t> block_prefs(const SpecializedSpec& sp, const std::vector<NodeId>& members);

// One refinement pass over a block: group members by their interface
// signature. A neighbor is identified by its concrete id when its block
// carries more than one preference level (the case split will need per-node
// edge coverage there), by its block id otherwise. Returns the number of
// new blocks.
int refine(const CompressContext& ctx, Partition& partition, BlockId block);

enum class AbstractionMode { ForallExists, ForallForall };

struct AbstractionMap {
    Partition partition;
    AbstractionMode mode = AbstractionMode::ForallExists;
    BlockId dest_block = -1;
    NodeId dest = -1;
    std::map<BlockId, int> copies; // blocks split into BGP preference cases (count ≥ 2)
    AttrAbstraction h;             // node_map: concrete node -> block id (as NodeId)
    int refine_iterations = 0;

    int num_abstract_nodes() const; // blocks + extra copies
};

// Algorithm: specialize → split {d} from the rest → refine to fix point →
// static-route loop post-pass → BGP preference case split. The result always
// satisfies its certificate (asserted by the caller via check_*).
AbstractionMap find_abstraction(const CompressContext& ctx, NodeId dest);

struct Violation {
    std::string check; // "dest-singleton", "forall-exists", ...
    std::string detail;
};

struct Certificates {
    std::vector<std::string> passed;
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// ∀∃ topology conditions + dest/orig/drop/rank equivalence (construction +
// sampling) + transfer equivalence per abstract edge.
Certificates check_effective(const CompressContext& ctx, const AbstractionMap& map);
// BGP variant: ∀∀ on abstract edges incident to a multi-preference block,
// transfer equivalence modulo the loop-prevention premise.
Certificates check_bgp_effective(const CompressContext& ctx, const AbstractionMap& map);

// The emitted artifact: a compressed network document plus the mapping
// sidecar and its certificates.
struct AbstractNetwork {
    NetworkSpec spec;
    std::vector<std::string> abstract_node_names;   // per (block, copy)
    std::map<std::string, std::string> f;           // concrete id -> abstract id (copy 0)
    std::map<std::string, std::vector<std::string>> copy_groups; // base id -> copy ids
    AttrAbstraction h;
    Certificates certificates;
    Prefix ec_prefix;
    std::string dest;
    int concrete_nodes = 0, concrete_edges = 0; // undirected link counts
    int abstract_nodes = 0, abstract_edges = 0;
};

AbstractNetwork build_abstract_network(const NetworkSpec& original, const CompressContext& ctx,
                                       const AbstractionMap& map);

std::string emit_mapping_sidecar(const AbstractNetwork& abs);

struct MappingSidecar {
    std::vector<std::string> abstract_nodes;
    std::map<std::string, std::string> f;
    std::map<std::string, std::vector<std::string>> copy_groups;
    AttrAbstraction::Kind h_kind = AttrAbstraction::Kind::Identity;
    std::set<Community> unused_tags;
    Prefix ec_prefix;
    std::string dest;
};
MappingSidecar parse_mapping_sidecar(const std::string& json_text);

} // namespace cpcomp
