#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cpcomp/dest_ecs.hpp"
#include "cpcomp/errors.hpp"
#include "cpcomp/net.hpp"

namespace cpcomp {

// Reduced ordered BDD with a hash-consed node store: equal functions always
// have equal node ids, so semantic equality is an integer compare. Variable
// order is fixed at layout construction; there is no dynamic reordering.
class BddManager {
public:
    using Ref = int32_t;
    static constexpr Ref kFalse = 0;
    static constexpr Ref kTrue = 1;

    explicit BddManager(int num_vars);

    int num_vars() const { return num_vars_; }
    Ref var(int index);           // the function "variable index is true"
    Ref nvar(int index);
    Ref ite(Ref f, Ref g, Ref h);
    Ref and_(Ref a, Ref b) { return ite(a, b, kFalse); }
    Ref or_(Ref a, Ref b) { return ite(a, kTrue, b); }
    Ref xor_(Ref a, Ref b) { return ite(a, not_(b), b); }
    Ref not_(Ref a) { return ite(a, kFalse, kTrue); }
    Ref iff(Ref a, Ref b) { return ite(a, b, not_(b)); }
    // Fix a variable to a constant.
    Ref restrict_(Ref f, int var_index, bool value);

    bool eval(Ref f, const std::vector<bool>& assignment) const;
    size_t node_count() const { return nodes_.size(); }
    size_t reachable_size(Ref f) const;
    std::string to_dot(Ref f, const std::vector<std::string>& var_names) const;

private:
    struct Node {
        int var;
        Ref lo, hi;
    };
    Ref mk(int var, Ref lo, Ref hi);

    int num_vars_;
    std::vector<Node> nodes_;
    std::unordered_map<uint64_t, Ref> unique_;
    std::unordered_map<uint64_t, Ref> ite_cache_;
    std::vector<Ref> var_refs_;
};

// Variable layout for policy relations over one EC. Order (top to bottom):
// community bit pairs (c_i, c_i'), local-pref one-hot pairs (lp_j, lp_j'),
// protocol tag input bits, drop output bit. Interleaving input/output copies
// keeps the x'↔f(x) biimplications narrow.
struct VarLayout {
    std::vector<Community> communities; // ascending
    std::vector<uint32_t> lp_values;    // ascending, contains 100
    static constexpr int kTagBits = 2;

    int community_index(Community c) const; // -1 when absent
    int lp_index(uint32_t v) const;
    int comm_var(int i) const { return 2 * i; }
    int comm_prime(int i) const { return 2 * i + 1; }
    int lp_var(int j) const { return 2 * (int)communities.size() + 2 * j; }
    int lp_prime(int j) const { return lp_var(j) + 1; }
    int tag_var(int b) const { return 2 * (int)communities.size() + 2 * (int)lp_values.size() + b; }
    int drop_var() const { return tag_var(kTagBits); }
    int total_vars() const { return drop_var() + 1; }
    std::vector<std::string> var_names() const;

    friend bool operator==(const VarLayout&, const VarLayout&) = default;
};

VarLayout make_layout(const SpecializedSpec& sp);

// A compiled policy relation: a BDD over layout variables relating input
// attribute bits to output bits. For every valid input (one-hot lp) exactly
// one output assignment satisfies the relation; drop=1 forces all primed
// bits to 0 so denied routes compare equal regardless of dead transforms.
struct PolicyRelation {
    BddManager::Ref ref = BddManager::kFalse;
    const VarLayout* layout = nullptr;
    BddManager* mgr = nullptr;
};

// Concrete attribute state flowing through a clause pipeline.
struct RouteBits {
    std::vector<bool> communities; // aligned with layout.communities
    int lp_index = 0;
    int protocol_tag = 0;
};

// Compile a full interface pipeline: stages run in order (e.g. export then
// import); each stage is a specialized clause list with first-match-wins and
// implicit final deny; a missing stage (present=false) is permit-all.
// acl_deny folds the packet filter into the drop bit.
struct PipelineStage {
    const std::vector<SpecClause>* clauses = nullptr;
    bool present = false;
};
PolicyRelation compile_pipeline(BddManager& mgr, const VarLayout& layout,
                                const std::vector<PipelineStage>& stages, bool acl_deny);

// Spec-level entry point: specialize one policy against an EC and compile it.
PolicyRelation compile_policy(BddManager& mgr, const VarLayout& layout,
                              const RoutePolicy& policy, const AclList& acl,
                              const DestEquivClass& ec, Protocol proto);

bool bdd_equal(const PolicyRelation& a, const PolicyRelation& b); // LayoutMismatch on foreign mix

PolicyRelation restrict_relation(const PolicyRelation& rel, int var_index, bool value);

std::string relation_to_dot(const PolicyRelation& rel);

// Truth-table style application used by tests and the relation invariant
// check: returns false when the input is dropped.
bool relation_apply(const PolicyRelation& rel, const RouteBits& in, RouteBits& out);

std::vector<SpecClause> specialize_policy(const RoutePolicy& policy, const DestEquivClass& ec,
                                          Protocol proto);
bool acl_denies(const AclList& acl, const DestEquivClass& ec);

} // namespace cpcomp
