#include "cpcomp/policy_bdd.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "cpcomp/protocols.hpp"

namespace cpcomp {

// Packing limits for the uint64 cache keys below.
static constexpr int kMaxVars = 1 << 12;
static constexpr BddManager::Ref kMaxNodes = 1 << 21;

BddManager::BddManager(int num_vars) : num_vars_(num_vars) {
    if (num_vars < 0 || num_vars >= kMaxVars) throw InstanceTooLarge("variable count");
    nodes_.push_back({num_vars, kFalse, kFalse}); // terminal 0
    nodes_.push_back({num_vars, kTrue, kTrue});   // terminal 1
    var_refs_.assign(num_vars, -1);
}

BddManager::Ref BddManager::mk(int var, Ref lo, Ref hi) {
    if (lo == hi) return lo;
    uint64_t key = ((uint64_t)var << 42) | ((uint64_t)lo << 21) | (uint64_t)hi;
    auto it = unique_.find(key);
    if (it != unique_.end()) return it->second;
    if ((Ref)nodes_.size() >= kMaxNodes) throw InstanceTooLarge("bdd node store");
    Ref r = (Ref)nodes_.size();
    nodes_.push_back({var, lo, hi});
    unique_.emplace(key, r);
    return r;
}

BddManager::Ref BddManager::var(int index) {
    if (var_refs_[index] < 0) var_refs_[index] = mk(index, kFalse, kTrue);
    return var_refs_[index];
}

BddManager::Ref BddManager::nvar(int index) { return not_(var(index)); }

BddManager::Ref BddManager::ite(Ref f, Ref g, Ref h) {
    if (f == kTrue) return g;
    if (f == kFalse) return h;
    if (g == h) return g;
    if (g == kTrue && h == kFalse) return f;
    if (f == g) return ite(f, kTrue, h);
    if (f == h) return ite(f, g, kFalse);

    uint64_t key = ((uint64_t)f << 42) | ((uint64_t)g << 21) | (uint64_t)h;
    auto it = ite_cache_.find(key);
    if (it != ite_cache_.end()) return it->second;

    int top = std::min({nodes_[f].var, nodes_[g].var, nodes_[h].var});
    auto cof = [&](Ref x, bool hi) { return nodes_[x].var == top ? (hi ? nodes_[x].hi : nodes_[x].lo) : x; };
    Ref lo = ite(cof(f, false), cof(g, false), cof(h, false));
    Ref hi = ite(cof(f, true), cof(g, true), cof(h, true));
    Ref r = mk(top, lo, hi);
    ite_cache_.emplace(key, r);
    return r;
}

BddManager::Ref BddManager::restrict_(Ref f, int var_index, bool value) {
    std::unordered_map<Ref, Ref> memo;
    std::function<Ref(Ref)> go = [&](Ref x) -> Ref {
        if (nodes_[x].var >= var_index) {
            if (nodes_[x].var > var_index) return x; // var absent below (ordered)
            return value ? nodes_[x].hi : nodes_[x].lo;
        }
        auto it = memo.find(x);
        if (it != memo.end()) return it->second;
        Ref r = mk(nodes_[x].var, go(nodes_[x].lo), go(nodes_[x].hi));
        memo.emplace(x, r);
        return r;
    };
    return go(f);
}

bool BddManager::eval(Ref f, const std::vector<bool>& assignment) const {
    while (f > kTrue) {
        const Node& n = nodes_[f];
        f = assignment[n.var] ? n.hi : n.lo;
    }
    return f == kTrue;
}

size_t BddManager::reachable_size(Ref f) const {
    std::vector<Ref> stack{f};
    std::set<Ref> seen{f};
    while (!stack.empty()) {
        Ref x = stack.back();
        stack.pop_back();
        if (x <= kTrue) continue;
        for (Ref c : {nodes_[x].lo, nodes_[x].hi})
            if (seen.insert(c).second) stack.push_back(c);
    }
    return seen.size();
}

std::string BddManager::to_dot(Ref f, const std::vector<std::string>& var_names) const {
    std::ostringstream out;
    out << "digraph bdd {\n  rankdir=TB;\n";
    out << "  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n";
    std::vector<Ref> stack{f};
    std::set<Ref> seen{f};
    while (!stack.empty()) {
        Ref x = stack.back();
        stack.pop_back();
        if (x <= kTrue) continue;
        const Node& n = nodes_[x];
        std::string label = n.var < (int)var_names.size() ? var_names[n.var] : "v" + std::to_string(n.var);
        out << "  n" << x << " [label=\"" << label << "\"];\n";
        out << "  n" << x << " -> n" << n.lo << " [style=dashed];\n";
        out << "  n" << x << " -> n" << n.hi << ";\n";
        for (Ref c : {n.lo, n.hi})
            if (seen.insert(c).second) stack.push_back(c);
    }
    out << "}\n";
    return out.str();
}

int VarLayout::community_index(Community c) const {
    auto it = std::lower_bound(communities.begin(), communities.end(), c);
    if (it != communities.end() && *it == c) return (int)(it - communities.begin());
    return -1;
}

int VarLayout::lp_index(uint32_t v) const {
    auto it = std::lower_bound(lp_values.begin(), lp_values.end(), v);
    if (it != lp_values.end() && *it == v) return (int)(it - lp_values.begin());
    return -1;
}

std::vector<std::string> VarLayout::var_names() const {
    std::vector<std::string> names(total_vars());
    for (size_t i = 0; i < communities.size(); ++i) {
        names[comm_var((int)i)] = "c:" + format_community(communities[i]);
        names[comm_prime((int)i)] = "c':" + format_community(communities[i]);
    }
    for (size_t j = 0; j < lp_values.size(); ++j) {
        names[lp_var((int)j)] = "lp:" + std::to_string(lp_values[j]);
        names[lp_prime((int)j)] = "lp':" + std::to_string(lp_values[j]);
    }
    for (int b = 0; b < kTagBits; ++b) names[tag_var(b)] = "tag" + std::to_string(b);
    names[drop_var()] = "drop'";
    return names;
}

VarLayout make_layout(const SpecializedSpec& sp) {
    VarLayout layout;
    layout.communities.assign(sp.all_communities.begin(), sp.all_communities.end());
    layout.lp_values.assign(sp.lp_values.begin(), sp.lp_values.end());
    return layout;
}

namespace {

// Symbolic route state threaded through the clause stages: every component
// is a function (BDD) of the unprimed input variables.
struct SymState {
    std::vector<BddManager::Ref> comm;
    std::vector<BddManager::Ref> lp; // one-hot by layout.lp_values index
    BddManager::Ref drop;
};

void run_stage_symbolic(BddManager& mgr, const VarLayout& layout,
                        const std::vector<SpecClause>& clauses, SymState& st) {
    using Ref = BddManager::Ref;
    Ref matched = BddManager::kFalse;
    for (const auto& cl : clauses) {
        Ref cond = BddManager::kTrue;
        for (Community c : cl.match_community) {
            int i = layout.community_index(c);
            if (i < 0) throw LayoutMiss("community " + format_community(c));
            cond = mgr.and_(cond, st.comm[i]);
        }
        Ref fire = mgr.and_(cond, mgr.not_(matched));
        matched = mgr.or_(matched, cond);
        if (fire == BddManager::kFalse) continue;
        if (!cl.permit) {
            st.drop = mgr.or_(st.drop, fire);
            continue;
        }
        for (Community c : cl.delete_community) {
            int i = layout.community_index(c);
            if (i < 0) throw LayoutMiss("community " + format_community(c));
            st.comm[i] = mgr.ite(fire, BddManager::kFalse, st.comm[i]);
        }
        for (Community c : cl.add_community) {
            int i = layout.community_index(c);
            if (i < 0) throw LayoutMiss("community " + format_community(c));
            st.comm[i] = mgr.ite(fire, BddManager::kTrue, st.comm[i]);
        }
        if (cl.set_local_pref) {
            int j = layout.lp_index(*cl.set_local_pref);
            if (j < 0) throw LayoutMiss("local-pref " + std::to_string(*cl.set_local_pref));
            for (size_t k = 0; k < st.lp.size(); ++k)
                st.lp[k] = mgr.ite(fire, (int)k == j ? BddManager::kTrue : BddManager::kFalse,
                                   st.lp[k]);
        }
    }
    st.drop = mgr.or_(st.drop, mgr.not_(matched)); // implicit trailing deny
}

} // namespace

PolicyRelation compile_pipeline(BddManager& mgr, const VarLayout& layout,
                                const std::vector<PipelineStage>& stages, bool acl_deny) {
    using Ref = BddManager::Ref;
    int nc = (int)layout.communities.size();
    int nl = (int)layout.lp_values.size();

    SymState st;
    for (int i = 0; i < nc; ++i) st.comm.push_back(mgr.var(layout.comm_var(i)));
    for (int j = 0; j < nl; ++j) st.lp.push_back(mgr.var(layout.lp_var(j)));
    st.drop = acl_deny ? BddManager::kTrue : BddManager::kFalse;

    for (const auto& stage : stages)
        if (stage.present) run_stage_symbolic(mgr, layout, *stage.clauses, st);

    // Exactly one lp input bit set.
    Ref onehot = BddManager::kFalse;
    for (int j = 0; j < nl; ++j) {
        Ref only = BddManager::kTrue;
        for (int k = 0; k < nl; ++k) {
            Ref bit = mgr.var(layout.lp_var(k));
            only = mgr.and_(only, k == j ? bit : mgr.not_(bit));
        }
        onehot = mgr.or_(onehot, only);
    }

    // Conjunctions built from the bottom of the order up, to keep mk cheap.
    Ref zero = BddManager::kTrue;
    Ref match = BddManager::kTrue;
    for (int j = nl - 1; j >= 0; --j) {
        zero = mgr.and_(mgr.nvar(layout.lp_prime(j)), zero);
        match = mgr.and_(mgr.iff(mgr.var(layout.lp_prime(j)), st.lp[j]), match);
    }
    for (int i = nc - 1; i >= 0; --i) {
        zero = mgr.and_(mgr.nvar(layout.comm_prime(i)), zero);
        match = mgr.and_(mgr.iff(mgr.var(layout.comm_prime(i)), st.comm[i]), match);
    }

    Ref dropped = mgr.and_(st.drop, mgr.and_(mgr.var(layout.drop_var()), zero));
    Ref kept = mgr.and_(mgr.not_(st.drop), mgr.and_(mgr.nvar(layout.drop_var()), match));
    PolicyRelation rel;
    rel.ref = mgr.and_(onehot, mgr.or_(dropped, kept));
    rel.layout = &layout;
    rel.mgr = &mgr;
    return rel;
}

PolicyRelation compile_policy(BddManager& mgr, const VarLayout& layout, const RoutePolicy& policy,
                              const AclList& acl, const DestEquivClass& ec, Protocol proto) {
    std::vector<SpecClause> clauses = specialize_policy(policy, ec, proto);
    PipelineStage stage{&clauses, true};
    return compile_pipeline(mgr, layout, {stage}, acl_denies(acl, ec));
}

bool bdd_equal(const PolicyRelation& a, const PolicyRelation& b) {
    if (a.mgr != b.mgr) throw LayoutMismatch("relations from different managers");
    if (a.layout != b.layout && !(a.layout && b.layout && *a.layout == *b.layout))
        throw LayoutMismatch("relations over different layouts");
    return a.ref == b.ref;
}

PolicyRelation restrict_relation(const PolicyRelation& rel, int var_index, bool value) {
    PolicyRelation out = rel;
    out.ref = rel.mgr->restrict_(rel.ref, var_index, value);
    return out;
}

std::string relation_to_dot(const PolicyRelation& rel) {
    return rel.mgr->to_dot(rel.ref, rel.layout->var_names());
}

bool relation_apply(const PolicyRelation& rel, const RouteBits& in, RouteBits& out) {
    const VarLayout& ly = *rel.layout;
    BddManager& mgr = *rel.mgr;
    int nc = (int)ly.communities.size();
    int nl = (int)ly.lp_values.size();

    BddManager::Ref f = rel.ref;
    for (int i = 0; i < nc; ++i) f = mgr.restrict_(f, ly.comm_var(i), in.communities[i]);
    for (int j = 0; j < nl; ++j) f = mgr.restrict_(f, ly.lp_var(j), j == in.lp_index);
    for (int b = 0; b < VarLayout::kTagBits; ++b)
        f = mgr.restrict_(f, ly.tag_var(b), ((in.protocol_tag >> b) & 1) != 0);
    if (f == BddManager::kFalse) return false; // off-relation input

    // After fixing the inputs the relation is a conjunction of literals over
    // the primed bits and drop', so each remaining bit has a forced value.
    auto forced = [&](int v) {
        bool value = mgr.restrict_(f, v, false) == BddManager::kFalse;
        f = mgr.restrict_(f, v, value);
        return value;
    };
    bool dropped = forced(ly.drop_var());
    out.communities.assign(nc, false);
    for (int i = 0; i < nc; ++i) out.communities[i] = forced(ly.comm_prime(i));
    out.lp_index = 0;
    for (int j = 0; j < nl; ++j)
        if (forced(ly.lp_prime(j))) out.lp_index = j;
    out.protocol_tag = in.protocol_tag;
    return !dropped;
}

std::vector<SpecClause> specialize_policy(const RoutePolicy& policy, const DestEquivClass& ec,
                                          Protocol proto) {
    std::vector<SpecClause> out;
    for (const auto& cl : policy) {
        if (cl.match_protocol && *cl.match_protocol != protocol_name(proto)) continue;
        if (!cl.match_prefix.empty()) {
            bool hit = false;
            for (const auto& p : cl.match_prefix)
                if (p.len <= ec.representative.len && p.contains(ec.representative)) {
                    hit = true;
                    break;
                }
            if (!hit) continue;
        }
        SpecClause sc;
        sc.match_community = cl.match_community;
        std::sort(sc.match_community.begin(), sc.match_community.end());
        sc.match_community.erase(std::unique(sc.match_community.begin(), sc.match_community.end()),
                                 sc.match_community.end());
        sc.permit = cl.permit;
        sc.add_community = cl.add_community;
        std::sort(sc.add_community.begin(), sc.add_community.end());
        sc.add_community.erase(std::unique(sc.add_community.begin(), sc.add_community.end()),
                               sc.add_community.end());
        sc.delete_community = cl.delete_community;
        std::sort(sc.delete_community.begin(), sc.delete_community.end());
        sc.delete_community.erase(
            std::unique(sc.delete_community.begin(), sc.delete_community.end()),
            sc.delete_community.end());
        sc.set_local_pref = cl.set_local_pref;
        bool total = sc.match_community.empty();
        out.push_back(std::move(sc));
        if (total) break; // later clauses are unreachable
    }
    return out;
}

bool acl_denies(const AclList& acl, const DestEquivClass& ec) {
    for (const auto& entry : acl)
        if (entry.prefix.len <= ec.representative.len && entry.prefix.contains(ec.representative))
            return entry.permit ? false : true;
    return !acl.empty(); // a present list ends in an implicit deny
}

} // namespace cpcomp
