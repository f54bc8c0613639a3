#include "cpcomp/srp.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "cpcomp/errors.hpp"

namespace cpcomp {

std::vector<std::pair<EdgeIdx, Attribute>> choices(const SrpInstance& srp,
                                                   const std::vector<OptAttr>& labels, NodeId u) {
    std::vector<std::pair<EdgeIdx, Attribute>> out;
    for (EdgeIdx e : srp.topo.out_edges[u]) {
        NodeId v = srp.topo.edges[e].second;
        OptAttr a = srp.transfer(e, labels[v]);
        if (a) out.emplace_back(e, std::move(*a));
    }
    return out;
}

std::vector<EdgeIdx> fwd_edges(const SrpInstance& srp, const std::vector<OptAttr>& labels,
                               NodeId u) {
    std::vector<EdgeIdx> out;
    if (!labels[u]) return out;
    for (const auto& [e, a] : choices(srp, labels, u))
        if (attrs_tied(a, *labels[u])) out.push_back(e);
    return out;
}

Solution solution_from_labels(const SrpInstance& srp, std::vector<OptAttr> labels) {
    Solution sol;
    sol.fwd.resize(srp.topo.num_nodes);
    for (NodeId u = 0; u < srp.topo.num_nodes; ++u) sol.fwd[u] = fwd_edges(srp, labels, u);
    sol.labels = std::move(labels);
    return sol;
}

bool is_stable(const SrpInstance& srp, const std::vector<OptAttr>& labels) {
    if ((int)labels.size() != srp.topo.num_nodes) return false;
    NodeId d = srp.topo.dest;
    if (!labels[d] || !(*labels[d] == srp.init_attr)) return false;
    for (NodeId u = 0; u < srp.topo.num_nodes; ++u) {
        if (u == d) continue;
        auto cs = choices(srp, labels, u);
        if (cs.empty()) {
            if (labels[u]) return false;
            continue;
        }
        if (!labels[u]) return false;
        bool available = false;
        for (const auto& [e, a] : cs) {
            if (a == *labels[u]) available = true;
            if (compare_attrs(a, *labels[u]) == Ordering::Less) return false;
        }
        if (!available) return false;
    }
    return true;
}

std::vector<std::string> validate_well_formed(const SrpInstance& srp) {
    std::vector<std::string> out;
    for (size_t e = 0; e < srp.topo.edges.size(); ++e)
        if (srp.topo.edges[e].first == srp.topo.edges[e].second)
            out.push_back("self-loop at node " + std::to_string(srp.topo.edges[e].first));

    if (!srp.spontaneous_domain()) {
        for (size_t e = 0; e < srp.topo.edges.size(); ++e)
            if (srp.transfer((EdgeIdx)e, std::nullopt))
                out.push_back("spontaneous transfer on edge " + std::to_string(e));
    }

    // Order sanity over a bounded attribute sample.
    std::vector<Attribute> sample{srp.init_attr};
    try {
        auto cands = candidate_attrs(srp);
        for (const auto& per_node : cands)
            for (const auto& a : per_node) {
                if (sample.size() >= 24) break;
                if (std::find(sample.begin(), sample.end(), a) == sample.end()) sample.push_back(a);
            }
    } catch (const InstanceTooLarge&) {
        // validation degrades to the attrs we already have
    }
    for (const auto& a : sample)
        if (compare_attrs(a, a) != Ordering::Incomparable)
            out.push_back("order not irreflexive on " + format_attr(a, {}));
    for (const auto& a : sample)
        for (const auto& b : sample)
            for (const auto& c : sample)
                if (compare_attrs(a, b) == Ordering::Less && compare_attrs(b, c) == Ordering::Less &&
                    compare_attrs(a, c) != Ordering::Less)
                    out.push_back("order not transitive via " + format_attr(b, {}));
    return out;
}

std::vector<std::vector<Attribute>> candidate_attrs(const SrpInstance& srp) {
    const Topology& t = srp.topo;
    std::vector<std::vector<Attribute>> out(t.num_nodes);
    size_t budget = 200000;

    auto record = [&](NodeId u, const Attribute& a) {
        auto& bucket = out[u];
        if (std::find(bucket.begin(), bucket.end(), a) == bucket.end()) {
            bucket.push_back(a);
            return true;
        }
        return false;
    };

    // Spontaneous outputs first: they need no neighbor label.
    for (size_t e = 0; e < t.edges.size(); ++e)
        if (OptAttr a = srp.transfer((EdgeIdx)e, std::nullopt)) record(t.edges[e].first, *a);

    record(t.dest, srp.init_attr);
    std::vector<bool> on_path(t.num_nodes, false);
    std::function<void(NodeId, const Attribute&)> dfs = [&](NodeId v, const Attribute& a) {
        if (budget == 0) throw InstanceTooLarge("candidate attribute walk");
        --budget;
        on_path[v] = true;
        for (EdgeIdx e : t.in_edges[v]) { // edges (u,v): u hears a from v
            NodeId u = t.edges[e].first;
            if (on_path[u]) continue;
            OptAttr b = srp.transfer(e, a);
            if (!b) continue;
            record(u, *b);
            dfs(u, *b);
        }
        on_path[v] = false;
    };
    dfs(t.dest, srp.init_attr);
    return out;
}

namespace {

// Minimal choices under ≺, then the requested neighbor-id tie break.
std::optional<std::pair<EdgeIdx, Attribute>> best_choice(
    const SrpInstance& srp, const std::vector<std::pair<EdgeIdx, Attribute>>& cs, TieBreak tie) {
    if (cs.empty()) return std::nullopt;
    std::optional<std::pair<EdgeIdx, Attribute>> best;
    for (const auto& [e, a] : cs) {
        bool minimal = true;
        for (const auto& [e2, b] : cs)
            if (compare_attrs(b, a) == Ordering::Less) {
                minimal = false;
                break;
            }
        if (!minimal) continue;
        if (!best) {
            best = {e, a};
            continue;
        }
        NodeId nv = srp.topo.edges[e].second, bv = srp.topo.edges[best->first].second;
        if (tie == TieBreak::LowestNeighborId ? nv < bv : nv > bv) best = {e, a};
    }
    return best;
}

struct LabelsHash {
    size_t operator()(const std::vector<OptAttr>& labels) const {
        size_t h = 14695981039346656037ull;
        for (const auto& a : labels) h = h * 1099511628211ull ^ hash_attr(a);
        return h;
    }
};

} // namespace

std::variant<Solution, Divergence> simulate_solution(const SrpInstance& srp, TieBreak tie) {
    const Topology& t = srp.topo;
    std::vector<OptAttr> labels(t.num_nodes);
    labels[t.dest] = srp.init_attr;

    std::unordered_set<size_t> observed{hash_attr(labels[t.dest])};
    int rounds = 0;
    for (;;) {
        ++rounds;
        bool changed = false;
        for (NodeId u = 0; u < t.num_nodes; ++u) {
            if (u == t.dest) continue;
            auto pick = best_choice(srp, choices(srp, labels, u), tie);
            OptAttr next = pick ? OptAttr(pick->second) : std::nullopt;
            if (!(next == labels[u])) {
                labels[u] = std::move(next);
                observed.insert(hash_attr(labels[u]));
                changed = true;
            }
        }
        if (!changed) return solution_from_labels(srp, std::move(labels));
        if (rounds > 2 * t.num_nodes * (int)observed.size()) return Divergence{rounds};
    }
}

std::vector<Solution> enumerate_solutions(const SrpInstance& srp, int max_nodes) {
    const Topology& t = srp.topo;
    if (t.num_nodes > max_nodes)
        throw InstanceTooLarge("enumerate_solutions: " + std::to_string(t.num_nodes) + " nodes");

    // Non-dest nodes branch over a support: one out-edge or ⊥.
    std::vector<NodeId> vars;
    double space = 1;
    for (NodeId u = 0; u < t.num_nodes; ++u) {
        if (u == t.dest) continue;
        vars.push_back(u);
        space *= (double)(t.out_edges[u].size() + 1);
        if (space > 8e6) throw InstanceTooLarge("enumerate_solutions: support space");
    }

    std::vector<size_t> odo(vars.size(), 0); // 0 = ⊥, k>0 = out_edges[k-1]
    std::vector<Solution> solutions;
    std::unordered_set<std::vector<OptAttr>, LabelsHash> seen;

    std::vector<OptAttr> labels(t.num_nodes);
    for (;;) {
        // derive labels for this support by bounded fixed-point iteration
        for (NodeId u = 0; u < t.num_nodes; ++u) labels[u] = std::nullopt;
        labels[t.dest] = srp.init_attr;
        for (int pass = 0; pass < 2 * t.num_nodes + 2; ++pass) {
            bool changed = false;
            for (size_t i = 0; i < vars.size(); ++i) {
                if (odo[i] == 0) continue;
                NodeId u = vars[i];
                EdgeIdx e = t.out_edges[u][odo[i] - 1];
                OptAttr a = srp.transfer(e, labels[t.edges[e].second]);
                if (!(a == labels[u])) {
                    labels[u] = std::move(a);
                    changed = true;
                }
            }
            if (!changed) break;
        }

        bool consistent = true;
        for (size_t i = 0; i < vars.size() && consistent; ++i)
            if (odo[i] > 0 && !labels[vars[i]]) consistent = false;

        if (consistent && is_stable(srp, labels) && seen.insert(labels).second)
            solutions.push_back(solution_from_labels(srp, labels));

        // odometer
        size_t i = 0;
        for (; i < odo.size(); ++i) {
            if (odo[i] < t.out_edges[vars[i]].size()) {
                ++odo[i];
                break;
            }
            odo[i] = 0;
        }
        if (i == odo.size()) break;
    }
    return solutions;
}

} // namespace cpcomp
