#include "cpcomp/equiv_oracle.hpp"

#include <algorithm>
#include <set>

namespace cpcomp {

bool check_label_equivalence(const Solution& sol, const Solution& abs_sol,
                             const std::map<NodeId, NodeId>& f, const AttrAbstraction& h) {
    for (size_t u = 0; u < sol.labels.size(); ++u) {
        NodeId au = f.at((NodeId)u);
        if (!(apply_h(h, sol.labels[u]) == abs_sol.labels[au])) return false;
    }
    return true;
}

bool check_fwd_equivalence(const SrpInstance& srp, const SrpInstance& abs_srp, const Solution& sol,
                           const Solution& abs_sol, const std::map<NodeId, NodeId>& f) {
    const Topology& t = srp.topo;
    const Topology& at = abs_srp.topo;

    // every concrete fwd edge must map onto an abstract fwd edge
    for (NodeId u = 0; u < t.num_nodes; ++u)
        for (EdgeIdx e : sol.fwd[u]) {
            NodeId v = t.edges[e].second;
            NodeId au = f.at(u), av = f.at(v);
            if (au == av) return false; // folded onto a single abstract node
            EdgeIdx ae = at.edge_index(au, av);
            if (ae < 0) return false;
            if (!std::binary_search(abs_sol.fwd[au].begin(), abs_sol.fwd[au].end(), ae))
                return false;
        }

    // every abstract fwd edge needs a witness at every concrete pre-image node
    std::vector<std::vector<NodeId>> preimage(at.num_nodes);
    for (const auto& [u, au] : f) preimage[au].push_back(u);
    for (NodeId au = 0; au < at.num_nodes; ++au)
        for (EdgeIdx ae : abs_sol.fwd[au]) {
            NodeId av = at.edges[ae].second;
            for (NodeId u : preimage[au]) {
                bool witness = false;
                for (EdgeIdx e : sol.fwd[u])
                    if (f.at(t.edges[e].second) == av) {
                        witness = true;
                        break;
                    }
                if (!witness) return false;
            }
        }
    return true;
}

bool check_choice_equivalence(const SrpInstance& srp, const SrpInstance& abs_srp,
                              const Solution& sol, const Solution& abs_sol,
                              const std::map<NodeId, NodeId>& f, const AttrAbstraction& h) {
    const Topology& t = srp.topo;
    const Topology& at = abs_srp.topo;

    std::vector<std::vector<std::pair<EdgeIdx, Attribute>>> abs_choices(at.num_nodes);
    for (NodeId au = 0; au < at.num_nodes; ++au)
        abs_choices[au] = choices(abs_srp, abs_sol.labels, au);

    for (NodeId u = 0; u < t.num_nodes; ++u) {
        auto cs = choices(srp, sol.labels, u);
        NodeId au = f.at(u);
        for (const auto& [e, a] : cs) {
            NodeId av = f.at(t.edges[e].second);
            if (au == av) return false;
            OptAttr ha = apply_h(h, a);
            bool found = false;
            for (const auto& [ae, aa] : abs_choices[au])
                if (at.edges[ae].second == av && OptAttr(aa) == ha) {
                    found = true;
                    break;
                }
            if (!found) return false;
        }
    }

    std::vector<std::vector<NodeId>> preimage(at.num_nodes);
    for (const auto& [u, au] : f) preimage[au].push_back(u);
    for (NodeId au = 0; au < at.num_nodes; ++au)
        for (const auto& [ae, aa] : abs_choices[au]) {
            NodeId av = at.edges[ae].second;
            for (NodeId u : preimage[au]) {
                bool found = false;
                for (const auto& [e, a] : choices(srp, sol.labels, u))
                    if (f.at(t.edges[e].second) == av && OptAttr(aa) == apply_h(h, a)) {
                        found = true;
                        break;
                    }
                if (!found) return false;
            }
        }
    return true;
}

namespace {

// Cycle in the f-image of a solution's forwarding graph (self-edges count).
std::optional<std::vector<NodeId>> image_cycle(const Topology& t, const Solution& sol,
                                               const std::map<NodeId, NodeId>& f, int num_abstract) {
    std::vector<std::set<NodeId>> succ(num_abstract);
    for (NodeId u = 0; u < t.num_nodes; ++u)
        for (EdgeIdx e : sol.fwd[u]) {
            NodeId au = f.at(u), av = f.at(t.edges[e].second);
            if (au == av) return std::vector<NodeId>{au};
            succ[au].insert(av);
        }

    std::vector<int> color(num_abstract, 0); // 0 white, 1 gray, 2 black
    std::vector<NodeId> path;
    std::optional<std::vector<NodeId>> found;
    std::function<void(NodeId)> dfs = [&](NodeId x) {
        if (found) return;
        color[x] = 1;
        path.push_back(x);
        for (NodeId y : succ[x]) {
            if (found) return;
            if (color[y] == 1) {
                auto it = std::find(path.begin(), path.end(), y);
                found = std::vector<NodeId>(it, path.end());
                return;
            }
            if (color[y] == 0) dfs(y);
        }
        path.pop_back();
        color[x] = 2;
    };
    for (NodeId x = 0; x < num_abstract && !found; ++x)
        if (color[x] == 0) dfs(x);
    return found;
}

// All copy refinements of the base map: each concrete node may land on any
// copy of its base abstract node; the refinement must cover every abstract node.
struct RefinementIter {
    std::vector<NodeId> nodes;                // nodes with > 1 option
    std::vector<std::vector<NodeId>> options; // aligned with nodes
    std::vector<size_t> odo;
    std::map<NodeId, NodeId> base;
    bool done = false;

    explicit RefinementIter(const OracleMapping& m) {
        base = m.f;
        for (const auto& [u, au] : m.f) {
            auto it = m.copy_groups.find(au);
            if (it != m.copy_groups.end() && it->second.size() > 1) {
                nodes.push_back(u);
                options.push_back(it->second);
            }
        }
        odo.assign(nodes.size(), 0);
    }

    std::map<NodeId, NodeId> current() const {
        std::map<NodeId, NodeId> f = base;
        for (size_t i = 0; i < nodes.size(); ++i) f[nodes[i]] = options[i][odo[i]];
        return f;
    }

    bool next() {
        for (size_t i = 0; i < odo.size(); ++i) {
            if (odo[i] + 1 < options[i].size()) {
                ++odo[i];
                return true;
            }
            odo[i] = 0;
        }
        done = true;
        return false;
    }
};

bool onto(const std::map<NodeId, NodeId>& f, int num_abstract) {
    std::vector<bool> hit(num_abstract, false);
    for (const auto& [u, au] : f) hit[au] = true;
    return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

} // namespace

std::optional<std::map<NodeId, NodeId>> find_matching_refinement(
    const SrpInstance& srp, const SrpInstance& abs_srp, const OracleMapping& mapping,
    const Solution& sol, const Solution& abs_sol) {
    RefinementIter it(mapping);
    for (;;) {
        std::map<NodeId, NodeId> f = it.current();
        if (onto(f, abs_srp.topo.num_nodes)) {
            AttrAbstraction h{mapping.h_kind, mapping.unused_tags, f};
            if (check_label_equivalence(sol, abs_sol, f, h) &&
                check_fwd_equivalence(srp, abs_srp, sol, abs_sol, f))
                return f;
        }
        if (!it.next()) break;
    }
    return std::nullopt;
}

OracleVerdict check_cp_equivalence(const SrpInstance& srp, const SrpInstance& abs_srp,
                                   const OracleMapping& mapping, int max_nodes) {
    OracleVerdict verdict;
    std::vector<Solution> cs = enumerate_solutions(srp, max_nodes);
    std::vector<Solution> as = enumerate_solutions(abs_srp, max_nodes);
    verdict.concrete_solutions = (int)cs.size();
    verdict.abstract_solutions = (int)as.size();

    std::vector<bool> abs_matched(as.size(), false);

    for (size_t ci = 0; ci < cs.size(); ++ci) {
        bool matched = false;
        for (size_t ai = 0; ai < as.size() && !matched; ++ai)
            if (find_matching_refinement(srp, abs_srp, mapping, cs[ci], as[ai])) {
                matched = true;
                abs_matched[ai] = true;
                verdict.matched.emplace_back((int)ci, (int)ai);
            }
        if (!matched) {
            OracleCounterexample cex;
            cex.side = "concrete-unmatched";
            cex.solution_index = (int)ci;
            auto cyc = image_cycle(srp.topo, cs[ci], mapping.f, abs_srp.topo.num_nodes);
            cex.image_has_loop = cyc.has_value();
            if (cyc) cex.loop = *cyc;
            cex.detail = "concrete stable solution " + std::to_string(ci) +
                         " has no label/fwd-equivalent abstract solution";
            verdict.counterexample = std::move(cex);
            return verdict;
        }
    }

    for (size_t ai = 0; ai < as.size(); ++ai) {
        if (abs_matched[ai]) continue;
        // the concrete pass stops at its first hit, so search this one properly
        for (size_t ci = 0; ci < cs.size() && !abs_matched[ai]; ++ci)
            if (find_matching_refinement(srp, abs_srp, mapping, cs[ci], as[ai])) {
                abs_matched[ai] = true;
                verdict.matched.emplace_back((int)ci, (int)ai);
            }
        if (abs_matched[ai]) continue;
        // identity map on the abstract side for loop reporting
        std::map<NodeId, NodeId> id;
        for (NodeId x = 0; x < abs_srp.topo.num_nodes; ++x) id[x] = x;
        OracleCounterexample cex;
        cex.side = "abstract-unmatched";
        cex.solution_index = (int)ai;
        auto cyc = image_cycle(abs_srp.topo, as[ai], id, abs_srp.topo.num_nodes);
        cex.image_has_loop = cyc.has_value();
        if (cyc) cex.loop = *cyc;
        cex.detail = "abstract stable solution " + std::to_string(ai) +
                     " is not realized by any concrete stable solution";
        verdict.counterexample = std::move(cex);
        return verdict;
    }

    verdict.equivalent = true;
    return verdict;
}

} // namespace cpcomp
