#include "cpcomp/properties.hpp"

#include <algorithm>
#include <functional>

namespace cpcomp {

namespace {

std::vector<NodeId> fwd_targets(const SrpInstance& srp, const Solution& sol, NodeId u) {
    std::vector<NodeId> out;
    for (EdgeIdx e : sol.fwd[u]) out.push_back(srp.topo.edges[e].second);
    return out;
}

std::vector<bool> fwd_reachable_set(const SrpInstance& srp, const Solution& sol, NodeId u) {
    std::vector<bool> seen(srp.topo.num_nodes, false);
    std::vector<NodeId> stack{u};
    seen[u] = true;
    while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        for (NodeId y : fwd_targets(srp, sol, x))
            if (!seen[y]) {
                seen[y] = true;
                stack.push_back(y);
            }
    }
    return seen;
}

} // namespace

bool reachable(const SrpInstance& srp, const Solution& sol, NodeId u, NodeId v) {
    return fwd_reachable_set(srp, sol, u)[v];
}

std::set<int> path_lengths(const SrpInstance& srp, const Solution& sol, NodeId u, NodeId v) {
    std::set<int> lens;
    std::vector<bool> on_path(srp.topo.num_nodes, false);
    std::function<void(NodeId, int)> dfs = [&](NodeId x, int depth) {
        if (x == v) {
            lens.insert(depth);
            return;
        }
        on_path[x] = true;
        for (NodeId y : fwd_targets(srp, sol, x))
            if (!on_path[y]) dfs(y, depth + 1);
        on_path[x] = false;
    };
    dfs(u, 0);
    return lens;
}

bool has_black_hole(const SrpInstance& srp, const Solution& sol, NodeId u) {
    auto seen = fwd_reachable_set(srp, sol, u);
    for (NodeId w = 0; w < srp.topo.num_nodes; ++w)
        if (seen[w] && !sol.labels[w]) return true;
    return false;
}

bool multipath_consistent(const SrpInstance& srp, const Solution& sol, NodeId u, NodeId v) {
    auto seen = fwd_reachable_set(srp, sol, u);
    if (!seen[v]) return true;
    for (NodeId w = 0; w < srp.topo.num_nodes; ++w)
        if (seen[w] && w != v && sol.fwd[w].empty()) return false; // stranded path
    return true;
}

bool waypointed(const SrpInstance& srp, const Solution& sol, NodeId u, NodeId v,
                const std::set<NodeId>& waypoints) {
    if (!reachable(srp, sol, u, v)) return true;
    if (waypoints.count(u)) return true;
    // is v reachable while avoiding every waypoint?
    std::vector<bool> seen(srp.topo.num_nodes, false);
    std::vector<NodeId> stack{u};
    seen[u] = true;
    while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        for (NodeId y : fwd_targets(srp, sol, x)) {
            if (waypoints.count(y)) continue;
            if (y == v) return false;
            if (!seen[y]) {
                seen[y] = true;
                stack.push_back(y);
            }
        }
    }
    return true;
}

std::vector<NodeId> find_routing_loop(const SrpInstance& srp, const Solution& sol) {
    int n = srp.topo.num_nodes;
    std::vector<int> color(n, 0);
    std::vector<NodeId> path;
    std::vector<NodeId> found;
    std::function<void(NodeId)> dfs = [&](NodeId x) {
        if (!found.empty()) return;
        color[x] = 1;
        path.push_back(x);
        for (NodeId y : fwd_targets(srp, sol, x)) {
            if (!found.empty()) return;
            if (color[y] == 1) {
                auto it = std::find(path.begin(), path.end(), y);
                found.assign(it, path.end());
                return;
            }
            if (color[y] == 0) dfs(y);
        }
        path.pop_back();
        color[x] = 2;
    };
    for (NodeId x = 0; x < n && found.empty(); ++x)
        if (color[x] == 0) dfs(x);
    return found;
}

bool has_routing_loop(const SrpInstance& srp, const Solution& sol) {
    return !find_routing_loop(srp, sol).empty();
}

} // namespace cpcomp
