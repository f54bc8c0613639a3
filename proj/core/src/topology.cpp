#include "cpcomp/topology.hpp"

#include <algorithm>

namespace cpcomp {

void Topology::build_adjacency() {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    out_edges.assign(num_nodes, {});
    in_edges.assign(num_nodes, {});
    for (EdgeIdx i = 0; i < (EdgeIdx)edges.size(); ++i) {
        out_edges[edges[i].first].push_back(i);
        in_edges[edges[i].second].push_back(i);
    }
}

EdgeIdx Topology::edge_index(NodeId u, NodeId v) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(u, v));
    if (it != edges.end() && *it == std::make_pair(u, v))
        return (EdgeIdx)(it - edges.begin());
    return -1;
}

} // namespace cpcomp
