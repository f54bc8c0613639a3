#pragma once

#include <utility>
#include <vector>

#include "cpcomp/net.hpp"

namespace cpcomp {

// Directed graph over dense node ids. Physical links contribute both
// directions; edge (u,v) means "u may learn a route from v / forward to v".
struct Topology {
    int num_nodes = 0;
    NodeId dest = -1;
    std::vector<std::pair<NodeId, NodeId>> edges; // sorted, unique, no self-loops
    std::vector<std::vector<EdgeIdx>> out_edges;  // per node, ascending target
    std::vector<std::vector<EdgeIdx>> in_edges;   // edges (w,u) per node u

    void build_adjacency();
    EdgeIdx edge_index(NodeId u, NodeId v) const; // -1 when absent
    bool has_edge(NodeId u, NodeId v) const { return edge_index(u, v) >= 0; }
};

} // namespace cpcomp
