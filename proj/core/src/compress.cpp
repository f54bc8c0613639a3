#include "cpcomp/compress.hpp"

#include <algorithm>
#include <sstream>

#include "cpcomp/errors.hpp"
#include "cpcomp/srp.hpp"
#include "json.hpp"

namespace cpcomp {

using json = nlohmann::ordered_json;

Partition::Partition(int num_nodes) {
    block_of_.assign(num_nodes, 0);
    std::vector<NodeId> all(num_nodes);
    for (int i = 0; i < num_nodes; ++i) all[i] = i;
    blocks_[0] = std::move(all);
    next_id_ = 1;
}

const std::vector<NodeId>& Partition::members(BlockId b) const { return blocks_.at(b); }

std::vector<BlockId> Partition::block_ids() const {
    std::vector<BlockId> out;
    out.reserve(blocks_.size());
    for (const auto& [id, m] : blocks_) out.push_back(id);
    return out;
}

std::vector<BlockId> Partition::split(BlockId b, const std::vector<std::vector<NodeId>>& groups) {
    if (groups.size() <= 1) return {};
    // the largest group (ties: smallest node) keeps the id
    size_t keep = 0;
    for (size_t i = 1; i < groups.size(); ++i) {
        if (groups[i].size() > groups[keep].size() ||
            (groups[i].size() == groups[keep].size() && groups[i].front() < groups[keep].front()))
            keep = i;
    }
    std::vector<BlockId> fresh;
    for (size_t i = 0; i < groups.size(); ++i) {
        BlockId id = b;
        if (i != keep) {
            id = next_id_++;
            fresh.push_back(id);
        }
        std::vector<NodeId> m = groups[i];
        std::sort(m.begin(), m.end());
        for (NodeId u : m) block_of_[u] = id;
        blocks_[id] = std::move(m);
    }
    ++generation_;
    return fresh;
}

BlockId Partition::isolate(BlockId b, const std::vector<NodeId>& subset) {
    if (subset.empty() || subset.size() >= blocks_.at(b).size()) return b;
    std::vector<NodeId> in = subset, rest;
    std::sort(in.begin(), in.end());
    for (NodeId u : blocks_.at(b))
        if (!std::binary_search(in.begin(), in.end(), u)) rest.push_back(u);
    split(b, {in, rest});
    return block_of_[in.front()];
}

namespace {

std::vector<SpecClause> sanitize_clauses(const std::vector<SpecClause>& clauses,
                                         const std::set<Community>& unused) {
    std::vector<SpecClause> out = clauses;
    for (auto& cl : out) {
        auto drop = [&](std::vector<Community>& v) {
            v.erase(std::remove_if(v.begin(), v.end(),
                                   [&](Community c) { return unused.count(c) != 0; }),
                    v.end());
        };
        drop(cl.add_community);
        drop(cl.delete_community);
        // matches over unused tags cannot exist: unused = never matched
    }
    return out;
}

} // namespace

namespace {

// Content key for one compiled half so equal stages compile once; a mesh has
// thousands of edges but only a handful of distinct programs.
std::vector<uint64_t> stage_key(const std::vector<SpecClause>& clauses, bool present, bool deny) {
    std::vector<uint64_t> key{(uint64_t)present << 1 | (uint64_t)deny};
    for (const SpecClause& cl : clauses) {
        key.push_back(0x100 | cl.permit);
        for (Community c : cl.match_community) key.push_back(0x200000000ull | c);
        for (Community c : cl.add_community) key.push_back(0x300000000ull | c);
        for (Community c : cl.delete_community) key.push_back(0x400000000ull | c);
        if (cl.set_local_pref) key.push_back(0x500000000ull | *cl.set_local_pref);
    }
    return key;
}

} // namespace

CompressContext make_compress_context(const SpecializedSpec& sp) {
    CompressContext ctx;
    ctx.sp = &sp;
    ctx.layout = make_layout(sp);
    ctx.mgr = std::make_shared<BddManager>(ctx.layout.total_vars());

    std::set<Community> unused = sp.unused_communities();
    std::map<std::vector<uint64_t>, BddManager::Ref> cache;
    auto compiled = [&](const std::vector<SpecClause>& raw, bool present, bool deny) {
        std::vector<SpecClause> clauses = sanitize_clauses(raw, unused);
        std::vector<uint64_t> key = stage_key(clauses, present, deny);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        BddManager::Ref ref =
            compile_pipeline(*ctx.mgr, ctx.layout, {PipelineStage{&clauses, present}}, deny).ref;
        cache.emplace(std::move(key), ref);
        return ref;
    };

    ctx.neutral_rel = compiled({}, false, false);
    ctx.esig.resize(sp.topo.edges.size());
    for (size_t e = 0; e < sp.topo.edges.size(); ++e) {
        const EdgeProgram& prog = sp.programs[e];
        EdgeSig& sig = ctx.esig[e];
        sig.import_rel = compiled(prog.import_clauses, prog.import_present, prog.acl_deny);
        sig.export_rel = compiled(prog.export_clauses, prog.export_present, false);
        sig.ospf_cost = prog.ospf_cost;
        sig.ospf_area = prog.ospf_area;
        sig.static_present = prog.static_present;
    }
    return ctx;
}

std::set<uint32_t> block_prefs(const SpecializedSpec& sp, const std::vector<NodeId>& members) {
    std::set<uint32_t> out;
    for (NodeId u : members) out.insert(sp.node_prefs[u].begin(), sp.node_prefs[u].end());
    return out;
}

namespace {

// (direction, signature, neighbor): the per-node view refine groups by.
struct SigRecord {
    int dir; // 0 = out, 1 = in
    EdgeSig sig;
    int64_t neighbor; // block id, or ~node id at concrete granularity
    friend auto operator<=>(const SigRecord&, const SigRecord&) = default;
};

struct GranularityCache {
    const CompressContext& ctx;
    const Partition& part;
    std::map<BlockId, bool> multi;

    bool node_level(NodeId x) {
        BlockId b = part.block_of(x);
        auto it = multi.find(b);
        if (it == multi.end()) {
            bool m = block_prefs(*ctx.sp, part.members(b)).size() > 1;
            it = multi.emplace(b, m).first;
        }
        return it->second;
    }

    int64_t name(NodeId x) { return node_level(x) ? ~(int64_t)x : (int64_t)part.block_of(x); }
};

std::vector<SigRecord> node_signature(const CompressContext& ctx, const Partition& part,
                                      GranularityCache& gran, NodeId u) {
    const Topology& t = ctx.sp->topo;
    std::vector<SigRecord> recs;
    for (EdgeIdx e : t.out_edges[u]) {
        NodeId v = t.edges[e].second;
        if (part.block_of(v) == part.block_of(u)) continue; // intra-block edges are exempt
        recs.push_back({0, ctx.esig[e], gran.name(v)});
    }
    for (EdgeIdx e : t.in_edges[u]) {
        NodeId w = t.edges[e].first;
        if (part.block_of(w) == part.block_of(u)) continue;
        recs.push_back({1, ctx.esig[e], gran.name(w)});
    }
    std::sort(recs.begin(), recs.end());
    recs.erase(std::unique(recs.begin(), recs.end()), recs.end());
    return recs;
}

} // namespace

int refine(const CompressContext& ctx, Partition& partition, BlockId block) {
    const auto& members = partition.members(block);
    if (members.size() <= 1) return 0;

    GranularityCache gran{ctx, partition, {}};
    std::map<std::vector<SigRecord>, std::vector<NodeId>> groups;
    for (NodeId u : members) groups[node_signature(ctx, partition, gran, u)].push_back(u);
    if (groups.size() <= 1) return 0;

    std::vector<std::vector<NodeId>> parts;
    parts.reserve(groups.size());
    for (auto& [sig, g] : groups) parts.push_back(std::move(g));
    return (int)partition.split(block, parts).size();
}

int AbstractionMap::num_abstract_nodes() const {
    int n = partition.num_blocks();
    for (const auto& [b, k] : copies) n += k - 1;
    return n;
}

namespace {

// Abstract directed edges with their concrete witnesses.
struct AbstractEdges {
    // (block A, block B) -> all concrete directed edges (a, b)
    std::map<std::pair<BlockId, BlockId>, std::vector<EdgeIdx>> edges;
};

AbstractEdges collect_abstract_edges(const CompressContext& ctx, const Partition& part) {
    AbstractEdges out;
    const Topology& t = ctx.sp->topo;
    for (size_t e = 0; e < t.edges.size(); ++e) {
        BlockId a = part.block_of(t.edges[e].first), b = part.block_of(t.edges[e].second);
        if (a == b) continue;
        out.edges[{a, b}].push_back((EdgeIdx)e);
    }
    return out;
}

// BGP ranks routes by preference and path length only, so routes with
// different content can tie. When such ties reach a block over different
// abstract edges, members are free to settle on different picks and no single
// abstract label covers the block (copies don't help: they only absorb
// preference diversity, and a block with as many copies as members is exempt
// because each member then answers for its own copy). Detect the situation on
// a synthetic copy graph of the tentative partition and report an offender.
BlockId bgp_tie_hazard(const CompressContext& ctx, const Partition& part, NodeId dest) {
    const SpecializedSpec& sp = *ctx.sp;
    BlockId dest_block = part.block_of(dest);

    std::map<BlockId, int> ncopies;
    std::map<BlockId, NodeId> slot0; // block -> dense id of its first copy
    std::vector<BlockId> block_of_slot;
    for (BlockId b : part.block_ids()) {
        const auto& m = part.members(b);
        int k = 1;
        if (b != dest_block)
            k = std::max(1, std::min((int)block_prefs(sp, m).size(), (int)m.size()));
        ncopies[b] = k;
        slot0[b] = (NodeId)block_of_slot.size();
        block_of_slot.insert(block_of_slot.end(), k, b);
    }

    SpecializedSpec g;
    g.protocol = sp.protocol;
    g.node_names.assign(block_of_slot.size(), "");
    g.node_asn.assign(block_of_slot.size(), 0);
    g.node_prefs.assign(block_of_slot.size(), {});
    std::vector<std::pair<std::pair<NodeId, NodeId>, EdgeIdx>> recs;
    for (const auto& [ab, es] : collect_abstract_edges(ctx, part).edges)
        for (int ca = 0; ca < ncopies[ab.first]; ++ca)
            for (int cb = 0; cb < ncopies[ab.second]; ++cb)
                recs.push_back({{slot0[ab.first] + ca, slot0[ab.second] + cb}, es.front()});
    std::sort(recs.begin(), recs.end());
    g.topo.num_nodes = (int)block_of_slot.size();
    for (const auto& [uv, rep] : recs) {
        g.topo.edges.push_back(uv);
        g.programs.push_back(sp.programs[rep]);
    }
    g.topo.build_adjacency();

    SrpInstance srp = g.make_srp(slot0[dest_block]);
    auto cand = candidate_attrs(srp);

    // Compare choices the way the concrete side would see them through h:
    // copies folded back together, unused tags gone.
    std::set<Community> unused = sp.unused_communities();
    auto fold = [&](const Attribute& a) {
        BgpAttr f = std::get<BgpAttr>(a);
        for (NodeId& n : f.as_path) n = slot0[block_of_slot[n]];
        if (!unused.empty())
            std::erase_if(f.communities, [&](Community c) { return unused.count(c) > 0; });
        return Attribute{f};
    };

    for (BlockId b : part.block_ids()) {
        if ((int)part.members(b).size() <= ncopies[b]) continue;
        NodeId a0 = slot0[b]; // copies share programs and neighbors; one suffices
        std::vector<std::pair<EdgeIdx, Attribute>> pool;
        for (EdgeIdx e : g.topo.out_edges[a0])
            for (const Attribute& l : cand[g.topo.edges[e].second])
                if (OptAttr t = srp.transfer(e, l)) pool.push_back({e, fold(*t)});
        for (size_t i = 0; i < pool.size(); ++i)
            for (size_t j = i + 1; j < pool.size(); ++j)
                if (pool[i].first != pool[j].first && !(pool[i].second == pool[j].second) &&
                    attrs_tied(pool[i].second, pool[j].second))
                    return b;
    }
    return -1;
}

} // namespace

AbstractionMap find_abstraction(const CompressContext& ctx, NodeId dest) {
    const SpecializedSpec& sp = *ctx.sp;
    AbstractionMap map;
    map.partition = Partition(sp.topo.num_nodes);
    map.dest = dest;

    BlockId d_block = map.partition.isolate(0, {dest});

    auto refine_to_fixpoint = [&]() {
        for (;;) {
            bool changed = false;
            for (BlockId b : map.partition.block_ids())
                if (refine(ctx, map.partition, b) > 0) changed = true;
            ++map.refine_iterations;
            if (!changed) break;
        }
    };
    refine_to_fixpoint();

    // Edges inside a block vanish from the abstract net, so anything they do
    // must not matter: static routes always do, and a BGP policy can promote
    // an internal route past the block's external ones (RIP/OSPF internal
    // hops only lengthen a route and can never win). Peel members until every
    // internal edge is inert.
    auto intra_hazard = [&](EdgeIdx e) {
        const EdgeSig& s = ctx.esig[e];
        if (sp.protocol == Protocol::Static) return s.static_present;
        if (sp.protocol == Protocol::Bgp)
            return s.static_present || s.import_rel != ctx.neutral_rel ||
                   s.export_rel != ctx.neutral_rel;
        return false;
    };
    if (sp.protocol == Protocol::Static || sp.protocol == Protocol::Bgp) {
        for (;;) {
            BlockId bad = -1;
            for (BlockId b : map.partition.block_ids()) {
                for (NodeId u : map.partition.members(b)) {
                    for (EdgeIdx e : sp.topo.out_edges[u]) {
                        NodeId v = sp.topo.edges[e].second;
                        if (map.partition.block_of(v) == b && intra_hazard(e)) {
                            bad = b;
                            break;
                        }
                    }
                    if (bad >= 0) break;
                }
                if (bad >= 0) break;
            }
            if (bad < 0) break;
            map.partition.isolate(bad, {map.partition.members(bad).front()});
            refine_to_fixpoint();
        }
    }

    // Content-distinct rank ties arriving over different abstract edges let
    // merged members disagree; break such blocks apart until none remain.
    if (sp.protocol == Protocol::Bgp) {
        try {
            for (;;) {
                BlockId bad = bgp_tie_hazard(ctx, map.partition, dest);
                if (bad < 0) break;
                std::vector<std::vector<NodeId>> parts;
                for (NodeId u : map.partition.members(bad)) parts.push_back({u});
                map.partition.split(bad, parts);
                refine_to_fixpoint();
            }
        } catch (const InstanceTooLarge&) {
            // Candidate walk blew its budget; keep only merges we can vouch
            // for, which is none of the multi-member ones.
            std::vector<BlockId> multi;
            for (BlockId b : map.partition.block_ids())
                if (map.partition.members(b).size() > 1) multi.push_back(b);
            for (BlockId b : multi) {
                std::vector<std::vector<NodeId>> parts;
                for (NodeId u : map.partition.members(b)) parts.push_back({u});
                map.partition.split(b, parts);
            }
        }
    }

    map.dest_block = map.partition.block_of(dest);
    (void)d_block;

    bool any_multi = false;
    for (NodeId u = 0; u < sp.topo.num_nodes; ++u)
        if (sp.node_prefs[u].size() > 1) any_multi = true;
    map.mode = (sp.protocol == Protocol::Bgp && any_multi) ? AbstractionMode::ForallForall
                                                           : AbstractionMode::ForallExists;

    if (sp.protocol == Protocol::Bgp) {
        for (BlockId b : map.partition.block_ids()) {
            if (b == map.dest_block) continue; // the destination never case-splits
            const auto& m = map.partition.members(b);
            int p = (int)block_prefs(sp, m).size();
            int k = std::min(p, (int)m.size());
            if (k >= 2) map.copies[b] = k;
        }
    }

    if (sp.protocol == Protocol::Bgp) {
        map.h.kind = sp.unused_communities().empty() ? AttrAbstraction::Kind::BgpPathRename
                                                     : AttrAbstraction::Kind::BgpDropUnusedTags;
        map.h.unused_tags = sp.unused_communities();
    } else {
        map.h.kind = AttrAbstraction::Kind::Identity;
    }
    for (NodeId u = 0; u < sp.topo.num_nodes; ++u)
        map.h.node_map[u] = (NodeId)map.partition.block_of(u);
    return map;
}

namespace {

Certificates run_checks(const CompressContext& ctx, const AbstractionMap& map, bool bgp_mode) {
    const SpecializedSpec& sp = *ctx.sp;
    const Partition& part = map.partition;
    Certificates certs;
    auto pass = [&](const std::string& name) { certs.passed.push_back(name); };
    auto violate = [&](const std::string& check, const std::string& detail) {
        certs.violations.push_back({check, detail});
    };

    // dest-singleton
    if (part.members(map.dest_block).size() == 1 &&
        part.members(map.dest_block).front() == map.dest)
        pass("dest-singleton");
    else
        violate("dest-singleton", "destination shares its block");

    AbstractEdges ae = collect_abstract_edges(ctx, part);

    // trans-equivalence: one signature per abstract directed edge
    bool trans_ok = true;
    for (const auto& [key, edges] : ae.edges) {
        for (EdgeIdx e : edges)
            if (!(ctx.esig[e] == ctx.esig[edges.front()])) {
                trans_ok = false;
                violate("trans-equivalence",
                        "blocks " + std::to_string(key.first) + "->" + std::to_string(key.second) +
                            " carry unequal edge programs");
                break;
            }
    }
    if (trans_ok) pass("trans-equivalence");

    // topology quantifiers
    std::map<BlockId, bool> multi;
    for (BlockId b : part.block_ids())
        multi[b] = block_prefs(sp, part.members(b)).size() > 1;

    bool fe_ok = true, ff_ok = true, ff_used = false;
    for (const auto& [key, edges] : ae.edges) {
        auto [A, B] = key;
        bool want_ff = bgp_mode && (multi[A] || multi[B]);
        std::set<NodeId> a_with;
        std::set<std::pair<NodeId, NodeId>> pairs;
        for (EdgeIdx e : edges) {
            a_with.insert(sp.topo.edges[e].first);
            pairs.insert(sp.topo.edges[e]);
        }
        if (want_ff) {
            ff_used = true;
            size_t need = part.members(A).size() * part.members(B).size();
            if (pairs.size() != need) {
                ff_ok = false;
                violate("forall-forall", "blocks " + std::to_string(A) + "->" + std::to_string(B) +
                                             " are not fully connected");
            }
        } else if (a_with.size() != part.members(A).size()) {
            fe_ok = false;
            violate("forall-exists", "some node of block " + std::to_string(A) +
                                         " lacks an edge into block " + std::to_string(B));
        }
    }
    if (fe_ok) pass("forall-exists");
    if (ff_used && ff_ok) pass("forall-forall");

    // rank-equivalence: preference structure is uniform inside each block
    bool rank_ok = true;
    for (BlockId b : part.block_ids()) {
        const auto& m = part.members(b);
        for (NodeId u : m)
            if (sp.node_prefs[u] != sp.node_prefs[m.front()]) {
                rank_ok = false;
                violate("rank-equivalence", "block " + std::to_string(b) + " mixes preference sets");
                break;
            }
    }
    if (rank_ok) pass("rank-equivalence");

    if (bgp_mode) {
        bool split_ok = true;
        for (BlockId b : part.block_ids()) {
            const auto& m = part.members(b);
            int p = (int)block_prefs(sp, m).size();
            int want = b == map.dest_block ? 1 : std::min(p, (int)m.size());
            int have = map.copies.count(b) ? map.copies.at(b) : 1;
            if (want < 2) want = 1;
            if (have != want) {
                split_ok = false;
                violate("case-split", "block " + std::to_string(b) + " expected " +
                                          std::to_string(want) + " copies, has " +
                                          std::to_string(have));
            }
        }
        if (split_ok) pass("case-split");
    }
    return certs;
}

} // namespace

Certificates check_effective(const CompressContext& ctx, const AbstractionMap& map) {
    return run_checks(ctx, map, false);
}

Certificates check_bgp_effective(const CompressContext& ctx, const AbstractionMap& map) {
    return run_checks(ctx, map, true);
}

namespace {

std::string copy_name(const std::string& base, int copy, int copies) {
    if (copies <= 1) return base;
    return base + "#" + std::to_string(copy + 1);
}

} // namespace

AbstractNetwork build_abstract_network(const NetworkSpec& original, const CompressContext& ctx,
                                       const AbstractionMap& map) {
    const SpecializedSpec& sp = *ctx.sp;
    const Partition& part = map.partition;

    AbstractNetwork abs;
    abs.h = map.h;
    abs.ec_prefix = sp.ec.representative;
    abs.dest = sp.node_names[map.dest];
    abs.concrete_nodes = sp.topo.num_nodes;
    abs.concrete_edges = (int)sp.topo.edges.size() / 2;
    abs.certificates = map.mode == AbstractionMode::ForallForall ? check_bgp_effective(ctx, map)
                                                                 : check_effective(ctx, map);

    // Names: lowest concrete member, suffixed per copy.
    std::map<BlockId, std::string> base_name;
    std::map<BlockId, int> ncopies;
    for (BlockId b : part.block_ids()) {
        base_name[b] = sp.node_names[part.members(b).front()];
        ncopies[b] = map.copies.count(b) ? map.copies.at(b) : 1;
    }

    std::map<std::pair<BlockId, int>, std::string> node_name;
    for (BlockId b : part.block_ids())
        for (int c = 0; c < ncopies[b]; ++c) {
            std::string name = copy_name(base_name[b], c, ncopies[b]);
            node_name[{b, c}] = name;
            abs.abstract_node_names.push_back(name);
        }
    std::sort(abs.abstract_node_names.begin(), abs.abstract_node_names.end());
    abs.abstract_nodes = (int)abs.abstract_node_names.size();

    for (NodeId u = 0; u < sp.topo.num_nodes; ++u)
        abs.f[sp.node_names[u]] = node_name.at({part.block_of(u), 0});
    for (BlockId b : part.block_ids())
        if (ncopies[b] > 1) {
            std::vector<std::string>& g = abs.copy_groups[node_name.at({b, 0})];
            for (int c = 0; c < ncopies[b]; ++c) g.push_back(node_name.at({b, c}));
        }

    NetworkSpec& out = abs.spec;
    const NodeRecord& proto_sample = original.nodes.front();
    for (BlockId b : part.block_ids())
        for (int c = 0; c < ncopies[b]; ++c) {
            NodeRecord rec;
            rec.id = node_name.at({b, c});
            NodeId lowest = part.members(b).front();
            rec.asn = sp.node_asn[lowest];
            rec.protocols = proto_sample.protocols;
            out.nodes.push_back(rec);
        }
    std::sort(out.nodes.begin(), out.nodes.end(),
              [](const NodeRecord& a, const NodeRecord& b) { return a.id < b.id; });

    // Policies are emitted from the sanitized specialized programs; identical
    // clause lists share one policy id, assigned in edge iteration order.
    std::set<Community> unused = sp.unused_communities();
    std::map<std::string, std::string> policy_ids; // serialized clauses -> id
    auto policy_for = [&](const std::vector<SpecClause>& raw) -> std::string {
        std::vector<SpecClause> clauses = sanitize_clauses(raw, unused);
        std::ostringstream key;
        for (const auto& cl : clauses) {
            key << (cl.permit ? "P" : "D") << "|m";
            for (Community c : cl.match_community) key << c << ",";
            key << "|a";
            for (Community c : cl.add_community) key << c << ",";
            key << "|d";
            for (Community c : cl.delete_community) key << c << ",";
            key << "|l" << (cl.set_local_pref ? (int64_t)*cl.set_local_pref : -1) << ";";
        }
        auto it = policy_ids.find(key.str());
        if (it != policy_ids.end()) return it->second;
        std::string id = "p" + std::to_string(policy_ids.size() + 1);
        policy_ids.emplace(key.str(), id);
        RoutePolicy pol;
        for (const auto& cl : clauses) {
            PolicyClause pc;
            pc.match_community = cl.match_community;
            pc.permit = cl.permit;
            pc.add_community = cl.add_community;
            pc.delete_community = cl.delete_community;
            pc.set_local_pref = cl.set_local_pref;
            pol.push_back(std::move(pc));
        }
        out.policies[id] = std::move(pol);
        return id;
    };

    AbstractEdges ae = collect_abstract_edges(ctx, part);
    bool used_deny_acl = false;

    // Undirected abstract links: blocks A < B with any concrete edge.
    std::set<std::pair<BlockId, BlockId>> links;
    for (const auto& [key, edges] : ae.edges)
        links.insert({std::min(key.first, key.second), std::max(key.first, key.second)});

    int undirected = 0;
    for (const auto& [A, B] : links) {
        // representative concrete directed edges, one per direction
        EdgeIdx eab = ae.edges.at({A, B}).front(); // (a, b): a hears from b
        EdgeIdx eba = ae.edges.at({B, A}).front();
        const EdgeProgram& pab = sp.programs[eab];
        const EdgeProgram& pba = sp.programs[eba];

        for (int ca = 0; ca < ncopies[A]; ++ca)
            for (int cb = 0; cb < ncopies[B]; ++cb) {
                EdgeRecord rec;
                rec.a = node_name.at({A, ca});
                rec.b = node_name.at({B, cb});
                rec.ospf_cost = pab.ospf_cost;
                rec.ospf_area = pab.ospf_area;

                // if_xy holds x's side: import toward the peer + acl; export toward peer.
                InterfaceCfg side_a, side_b;
                if (pab.import_present) side_a.import_policy = policy_for(pab.import_clauses);
                if (pba.export_present) side_a.export_policy = policy_for(pba.export_clauses);
                if (pab.acl_deny) {
                    side_a.acl = "deny_all";
                    used_deny_acl = true;
                }
                if (pba.import_present) side_b.import_policy = policy_for(pba.import_clauses);
                if (pab.export_present) side_b.export_policy = policy_for(pab.export_clauses);
                if (pba.acl_deny) {
                    side_b.acl = "deny_all";
                    used_deny_acl = true;
                }
                if (rec.b < rec.a) {
                    std::swap(rec.a, rec.b);
                    std::swap(side_a, side_b);
                }
                rec.if_ab = side_a;
                rec.if_ba = side_b;
                out.edges.push_back(std::move(rec));
                ++undirected;

                if (pab.static_present) {
                    out.static_routes[node_name.at({A, ca})].push_back(
                        {sp.ec.representative, node_name.at({B, cb})});
                }
                if (pba.static_present) {
                    out.static_routes[node_name.at({B, cb})].push_back(
                        {sp.ec.representative, node_name.at({A, ca})});
                }
            }
    }
    abs.abstract_edges = undirected;
    std::sort(out.edges.begin(), out.edges.end(), [](const EdgeRecord& x, const EdgeRecord& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });

    if (used_deny_acl) out.acls["deny_all"] = {AclEntry{Prefix{0, 0}, false}};

    out.origins[node_name.at({map.dest_block, 0})] = sp.ec.prefixes;
    return abs;
}

std::string emit_mapping_sidecar(const AbstractNetwork& abs) {
    json doc = json::object();
    doc["version"] = kSchemaVersion;
    doc["type"] = "mapping";
    doc["dest"] = abs.dest;
    doc["ec_prefix"] = format_prefix(abs.ec_prefix);
    doc["abstract_nodes"] = abs.abstract_node_names;
    json f = json::object();
    for (const auto& [k, v] : abs.f) f[k] = v;
    doc["f"] = std::move(f);
    json groups = json::object();
    for (const auto& [k, v] : abs.copy_groups) groups[k] = v;
    doc["copy_groups"] = std::move(groups);

    json h = json::object();
    switch (abs.h.kind) {
        case AttrAbstraction::Kind::Identity: h["kind"] = "identity"; break;
        case AttrAbstraction::Kind::BgpPathRename: h["kind"] = "bgp_path_rename"; break;
        case AttrAbstraction::Kind::BgpDropUnusedTags: h["kind"] = "bgp_drop_unused_tags"; break;
    }
    json tags = json::array();
    for (Community c : abs.h.unused_tags) tags.push_back(format_community(c));
    h["unused_tags"] = std::move(tags);
    doc["h"] = std::move(h);

    json certs = json::object();
    certs["passed"] = abs.certificates.passed;
    json viols = json::array();
    for (const auto& v : abs.certificates.violations) {
        json rec = json::object();
        rec["check"] = v.check;
        rec["detail"] = v.detail;
        viols.push_back(std::move(rec));
    }
    certs["violations"] = std::move(viols);
    doc["certificates"] = std::move(certs);

    json sizes = json::object();
    sizes["concrete_nodes"] = abs.concrete_nodes;
    sizes["concrete_edges"] = abs.concrete_edges;
    sizes["abstract_nodes"] = abs.abstract_nodes;
    sizes["abstract_edges"] = abs.abstract_edges;
    doc["sizes"] = std::move(sizes);
    return doc.dump(2) + "\n";
}

MappingSidecar parse_mapping_sidecar(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("mapping", e.what());
    }
    if (!doc.is_object() || !doc.contains("version") || doc["version"] != kSchemaVersion)
        throw ParseError("mapping", "bad or missing version");
    if (!doc.contains("type") || doc["type"] != "mapping")
        throw ParseError("mapping", "not a mapping document");
    if (!doc.contains("certificates")) throw CertificateMissing("mapping has no certificates block");
    for (const char* key : {"abstract_nodes", "f", "h", "ec_prefix", "dest"})
        if (!doc.contains(key)) throw ParseError("mapping", std::string("missing field '") + key + "'");

    MappingSidecar side;
    for (const auto& n : doc["abstract_nodes"]) side.abstract_nodes.push_back(n.get<std::string>());
    for (auto it = doc["f"].begin(); it != doc["f"].end(); ++it)
        side.f[it.key()] = it.value().get<std::string>();
    if (doc.contains("copy_groups"))
        for (auto it = doc["copy_groups"].begin(); it != doc["copy_groups"].end(); ++it)
            side.copy_groups[it.key()] = it.value().get<std::vector<std::string>>();
    std::string kind = doc["h"]["kind"].get<std::string>();
    if (kind == "identity")
        side.h_kind = AttrAbstraction::Kind::Identity;
    else if (kind == "bgp_path_rename")
        side.h_kind = AttrAbstraction::Kind::BgpPathRename;
    else if (kind == "bgp_drop_unused_tags")
        side.h_kind = AttrAbstraction::Kind::BgpDropUnusedTags;
    else
        throw ParseError("mapping.h.kind", "unknown kind '" + kind + "'");
    for (const auto& t : doc["h"]["unused_tags"])
        side.unused_tags.insert(parse_community(t.get<std::string>()));
    side.ec_prefix = parse_prefix(doc["ec_prefix"].get<std::string>());
    side.dest = doc["dest"].get<std::string>();
    return side;
}

} // namespace cpcomp
