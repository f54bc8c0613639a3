#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "cpcomp/compress.hpp"
#include "cpcomp/dest_ecs.hpp"
#include "cpcomp/equiv_oracle.hpp"
#include "cpcomp/errors.hpp"
#include "cpcomp/properties.hpp"
#include "cpcomp/srp.hpp"
#include "cpcomp/topo_gen.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace cpcomp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path.string(), "cannot open file for writing");
    out << text;
}

std::string prefix_slug(const Prefix& p) {
    std::string s = format_prefix(p);
    for (char& c : s)
        if (c == '/') c = '-';
    return s;
}

// The class a query prefix belongs to (or that it fully covers).
std::vector<int> select_ecs(const std::vector<DestEquivClass>& ecs, const Prefix& q) {
    std::vector<int> out;
    for (int i = 0; i < (int)ecs.size(); i++)
        for (const Prefix& r : ecs[i].prefixes)
            if (r.contains(q) || q.contains(r)) {
                out.push_back(i);
                break;
            }
    return out;
}

NodeId dense_id(const std::vector<std::string>& names, const std::string& id) {
    auto it = std::lower_bound(names.begin(), names.end(), id);
    if (it == names.end() || *it != id) throw DanglingReference(id, "node lookup");
    return (NodeId)(it - names.begin());
}

std::string ratio(int concrete, int abstract_) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(1)
       << (abstract_ > 0 ? (double)concrete / abstract_ : 0.0) << "x";
    return ss.str();
}

std::string describe_solution(const SrpInstance& srp, const Solution& sol,
                              const std::vector<std::string>& names) {
    std::ostringstream ss;
    for (NodeId u = 0; u < srp.topo.num_nodes; u++) {
        ss << "  " << names[u] << ": " << format_attr(sol.labels[u], names);
        if (!sol.fwd[u].empty()) {
            ss << " via";
            for (EdgeIdx e : sol.fwd[u]) ss << " " << names[srp.topo.edges[e].second];
        }
        ss << "\n";
    }
    return ss.str();
}

ordered_json solution_json(const SrpInstance& srp, const Solution& sol,
                           const std::vector<std::string>& names) {
    ordered_json labels = ordered_json::object();
    ordered_json fwd = ordered_json::object();
    for (NodeId u = 0; u < srp.topo.num_nodes; u++) {
        labels[names[u]] = format_attr(sol.labels[u], names);
        std::vector<std::string> next;
        for (EdgeIdx e : sol.fwd[u]) next.push_back(names[srp.topo.edges[e].second]);
        fwd[names[u]] = next;
    }
    return ordered_json{{"labels", std::move(labels)}, {"fwd", std::move(fwd)}};
}

struct EcJob {
    int ec_index = 0;
    std::string dest;
};

struct EcResult {
    std::string line;        // human report
    ordered_json record;     // machine report
    fs::path abstract_path, map_path;
    std::string abstract_text, map_text;
    std::vector<Violation> violations;
    std::string error; // non-empty = job crashed
};

int run_compress(const std::string& spec_path, const std::string& ec_arg, int jobs,
                 const std::string& out_dir, bool json_out) {
    NetworkSpec spec = parse_network_spec(read_file(spec_path));
    std::vector<DestEquivClass> ecs = compute_ecs(spec);

    std::vector<int> selected(ecs.size());
    for (size_t i = 0; i < ecs.size(); i++) selected[i] = (int)i;
    if (!ec_arg.empty()) {
        selected = select_ecs(ecs, parse_prefix(ec_arg));
        if (selected.empty()) throw ParseError(ec_arg, "no destination class covers this prefix");
    }

    std::vector<EcJob> work;
    for (int i : selected)
        for (const std::string& dest : ecs[i].dest_nodes) work.push_back({i, dest});

    std::string stem = fs::path(spec_path).stem().string();
    fs::path dir(out_dir);
    fs::create_directories(dir);

    std::vector<EcResult> results(work.size());
    auto run_job = [&](size_t j) {
        EcResult& r = results[j];
        try {
            const DestEquivClass& ec = ecs[work[j].ec_index];
            SpecializedSpec sp = specialize_spec(spec, ec);
            CompressContext ctx = make_compress_context(sp);
            NodeId dest = dense_id(sp.node_names, work[j].dest);
            AbstractionMap map = find_abstraction(ctx, dest);
            AbstractNetwork abs = build_abstract_network(spec, ctx, map);

            std::string tag = prefix_slug(ec.representative);
            if (ec.dest_nodes.size() > 1) tag += "." + work[j].dest;
            r.abstract_path = dir / (stem + "." + tag + ".abstract.json");
            r.map_path = dir / (stem + "." + tag + ".map.json");
            r.abstract_text = emit_network_spec(abs.spec);
            r.map_text = emit_mapping_sidecar(abs);
            r.violations = abs.certificates.violations;

            std::ostringstream line;
            line << "ec " << format_prefix(ec.representative) << " dest " << work[j].dest << ": "
                 << abs.concrete_nodes << " nodes / " << abs.concrete_edges << " edges -> "
                 << abs.abstract_nodes << " / " << abs.abstract_edges << " ("
                 << ratio(abs.concrete_nodes, abs.abstract_nodes) << " nodes, "
                 << ratio(abs.concrete_edges, abs.abstract_edges) << " edges)";
            for (const Violation& v : r.violations)
                line << "\n  VIOLATION " << v.check << ": " << v.detail;
            r.line = line.str();

            r.record = ordered_json{{"ec", format_prefix(ec.representative)},
                                    {"dest", work[j].dest},
                                    {"concrete_nodes", abs.concrete_nodes},
                                    {"concrete_edges", abs.concrete_edges},
                                    {"abstract_nodes", abs.abstract_nodes},
                                    {"abstract_edges", abs.abstract_edges},
                                    {"abstract_file", r.abstract_path.string()},
                                    {"map_file", r.map_path.string()},
                                    {"violations", ordered_json::array()}};
            for (const Violation& v : r.violations)
                r.record["violations"].push_back({{"check", v.check}, {"detail", v.detail}});
        } catch (const std::exception& ex) {
            r.error = ex.what();
        }
    };

    if (jobs <= 1 || work.size() <= 1) {
        for (size_t j = 0; j < work.size(); j++) run_job(j);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        int n = std::min<int>(jobs, (int)work.size());
        for (int t = 0; t < n; t++)
            pool.emplace_back([&] {
                for (size_t j = next.fetch_add(1); j < work.size(); j = next.fetch_add(1))
                    run_job(j);
            });
        for (auto& th : pool) th.join();
    }

    // Deterministic emission: job order is EC order regardless of --jobs.
    bool violated = false;
    ordered_json report{{"version", kSchemaVersion}, {"command", "compress"}, {"results", ordered_json::array()}};
    for (EcResult& r : results) {
        if (!r.error.empty()) {
            std::cerr << "error: " << r.error << "\n";
            return kExitUsage;
        }
        write_file(r.abstract_path, r.abstract_text);
        write_file(r.map_path, r.map_text);
        if (!r.violations.empty()) violated = true;
        if (json_out)
            report["results"].push_back(std::move(r.record));
        else
            std::cout << r.line << "\n";
    }
    if (json_out) std::cout << report.dump(2) << "\n";
    return violated ? kExitViolation : kExitOk;
}

int run_check(const std::string& spec_path, const std::string& abs_path,
              const std::string& map_path, int oracle_bound, bool json_out) {
    NetworkSpec spec = parse_network_spec(read_file(spec_path));
    NetworkSpec abs_spec = parse_network_spec(read_file(abs_path));
    MappingSidecar side = parse_mapping_sidecar(read_file(map_path));

    std::vector<DestEquivClass> ecs = compute_ecs(spec);
    std::vector<int> sel = select_ecs(ecs, side.ec_prefix);
    if (sel.empty()) throw ParseError(map_path, "mapping prefix matches no destination class");
    const DestEquivClass& ec = ecs[sel.front()];

    SpecializedSpec sp = specialize_spec(spec, ec);
    NodeId dest = dense_id(sp.node_names, side.dest);

    // Rebuild the node partition the mapping describes.
    std::map<std::string, std::vector<NodeId>> by_target;
    for (NodeId u = 0; u < sp.topo.num_nodes; u++) {
        auto it = side.f.find(sp.node_names[u]);
        if (it == side.f.end()) throw DanglingReference(sp.node_names[u], "mapping f");
        by_target[it->second].push_back(u);
    }
    std::vector<std::vector<NodeId>> groups;
    for (auto& [name, members] : by_target) groups.push_back(members);

    AbstractionMap map;
    map.partition = Partition(sp.topo.num_nodes);
    map.partition.split(0, groups);
    map.dest = dest;
    map.dest_block = map.partition.block_of(dest);
    for (const auto& [base, copies] : side.copy_groups) {
        auto it = by_target.find(base);
        if (it == by_target.end()) throw DanglingReference(base, "mapping copy_groups");
        if (copies.size() > 1) map.copies[map.partition.block_of(it->second.front())] = (int)copies.size();
    }
    map.mode = sp.protocol == Protocol::Bgp && !map.copies.empty() ? AbstractionMode::ForallForall
                                                                   : AbstractionMode::ForallExists;

    CompressContext ctx = make_compress_context(sp);
    Certificates certs = sp.protocol == Protocol::Bgp ? check_bgp_effective(ctx, map)
                                                      : check_effective(ctx, map);

    ordered_json report{{"version", kSchemaVersion}, {"command", "check"}};
    for (const std::string& name : certs.passed) {
        if (!json_out) std::cout << "certificate " << name << ": pass\n";
    }
    for (const Violation& v : certs.violations)
        if (!json_out) std::cout << "certificate " << v.check << ": FAIL (" << v.detail << ")\n";
    report["certificates_passed"] = certs.passed;
    report["certificate_violations"] = ordered_json::array();
    for (const Violation& v : certs.violations)
        report["certificate_violations"].push_back({{"check", v.check}, {"detail", v.detail}});

    bool oracle_failed = false;
    if (sp.topo.num_nodes <= oracle_bound) {
        std::vector<DestEquivClass> abs_ecs = compute_ecs(abs_spec);
        std::vector<int> abs_sel = select_ecs(abs_ecs, side.ec_prefix);
        if (abs_sel.empty())
            throw ParseError(abs_path, "abstract network has no class for the mapping prefix");
        SpecializedSpec abs_sp = specialize_spec(abs_spec, abs_ecs[abs_sel.front()]);
        NodeId abs_dest = dense_id(abs_sp.node_names, side.f.at(side.dest));

        OracleMapping om;
        om.h_kind = side.h_kind;
        om.unused_tags = side.unused_tags;
        for (NodeId u = 0; u < sp.topo.num_nodes; u++)
            om.f[u] = dense_id(abs_sp.node_names, side.f.at(sp.node_names[u]));
        for (const auto& [base, copies] : side.copy_groups) {
            std::vector<NodeId>& g = om.copy_groups[dense_id(abs_sp.node_names, base)];
            for (const std::string& c : copies) g.push_back(dense_id(abs_sp.node_names, c));
        }

        SrpInstance srp = sp.make_srp(dest);
        SrpInstance abs_srp = abs_sp.make_srp(abs_dest);
        try {
            OracleVerdict v = check_cp_equivalence(srp, abs_srp, om, oracle_bound);
            report["oracle"] = ordered_json{{"ran", true},
                                            {"equivalent", v.equivalent},
                                            {"concrete_solutions", v.concrete_solutions},
                                            {"abstract_solutions", v.abstract_solutions}};
            if (v.equivalent) {
                if (!json_out)
                    std::cout << "oracle: equivalent (" << v.concrete_solutions << " concrete / "
                              << v.abstract_solutions << " abstract solutions)\n";
            } else {
                oracle_failed = true;
                const OracleCounterexample& cex = *v.counterexample;
                ordered_json jc{{"side", cex.side},
                                {"solution_index", cex.solution_index},
                                {"image_has_loop", cex.image_has_loop},
                                {"detail", cex.detail}};
                std::vector<std::string> loop_names;
                for (NodeId a : cex.loop) loop_names.push_back(abs_sp.node_names[a]);
                jc["loop"] = loop_names;
                report["oracle"]["counterexample"] = std::move(jc);
                if (!json_out) {
                    std::cout << "oracle: FAIL " << cex.side << " solution " << cex.solution_index;
                    if (cex.image_has_loop) {
                        std::cout << ", forwarding image has a loop [";
                        for (size_t i = 0; i < loop_names.size(); i++)
                            std::cout << (i ? " " : "") << loop_names[i];
                        std::cout << "]";
                    }
                    std::cout << ": " << cex.detail << "\n";
                }
            }
        } catch (const InstanceTooLarge& ex) {
            report["oracle"] = ordered_json{{"ran", false}, {"skipped", ex.what()}};
            if (!json_out) std::cout << "oracle: skipped (" << ex.what() << ")\n";
        }
    } else {
        report["oracle"] = ordered_json{{"ran", false}, {"skipped", "instance above --oracle-bound"}};
        if (!json_out) std::cout << "oracle: skipped (instance above --oracle-bound)\n";
    }

    bool ok = certs.violations.empty() && !oracle_failed;
    report["ok"] = ok;
    if (json_out) std::cout << report.dump(2) << "\n";
    if (!json_out) std::cout << (ok ? "check: ok\n" : "check: FAIL\n");
    return ok ? kExitOk : kExitViolation;
}

// Build the SRP for the class covering --ec, pinned to --dest or the class's
// first originating node.
SrpInstance srp_for_query(const NetworkSpec& spec, const std::string& ec_arg,
                          const std::string& dest_arg, SpecializedSpec& sp_out) {
    std::vector<DestEquivClass> ecs = compute_ecs(spec);
    std::vector<int> sel = select_ecs(ecs, parse_prefix(ec_arg));
    if (sel.empty()) throw ParseError(ec_arg, "no destination class covers this prefix");
    sp_out = specialize_spec(spec, ecs[sel.front()]);
    std::string dest = dest_arg.empty() ? sp_out.ec.dest_nodes.front() : dest_arg;
    return sp_out.make_srp(dense_id(sp_out.node_names, dest));
}

int run_simulate(const std::string& spec_path, const std::string& ec_arg,
                 const std::string& dest_arg, bool enumerate, bool high_tie, bool json_out) {
    NetworkSpec spec = parse_network_spec(read_file(spec_path));
    SpecializedSpec sp;
    SrpInstance srp = srp_for_query(spec, ec_arg, dest_arg, sp);

    ordered_json report{{"version", kSchemaVersion}, {"command", "simulate"},
                        {"ec", format_prefix(sp.ec.representative)}};
    if (enumerate) {
        std::vector<Solution> sols = enumerate_solutions(srp);
        report["solutions"] = ordered_json::array();
        for (size_t i = 0; i < sols.size(); i++) {
            if (json_out)
                report["solutions"].push_back(solution_json(srp, sols[i], sp.node_names));
            else
                std::cout << "solution " << i + 1 << " of " << sols.size() << ":\n"
                          << describe_solution(srp, sols[i], sp.node_names);
        }
        if (json_out) std::cout << report.dump(2) << "\n";
        if (sols.empty()) {
            if (!json_out) std::cout << "no stable solution\n";
            return kExitViolation;
        }
        return kExitOk;
    }

    auto outcome = simulate_solution(srp, high_tie ? TieBreak::HighestNeighborId
                                                   : TieBreak::LowestNeighborId);
    if (std::holds_alternative<Divergence>(outcome)) {
        int rounds = std::get<Divergence>(outcome).rounds;
        report["diverged"] = true;
        report["rounds"] = rounds;
        if (json_out)
            std::cout << report.dump(2) << "\n";
        else
            std::cout << "diverges: no stable solution after " << rounds << " rounds\n";
        return kExitViolation;
    }
    const Solution& sol = std::get<Solution>(outcome);
    if (json_out) {
        report["diverged"] = false;
        report["solution"] = solution_json(srp, sol, sp.node_names);
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "stable solution:\n" << describe_solution(srp, sol, sp.node_names);
    }
    return kExitOk;
}

int run_properties(const std::string& spec_path, const std::string& ec_arg,
                   const std::string& dest_arg, const std::string& query,
                   const std::string& from_arg, const std::string& waypoints_arg, bool json_out) {
    NetworkSpec spec = parse_network_spec(read_file(spec_path));
    SpecializedSpec sp;
    SrpInstance srp = srp_for_query(spec, ec_arg, dest_arg, sp);

    auto outcome = simulate_solution(srp);
    if (std::holds_alternative<Divergence>(outcome)) {
        std::cout << "diverges: no stable solution to query\n";
        return kExitViolation;
    }
    const Solution& sol = std::get<Solution>(outcome);
    NodeId dest = srp.topo.dest;

    std::vector<NodeId> from;
    if (!from_arg.empty()) {
        from.push_back(dense_id(sp.node_names, from_arg));
    } else {
        for (NodeId u = 0; u < srp.topo.num_nodes; u++)
            if (u != dest) from.push_back(u);
    }

    std::set<NodeId> waypoints;
    if (!waypoints_arg.empty()) {
        std::istringstream ss(waypoints_arg);
        std::string w;
        while (std::getline(ss, w, ',')) waypoints.insert(dense_id(sp.node_names, w));
    }
    if (query == "waypoint" && waypoints.empty())
        throw ParseError("--waypoints", "waypoint query needs a waypoint list");

    ordered_json report{{"version", kSchemaVersion}, {"command", "properties"},
                        {"query", query}, {"verdicts", ordered_json::object()}};
    bool violation = false;
    auto verdict = [&](const std::string& who, bool ok, const std::string& text) {
        report["verdicts"][who] = ok;
        if (!json_out) std::cout << query << " " << who << ": " << text << "\n";
        if (!ok) violation = true;
    };

    if (query == "loop") {
        std::vector<NodeId> loop = find_routing_loop(srp, sol);
        if (loop.empty()) {
            verdict("network", true, "no forwarding loop");
        } else {
            std::ostringstream ss;
            ss << "forwarding loop [";
            for (size_t i = 0; i < loop.size(); i++)
                ss << (i ? " " : "") << sp.node_names[loop[i]];
            ss << "]";
            verdict("network", false, ss.str());
        }
    } else if (query == "pathlen") {
        for (NodeId u : from) {
            std::set<int> lens = path_lengths(srp, sol, u, dest);
            std::ostringstream ss;
            ss << "lengths {";
            bool first = true;
            for (int l : lens) ss << (first ? "" : " ") << l, first = false;
            ss << "}";
            report["verdicts"][sp.node_names[u]] = std::vector<int>(lens.begin(), lens.end());
            if (!json_out) std::cout << query << " " << sp.node_names[u] << ": " << ss.str() << "\n";
        }
    } else {
        for (NodeId u : from) {
            const std::string& who = sp.node_names[u];
            if (query == "reach")
                verdict(who, reachable(srp, sol, u, dest), reachable(srp, sol, u, dest)
                        ? "reaches destination" : "does NOT reach destination");
            else if (query == "blackhole")
                verdict(who, !has_black_hole(srp, sol, u), has_black_hole(srp, sol, u)
                        ? "forwards into a black hole" : "no black hole");
            else if (query == "multipath")
                verdict(who, multipath_consistent(srp, sol, u, dest), multipath_consistent(srp, sol, u, dest)
                        ? "multipath consistent" : "multipath INCONSISTENT");
            else if (query == "waypoint")
                verdict(who, waypointed(srp, sol, u, dest, waypoints), waypointed(srp, sol, u, dest, waypoints)
                        ? "passes waypoints" : "bypasses waypoints");
            else
                throw ParseError(query, "unknown query");
        }
    }
    if (json_out) std::cout << report.dump(2) << "\n";
    return violation ? kExitViolation : kExitOk;
}

int run_gen(const std::string& kind, int size, uint64_t seed, const std::string& out_path) {
    NetworkSpec spec = generate_network(kind, size, seed);
    std::string text = emit_network_spec(spec);
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"control plane compression toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // --format may follow the subcommand
    std::string format = "text";
    app.add_option("--format", format, "report format: text or json")
        ->check(CLI::IsMember({"text", "json"}));

    auto* c = app.add_subcommand("compress", "compress a network per destination class");
    std::string c_spec, c_ec, c_out = ".";
    int c_jobs = 1;
    c->add_option("spec", c_spec, "network spec (JSON)")->required();
    c->add_option("--ec", c_ec, "only the class covering this prefix");
    c->add_option("--jobs", c_jobs, "parallel workers")->check(CLI::PositiveNumber);
    c->add_option("--out", c_out, "output directory");

    auto* k = app.add_subcommand("check", "verify an abstraction against its source network");
    std::string k_spec, k_abs, k_map;
    int k_bound = 10;
    k->add_option("spec", k_spec, "concrete network spec")->required();
    k->add_option("abstract", k_abs, "abstract network spec")->required();
    k->add_option("mapping", k_map, "mapping sidecar")->required();
    k->add_option("--oracle-bound", k_bound, "max concrete nodes for the brute-force oracle");

    auto* s = app.add_subcommand("simulate", "run the routing fixed point");
    std::string s_spec, s_ec, s_dest;
    bool s_enum = false, s_high = false;
    s->add_option("spec", s_spec, "network spec")->required();
    s->add_option("--ec", s_ec, "destination prefix")->required();
    s->add_option("--dest", s_dest, "destination node (default: the class's origin)");
    s->add_flag("--enumerate", s_enum, "enumerate all stable solutions");
    s->add_flag("--tie-high", s_high, "break ties toward the highest neighbor id");

    auto* p = app.add_subcommand("properties", "query a solution's forwarding graph");
    std::string p_spec, p_ec, p_dest, p_query, p_from, p_waypoints;
    p->add_option("spec", p_spec, "network spec")->required();
    p->add_option("--ec", p_ec, "destination prefix")->required();
    p->add_option("--dest", p_dest, "destination node");
    p->add_option("--query", p_query, "reach|pathlen|blackhole|multipath|waypoint|loop")->required();
    p->add_option("--from", p_from, "source node (default: all)");
    p->add_option("--waypoints", p_waypoints, "comma-separated waypoint nodes");

    auto* g = app.add_subcommand("gen", "generate a synthetic network spec");
    std::string g_kind, g_out;
    int g_size = 0;
    uint64_t g_seed = 0;
    g->add_option("kind", g_kind, "topology kind")->required();
    g->add_option("size", g_size, "node count / size parameter")->required();
    g->add_option("--seed", g_seed, "random seed");
    g->add_option("--out", g_out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    bool json_out = format == "json";
    try {
        if (*c) return run_compress(c_spec, c_ec, c_jobs, c_out, json_out);
        if (*k) return run_check(k_spec, k_abs, k_map, k_bound, json_out);
        if (*s) return run_simulate(s_spec, s_ec, s_dest, s_enum, s_high, json_out);
        if (*p) return run_properties(p_spec, p_ec, p_dest, p_query, p_from, p_waypoints, json_out);
        if (*g) return run_gen(g_kind, g_size, g_seed, g_out);
    } catch (const std::exception& ex) {
        if (json_out) {
            ordered_json err{{"version", kSchemaVersion}, {"error", ex.what()}};
            std::cout << err.dump(2) << "\n";
        }
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
