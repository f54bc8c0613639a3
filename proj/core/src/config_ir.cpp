#include "cpcomp/config_ir.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "cpcomp/errors.hpp"
#include "json.hpp"

namespace cpcomp {

using json = nlohmann::ordered_json;

const char* const kSchemaVersion = "bonsai-net/1";

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& reason) {
    throw ParseError(where, reason);
}

void expect_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) fail(where, "unknown field '" + it.key() + "'");
    }
}

std::string get_string(const json& obj, const std::string& where, const char* key, bool required,
                       const std::string& def = "") {
    if (!obj.contains(key)) {
        if (required) fail(where, std::string("missing field '") + key + "'");
        return def;
    }
    if (!obj[key].is_string()) fail(where + "." + key, "expected string");
    return obj[key].get<std::string>();
}

int64_t get_int(const json& obj, const std::string& where, const char* key, bool required,
                int64_t def = 0) {
    if (!obj.contains(key)) {
        if (required) fail(where, std::string("missing field '") + key + "'");
        return def;
    }
    if (!obj[key].is_number_integer()) fail(where + "." + key, "expected integer");
    return obj[key].get<int64_t>();
}

std::vector<Prefix> get_prefix_list(const json& arr, const std::string& where) {
    if (!arr.is_array()) fail(where, "expected array of prefixes");
    std::vector<Prefix> out;
    for (const auto& v : arr) {
        if (!v.is_string()) fail(where, "expected prefix string");
        out.push_back(parse_prefix(v.get<std::string>()));
    }
    return out;
}

std::vector<Community> get_community_list(const json& arr, const std::string& where) {
    if (!arr.is_array()) fail(where, "expected array of communities");
    std::vector<Community> out;
    for (const auto& v : arr) {
        if (!v.is_string()) fail(where, "expected community string");
        out.push_back(parse_community(v.get<std::string>()));
    }
    return out;
}

InterfaceCfg parse_iface(const json& obj, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected object");
    expect_keys(obj, where, {"import", "export", "acl"});
    InterfaceCfg cfg;
    cfg.import_policy = get_string(obj, where, "import", false);
    cfg.export_policy = get_string(obj, where, "export", false);
    cfg.acl = get_string(obj, where, "acl", false);
    return cfg;
}

PolicyClause parse_clause(const json& obj, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected clause object");
    expect_keys(obj, where,
                {"match", "action", "add_community", "delete_community", "set_local_pref"});
    PolicyClause clause;
    if (obj.contains("match")) {
        const json& m = obj["match"];
        if (!m.is_object()) fail(where + ".match", "expected object");
        expect_keys(m, where + ".match", {"prefix", "community", "protocol"});
        if (m.contains("prefix")) clause.match_prefix = get_prefix_list(m["prefix"], where + ".match.prefix");
        if (m.contains("community"))
            clause.match_community = get_community_list(m["community"], where + ".match.community");
        if (m.contains("protocol")) clause.match_protocol = get_string(m, where + ".match", "protocol", true);
    }
    std::string action = get_string(obj, where, "action", true);
    if (action == "permit")
        clause.permit = true;
    else if (action == "deny")
        clause.permit = false;
    else
        fail(where + ".action", "expected 'permit' or 'deny'");
    if (obj.contains("add_community"))
        clause.add_community = get_community_list(obj["add_community"], where + ".add_community");
    if (obj.contains("delete_community"))
        clause.delete_community =
            get_community_list(obj["delete_community"], where + ".delete_community");
    if (obj.contains("set_local_pref")) {
        int64_t v = get_int(obj, where, "set_local_pref", true);
        if (v < 0 || v > 0xffffffffLL) fail(where + ".set_local_pref", "out of range");
        clause.set_local_pref = (uint32_t)v;
    }
    return clause;
}

int line_of_offset(const std::string& text, size_t offset) {
    int line = 1;
    for (size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

} // namespace

int NetworkSpec::node_index(const std::string& id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const NodeRecord& n, const std::string& s) { return n.id < s; });
    if (it != nodes.end() && it->id == id) return (int)(it - nodes.begin());
    return -1;
}

const EdgeRecord* NetworkSpec::find_edge(const std::string& x, const std::string& y) const {
    const std::string& lo = x < y ? x : y;
    const std::string& hi = x < y ? y : x;
    auto key = std::tie(lo, hi);
    auto it = std::lower_bound(edges.begin(), edges.end(), key,
                               [](const EdgeRecord& e, decltype(key) k) { return std::tie(e.a, e.b) < k; });
    if (it != edges.end() && it->a == lo && it->b == hi) return &*it;
    return nullptr;
}

const InterfaceCfg& NetworkSpec::iface(const std::string& from, const std::string& to) const {
    static const InterfaceCfg kDefault;
    const EdgeRecord* e = find_edge(from, to);
    if (!e) return kDefault;
    return e->a == from ? e->if_ab : e->if_ba;
}

NetworkSpec parse_network_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("line " + std::to_string(line_of_offset(json_text, e.byte)), e.what());
    }
    if (!doc.is_object()) fail("document", "expected top-level object");
    expect_keys(doc, "document",
                {"version", "nodes", "edges", "policies", "acls", "static_routes", "origins"});

    std::string version = get_string(doc, "document", "version", true);
    if (version != kSchemaVersion)
        fail("document.version", "unsupported schema version '" + version + "'");

    NetworkSpec spec;

    if (!doc.contains("nodes") || !doc["nodes"].is_array()) fail("document", "missing nodes array");
    for (size_t i = 0; i < doc["nodes"].size(); ++i) {
        const json& n = doc["nodes"][i];
        std::string where = "nodes[" + std::to_string(i) + "]";
        if (!n.is_object()) fail(where, "expected object");
        expect_keys(n, where, {"id", "as", "protocols"});
        NodeRecord rec;
        rec.id = get_string(n, where, "id", true);
        if (rec.id.empty()) fail(where, "empty node id");
        rec.asn = get_int(n, where, "as", false, 0);
        if (n.contains("protocols")) {
            if (!n["protocols"].is_array()) fail(where + ".protocols", "expected array");
            for (const auto& p : n["protocols"]) {
                if (!p.is_string()) fail(where + ".protocols", "expected string");
                std::string name = p.get<std::string>();
                if (name != "rip" && name != "ospf" && name != "bgp" && name != "static")
                    fail(where + ".protocols", "unknown protocol '" + name + "'");
                rec.protocols.push_back(name);
            }
        }
        if (rec.protocols.empty()) rec.protocols = {"bgp"};
        spec.nodes.push_back(std::move(rec));
    }
    std::sort(spec.nodes.begin(), spec.nodes.end(),
              [](const NodeRecord& a, const NodeRecord& b) { return a.id < b.id; });
    for (size_t i = 1; i < spec.nodes.size(); ++i)
        if (spec.nodes[i].id == spec.nodes[i - 1].id)
            fail("nodes", "duplicate node id '" + spec.nodes[i].id + "'");

    auto require_node = [&](const std::string& id, const std::string& where) {
        if (spec.node_index(id) < 0) throw DanglingReference(id, where);
    };

    if (doc.contains("edges")) {
        if (!doc["edges"].is_array()) fail("document.edges", "expected array");
        for (size_t i = 0; i < doc["edges"].size(); ++i) {
            const json& e = doc["edges"][i];
            std::string where = "edges[" + std::to_string(i) + "]";
            if (!e.is_object()) fail(where, "expected object");
            expect_keys(e, where, {"a", "b", "ospf_cost", "ospf_area", "if_ab", "if_ba"});
            EdgeRecord rec;
            rec.a = get_string(e, where, "a", true);
            rec.b = get_string(e, where, "b", true);
            require_node(rec.a, where);
            require_node(rec.b, where);
            if (rec.a == rec.b) fail(where, "self-loop edge");
            rec.ospf_cost = (int)get_int(e, where, "ospf_cost", false, 1);
            if (rec.ospf_cost < 1) fail(where + ".ospf_cost", "cost must be >= 1");
            rec.ospf_area = (int)get_int(e, where, "ospf_area", false, 0);
            if (e.contains("if_ab")) rec.if_ab = parse_iface(e["if_ab"], where + ".if_ab");
            if (e.contains("if_ba")) rec.if_ba = parse_iface(e["if_ba"], where + ".if_ba");
            if (rec.b < rec.a) {
                std::swap(rec.a, rec.b);
                std::swap(rec.if_ab, rec.if_ba);
            }
            spec.edges.push_back(std::move(rec));
        }
        std::sort(spec.edges.begin(), spec.edges.end(), [](const EdgeRecord& x, const EdgeRecord& y) {
            return std::tie(x.a, x.b) < std::tie(y.a, y.b);
        });
        for (size_t i = 1; i < spec.edges.size(); ++i)
            if (spec.edges[i].a == spec.edges[i - 1].a && spec.edges[i].b == spec.edges[i - 1].b)
                fail("edges", "duplicate edge " + spec.edges[i].a + "-" + spec.edges[i].b);
    }

    if (doc.contains("policies")) {
        if (!doc["policies"].is_object()) fail("document.policies", "expected object");
        for (auto it = doc["policies"].begin(); it != doc["policies"].end(); ++it) {
            std::string where = "policies." + it.key();
            if (!it.value().is_array()) fail(where, "expected clause array");
            RoutePolicy pol;
            for (size_t i = 0; i < it.value().size(); ++i)
                pol.push_back(parse_clause(it.value()[i], where + "[" + std::to_string(i) + "]"));
            spec.policies[it.key()] = std::move(pol);
        }
    }

    if (doc.contains("acls")) {
        if (!doc["acls"].is_object()) fail("document.acls", "expected object");
        for (auto it = doc["acls"].begin(); it != doc["acls"].end(); ++it) {
            std::string where = "acls." + it.key();
            if (!it.value().is_array()) fail(where, "expected entry array");
            AclList acl;
            for (const auto& entry : it.value()) {
                if (!entry.is_object()) fail(where, "expected entry object");
                expect_keys(entry, where, {"prefix", "action"});
                AclEntry ae;
                ae.prefix = parse_prefix(get_string(entry, where, "prefix", true));
                std::string action = get_string(entry, where, "action", true);
                if (action == "permit") ae.permit = true;
                else if (action == "deny") ae.permit = false;
                else fail(where, "expected 'permit' or 'deny'");
                acl.push_back(ae);
            }
            spec.acls[it.key()] = std::move(acl);
        }
    }

    if (doc.contains("static_routes")) {
        if (!doc["static_routes"].is_object()) fail("document.static_routes", "expected object");
        for (auto it = doc["static_routes"].begin(); it != doc["static_routes"].end(); ++it) {
            std::string where = "static_routes." + it.key();
            require_node(it.key(), where);
            if (!it.value().is_array()) fail(where, "expected array");
            std::vector<StaticRouteEntry> routes;
            for (const auto& r : it.value()) {
                if (!r.is_object()) fail(where, "expected route object");
                expect_keys(r, where, {"prefix", "next_hop"});
                StaticRouteEntry entry;
                entry.prefix = parse_prefix(get_string(r, where, "prefix", true));
                entry.next_hop = get_string(r, where, "next_hop", true);
                require_node(entry.next_hop, where);
                if (!spec.find_edge(it.key(), entry.next_hop))
                    fail(where, "static route next hop '" + entry.next_hop + "' is not adjacent");
                routes.push_back(std::move(entry));
            }
            spec.static_routes[it.key()] = std::move(routes);
        }
    }

    if (doc.contains("origins")) {
        if (!doc["origins"].is_object()) fail("document.origins", "expected object");
        for (auto it = doc["origins"].begin(); it != doc["origins"].end(); ++it) {
            require_node(it.key(), "origins." + it.key());
            spec.origins[it.key()] = get_prefix_list(it.value(), "origins." + it.key());
        }
    }

    // Policy/ACL references must resolve.
    auto require_policy = [&](const std::string& id, const std::string& where) {
        if (!id.empty() && !spec.policies.count(id)) throw DanglingReference(id, where);
    };
    auto require_acl = [&](const std::string& id, const std::string& where) {
        if (!id.empty() && !spec.acls.count(id)) throw DanglingReference(id, where);
    };
    for (const auto& e : spec.edges) {
        std::string where = "edge " + e.a + "-" + e.b;
        require_policy(e.if_ab.import_policy, where);
        require_policy(e.if_ab.export_policy, where);
        require_acl(e.if_ab.acl, where);
        require_policy(e.if_ba.import_policy, where);
        require_policy(e.if_ba.export_policy, where);
        require_acl(e.if_ba.acl, where);
    }
    return spec;
}

namespace {

json iface_to_json(const InterfaceCfg& cfg) {
    json out = json::object();
    if (!cfg.import_policy.empty()) out["import"] = cfg.import_policy;
    if (!cfg.export_policy.empty()) out["export"] = cfg.export_policy;
    if (!cfg.acl.empty()) out["acl"] = cfg.acl;
    return out;
}

json clause_to_json(const PolicyClause& c) {
    json out = json::object();
    if (!c.matches_everything()) {
        json m = json::object();
        if (!c.match_prefix.empty()) {
            json arr = json::array();
            for (const auto& p : c.match_prefix) arr.push_back(format_prefix(p));
            m["prefix"] = std::move(arr);
        }
        if (!c.match_community.empty()) {
            json arr = json::array();
            for (Community t : c.match_community) arr.push_back(format_community(t));
            m["community"] = std::move(arr);
        }
        if (c.match_protocol) m["protocol"] = *c.match_protocol;
        out["match"] = std::move(m);
    }
    out["action"] = c.permit ? "permit" : "deny";
    if (!c.add_community.empty()) {
        json arr = json::array();
        for (Community t : c.add_community) arr.push_back(format_community(t));
        out["add_community"] = std::move(arr);
    }
    if (!c.delete_community.empty()) {
        json arr = json::array();
        for (Community t : c.delete_community) arr.push_back(format_community(t));
        out["delete_community"] = std::move(arr);
    }
    if (c.set_local_pref) out["set_local_pref"] = *c.set_local_pref;
    return out;
}

} // namespace

std::string emit_network_spec(const NetworkSpec& spec) {
    json doc = json::object();
    doc["version"] = kSchemaVersion;

    json nodes = json::array();
    for (const auto& n : spec.nodes) {
        json rec = json::object();
        rec["id"] = n.id;
        rec["as"] = n.asn;
        rec["protocols"] = n.protocols;
        nodes.push_back(std::move(rec));
    }
    doc["nodes"] = std::move(nodes);

    json edges = json::array();
    for (const auto& e : spec.edges) {
        json rec = json::object();
        rec["a"] = e.a;
        rec["b"] = e.b;
        if (e.ospf_cost != 1) rec["ospf_cost"] = e.ospf_cost;
        if (e.ospf_area != 0) rec["ospf_area"] = e.ospf_area;
        if (!e.if_ab.is_default()) rec["if_ab"] = iface_to_json(e.if_ab);
        if (!e.if_ba.is_default()) rec["if_ba"] = iface_to_json(e.if_ba);
        edges.push_back(std::move(rec));
    }
    doc["edges"] = std::move(edges);

    json policies = json::object();
    for (const auto& [id, pol] : spec.policies) {
        json arr = json::array();
        for (const auto& c : pol) arr.push_back(clause_to_json(c));
        policies[id] = std::move(arr);
    }
    doc["policies"] = std::move(policies);

    json acls = json::object();
    for (const auto& [id, acl] : spec.acls) {
        json arr = json::array();
        for (const auto& entry : acl) {
            json rec = json::object();
            rec["prefix"] = format_prefix(entry.prefix);
            rec["action"] = entry.permit ? "permit" : "deny";
            arr.push_back(std::move(rec));
        }
        acls[id] = std::move(arr);
    }
    doc["acls"] = std::move(acls);

    json statics = json::object();
    for (const auto& [node, routes] : spec.static_routes) {
        json arr = json::array();
        for (const auto& r : routes) {
            json rec = json::object();
            rec["prefix"] = format_prefix(r.prefix);
            rec["next_hop"] = r.next_hop;
            arr.push_back(std::move(rec));
        }
        statics[node] = std::move(arr);
    }
    doc["static_routes"] = std::move(statics);

    json origins = json::object();
    for (const auto& [node, prefixes] : spec.origins) {
        json arr = json::array();
        for (const auto& p : prefixes) arr.push_back(format_prefix(p));
        origins[node] = std::move(arr);
    }
    doc["origins"] = std::move(origins);

    return doc.dump(2) + "\n";
}

} // namespace cpcomp
