#include "microseg/attackgraph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "microseg/connectivity.hpp"

namespace microseg {

std::string to_string(const Fact& fact) {
    std::ostringstream out;
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, AttackerLocatedFact>) {
                out << "attackerLocated(" << f.host << ")";
            } else if constexpr (std::is_same_v<T, HaclFact>) {
                out << "hacl(" << f.src << "," << f.dst << "," << f.protocol << ","
                    << f.ports.to_string() << ")";
            } else if constexpr (std::is_same_v<T, ServiceFact>) {
                out << "networkServiceInfo(" << f.host << "," << f.software << "," << f.protocol
                    << "," << f.port << "," << to_string(f.privilege) << ")";
            } else if constexpr (std::is_same_v<T, VulnFact>) {
                out << "vulExists(" << f.host << "," << f.vuln_id << "," << f.software << ","
                    << to_string(f.range) << "," << to_string(f.consequence) << ")";
            } else {
                out << "hasAccount(" << f.principal << "," << f.host << ","
                    << to_string(f.privilege) << ")";
            }
        },
        fact);
    return out.str();
}

FactKind kind_of(const Fact& fact) {
    switch (fact.index()) {
        case 0: return FactKind::AttackerLocated;
        case 1: return FactKind::Hacl;
        case 2: return FactKind::NetworkServiceInfo;
        case 3: return FactKind::VulExists;
        default: return FactKind::HasAccount;
    }
}

std::vector<std::string> hosts_of(const Fact& fact) {
    return std::visit(
        [](const auto& f) -> std::vector<std::string> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, HaclFact>)
                return {f.src, f.dst};
            else
                return {f.host};
        },
        fact);
}

std::string to_string(AttackRule rule) {
    switch (rule) {
        case AttackRule::DirectReach: return "directReach";
        case AttackRule::LateralReach: return "lateralReach";
        case AttackRule::RemoteExploit: return "remoteExploit";
        case AttackRule::LocalEscalation: return "localEscalation";
    }
    return "?";
}

std::size_t AttackGraph::edge_count() const {
    std::size_t total = 0;
    for (const auto& s : succ) total += s.size();
    return total;
}

int AttackGraph::find(const std::string& label) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].label == label) return static_cast<int>(i);
    return -1;
}

std::vector<int> AttackGraph::leaves() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].kind == NodeKind::Leaf) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> AttackGraph::and_nodes() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].kind == NodeKind::And) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> AttackGraph::privileges() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].kind == NodeKind::Or) out.push_back(static_cast<int>(i));
    return out;
}

std::size_t AttackGraph::config_fact_count_involving(const std::string& host) const {
    std::size_t count = 0;
    for (const AttackNode& n : nodes) {
        if (n.kind != NodeKind::Leaf || !n.fact) continue;
        if (*n.fact != FactKind::Hacl && *n.fact != FactKind::NetworkServiceInfo &&
            *n.fact != FactKind::HasAccount)
            continue;
        if (std::find(n.hosts.begin(), n.hosts.end(), host) != n.hosts.end()) ++count;
    }
    return count;
}

int AttackGraph::add_node(AttackNode node) {
    nodes.push_back(std::move(node));
    succ.emplace_back();
    pred.emplace_back();
    return static_cast<int>(nodes.size()) - 1;
}

void AttackGraph::add_edge(int from, int to) {
    succ[static_cast<std::size_t>(from)].push_back(to);
    pred[static_cast<std::size_t>(to)].push_back(from);
}

std::vector<Fact> compile_facts(const NetworkSpec& spec, const PolicySet& policy,
                                const ScanDocument& scan, const ProtocolUniverse& universe) {
    std::optional<std::string> internet = spec.internet_host();
    if (!internet) throw DerivationError("attacker placement requires an internet-zone host");

    std::vector<Fact> facts;
    facts.push_back(AttackerLocatedFact{*internet});

    ConnectivityGraph conn = build_segmented(spec, policy, universe);
    for (const auto& [key, permit] : conn.edges) {
        const std::string& src = conn.vertices[static_cast<std::size_t>(key.first)];
        const std::string& dst = conn.vertices[static_cast<std::size_t>(key.second)];
        for (const auto& [proto, intervals] : permit.by_protocol)
            for (const PortRange& r : intervals) facts.push_back(HaclFact{src, dst, proto, r});
    }

    std::set<std::tuple<std::string, std::string, int>> endpoint_seen;
    auto add_service = [&](const ServiceEndpoint& ep) {
        if (!endpoint_seen.insert({ep.host, ep.protocol, ep.port}).second) return;
        facts.push_back(ServiceFact{ep.host, ep.software, ep.protocol, ep.port, ep.privilege});
    };
    for (const ServiceEndpoint& ep : spec.services) add_service(ep);
    for (const ServiceEndpoint& ep : scan.discovered_services) add_service(ep);

    for (const VulnerabilityRecord& v : scan.findings)
        facts.push_back(VulnFact{v.host, v.vuln_id, v.software, v.range, v.consequence, v.cvss_base});

    for (const Host& h : spec.hosts)
        if (h.zone == Zone::Internal)
            facts.push_back(AccountFact{"user_" + h.id, h.id, Privilege::User});

    return facts;
}

namespace {

struct Deriver {
    AttackGraph g;

    // leaf-backed indexes
    std::vector<int> attacker_leaves;                       // attackerLocated nodes
    std::map<std::string, std::vector<int>> hacl_by_src;    // src -> hacl leaf ids
    std::map<std::string, std::vector<int>> services_by_host;
    std::map<std::string, std::vector<int>> remote_vulns_by_host;
    std::map<std::string, std::vector<int>> local_vulns_by_host;
    std::vector<Fact> fact_of;                              // parallel to leaf node ids

    std::map<std::string, int> or_by_label;
    std::set<std::string> and_labels;
    std::deque<int> fresh;  // newly created OR nodes

    int leaf(const Fact& f) {
        AttackNode node;
        node.kind = NodeKind::Leaf;
        node.label = to_string(f);
        node.fact = kind_of(f);
        node.hosts = hosts_of(f);
        if (const auto* v = std::get_if<VulnFact>(&f)) node.cvss = v->cvss;
        int id = g.add_node(std::move(node));
        fact_of.push_back(f);
        return id;
    }

    int get_or(const std::string& label, LiteralKind literal, const std::string& host,
               std::optional<Privilege> priv) {
        auto it = or_by_label.find(label);
        if (it != or_by_label.end()) return it->second;
        AttackNode node;
        node.kind = NodeKind::Or;
        node.label = label;
        node.literal = literal;
        node.hosts = {host};
        node.privilege = priv;
        int id = g.add_node(std::move(node));
        or_by_label[label] = id;
        fresh.push_back(id);
        return id;
    }

    void fire(AttackRule rule, const std::vector<int>& premises, const std::string& or_label,
              LiteralKind literal, const std::string& host, std::optional<Privilege> priv) {
        std::string label = to_string(rule) + "(" + or_label + " <-";
        for (int p : premises) label += " " + g.nodes[static_cast<std::size_t>(p)].label;
        label += ")";
        if (!and_labels.insert(label).second) return;

        AttackNode node;
        node.kind = NodeKind::And;
        node.label = std::move(label);
        node.rule = rule;
        node.hosts = {host};
        int and_id = g.add_node(std::move(node));
        for (int p : premises) g.add_edge(p, and_id);
        int or_id = get_or(or_label, literal, host, priv);
        g.add_edge(and_id, or_id);
    }

    void reach(AttackRule rule, int source_node, int hacl_node) {
        const HaclFact& h = std::get<HaclFact>(fact_of[static_cast<std::size_t>(hacl_node)]);
        std::string label = "netAccess(" + h.dst + "," + h.protocol + "," + h.ports.to_string() + ")";
        fire(rule, {source_node, hacl_node}, label, LiteralKind::NetAccess, h.dst, std::nullopt);
    }

    void expand_net_access(int or_id) {
        const AttackNode& oa = g.nodes[static_cast<std::size_t>(or_id)];
        const std::string& host = oa.hosts.front();
        // Recover (protocol, interval) from any supporting hacl premise.
        int and_id = g.pred[static_cast<std::size_t>(or_id)].front();
        int hacl_id = -1;
        for (int p : g.pred[static_cast<std::size_t>(and_id)])
            if (g.nodes[static_cast<std::size_t>(p)].fact == FactKind::Hacl) hacl_id = p;
        const HaclFact& h = std::get<HaclFact>(fact_of[static_cast<std::size_t>(hacl_id)]);

        auto services = services_by_host.find(host);
        if (services == services_by_host.end()) return;
        auto vulns = remote_vulns_by_host.find(host);
        if (vulns == remote_vulns_by_host.end()) return;
        for (int service_id : services->second) {
            const ServiceFact& s = std::get<ServiceFact>(fact_of[static_cast<std::size_t>(service_id)]);
            if (s.protocol != h.protocol || !h.ports.contains(s.port)) continue;
            for (int vuln_id : vulns->second) {
                const VulnFact& v = std::get<VulnFact>(fact_of[static_cast<std::size_t>(vuln_id)]);
                if (v.software != s.software) continue;
                std::string label = "execCode(" + host + "," + to_string(s.privilege) + ")";
                fire(AttackRule::RemoteExploit, {or_id, service_id, vuln_id}, label,
                     LiteralKind::ExecCode, host, s.privilege);
            }
        }
    }

    void expand_exec_code(int or_id) {
        const AttackNode& oa = g.nodes[static_cast<std::size_t>(or_id)];
        const std::string& host = oa.hosts.front();
        if (auto it = hacl_by_src.find(host); it != hacl_by_src.end())
            for (int hacl_id : it->second) reach(AttackRule::LateralReach, or_id, hacl_id);
        if (oa.privilege == Privilege::User) {
            if (auto it = local_vulns_by_host.find(host); it != local_vulns_by_host.end())
                for (int vuln_id : it->second) {
                    std::string label = "execCode(" + host + ",root)";
                    fire(AttackRule::LocalEscalation, {or_id, vuln_id}, label, LiteralKind::ExecCode,
                         host, Privilege::Root);
                }
        }
    }
};

}  // namespace

AttackGraph derive(const std::vector<Fact>& facts) {
    // Canonical order + dedup make the construction order-independent.
    std::vector<std::pair<std::string, const Fact*>> ordered;
    ordered.reserve(facts.size());
    for (const Fact& f : facts) ordered.emplace_back(to_string(f), &f);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    ordered.erase(std::unique(ordered.begin(), ordered.end(),
                              [](const auto& a, const auto& b) { return a.first == b.first; }),
                  ordered.end());

    Deriver d;
    for (const auto& [label, fact] : ordered) {
        int id = d.leaf(*fact);
        switch (kind_of(*fact)) {
            case FactKind::AttackerLocated:
                d.attacker_leaves.push_back(id);
                break;
            case FactKind::Hacl:
                d.hacl_by_src[std::get<HaclFact>(*fact).src].push_back(id);
                break;
            case FactKind::NetworkServiceInfo:
                d.services_by_host[std::get<ServiceFact>(*fact).host].push_back(id);
                break;
            case FactKind::VulExists: {
                const VulnFact& v = std::get<VulnFact>(*fact);
                if (v.consequence == Consequence::PrivEscalation) {
                    if (v.range == VulnRange::RemoteExploit)
                        d.remote_vulns_by_host[v.host].push_back(id);
                    else
                        d.local_vulns_by_host[v.host].push_back(id);
                }
                break;
            }
            case FactKind::HasAccount:
                break;  // grounded but consumed by no rule
        }
    }

    for (int attacker : d.attacker_leaves) {
        const auto& f = std::get<AttackerLocatedFact>(d.fact_of[static_cast<std::size_t>(attacker)]);
        if (auto it = d.hacl_by_src.find(f.host); it != d.hacl_by_src.end())
            for (int hacl_id : it->second) d.reach(AttackRule::DirectReach, attacker, hacl_id);
    }

    while (!d.fresh.empty()) {
        int or_id = d.fresh.front();
        d.fresh.pop_front();
        if (d.g.nodes[static_cast<std::size_t>(or_id)].literal == LiteralKind::NetAccess)
            d.expand_net_access(or_id);
        else
            d.expand_exec_code(or_id);
    }

    return std::move(d.g);
}

AttackGraph build_attack_graph(const NetworkSpec& spec, const PolicySet& policy,
                               const ScanDocument& scan, const ProtocolUniverse& universe) {
    return derive(compile_facts(spec, policy, scan, universe));
}

}  // namespace microseg
