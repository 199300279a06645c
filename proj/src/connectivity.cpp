#include "microseg/connectivity.hpp"

#include <algorithm>
#include <set>

namespace microseg {

std::uint64_t EdgePermit::weight() const {
    std::uint64_t total = 0;
    for (const auto& [proto, intervals] : by_protocol)
        for (const PortRange& r : intervals)
            total += static_cast<std::uint64_t>(r.hi - r.lo + 1);
    return total;
}

int ConnectivityGraph::index_of(const std::string& host_id) const {
    auto it = index_.find(host_id);
    return it == index_.end() ? -1 : it->second;
}

std::uint64_t ConnectivityGraph::edge_weight(int u, int v) const {
    auto it = edges.find({u, v});
    return it == edges.end() ? 0 : it->second.weight();
}

std::vector<std::vector<int>> ConnectivityGraph::undirected_adjacency() const {
    std::vector<std::set<int>> nbr(vertices.size());
    for (const auto& [key, permit] : edges) {
        auto [u, v] = key;
        if (u == v) continue;
        nbr[static_cast<std::size_t>(u)].insert(v);
        nbr[static_cast<std::size_t>(v)].insert(u);
    }
    std::vector<std::vector<int>> out(vertices.size());
    for (std::size_t i = 0; i < nbr.size(); ++i) out[i].assign(nbr[i].begin(), nbr[i].end());
    return out;
}

void ConnectivityGraph::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < vertices.size(); ++i) index_[vertices[i]] = static_cast<int>(i);
    out_.assign(vertices.size(), {});
    in_.assign(vertices.size(), {});
    for (const auto& [key, permit] : edges) {
        auto [u, v] = key;
        out_[static_cast<std::size_t>(u)].push_back(v);
        in_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& v : out_) std::sort(v.begin(), v.end());
    for (auto& v : in_) std::sort(v.begin(), v.end());
}

namespace {

// Sorts and fuses overlapping or port-adjacent intervals in place.
void normalize_intervals(std::vector<PortRange>& intervals) {
    if (intervals.empty()) return;
    std::sort(intervals.begin(), intervals.end(),
              [](const PortRange& a, const PortRange& b) { return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi; });
    std::vector<PortRange> merged;
    merged.push_back(intervals.front());
    for (std::size_t i = 1; i < intervals.size(); ++i) {
        PortRange& last = merged.back();
        if (intervals[i].lo <= last.hi + 1)
            last.hi = std::max(last.hi, intervals[i].hi);
        else
            merged.push_back(intervals[i]);
    }
    intervals = std::move(merged);
}

}  // namespace

ConnectivityGraph build_segmented(const NetworkSpec& spec, const PolicySet& policy,
                                  const ProtocolUniverse& universe) {
    ConnectivityGraph g;
    std::vector<std::string> internal = spec.internal_host_ids();
    g.vertices = internal;

    std::optional<std::string> internet = spec.internet_host();
    bool internet_used = false;
    if (internet) {
        for (const FirewallRule& r : policy.rules)
            if (r.src == *internet || r.dst == *internet) {
                internet_used = true;
                break;
            }
    }
    if (internet_used) g.vertices.push_back(*internet);

    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < g.vertices.size(); ++i) index[g.vertices[i]] = static_cast<int>(i);

    auto endpoints = [&](const std::string& field) -> std::vector<int> {
        if (field == kWildcard) {
            std::vector<int> all(internal.size());
            for (std::size_t i = 0; i < internal.size(); ++i) all[i] = static_cast<int>(i);
            return all;
        }
        auto it = index.find(field);
        if (it == index.end()) {
            if (!spec.has_host(field))
                throw ValidationError("rule references unknown host '" + field + "'");
            throw ValidationError("rule references host '" + field + "' outside the graph scope");
        }
        return {it->second};
    };

    for (const FirewallRule& rule : policy.rules) {
        std::vector<std::string> protocols =
            rule.protocol_any() ? universe.names : std::vector<std::string>{rule.protocol};
        for (const std::string& proto : protocols) {
            if (!universe.contains(proto))
                throw ValidationError("rule protocol '" + proto + "' not in declared universe " +
                                      universe.describe());
            for (int u : endpoints(rule.src))
                for (int v : endpoints(rule.dst)) {
                    if (u == v) continue;
                    g.edges[{u, v}].by_protocol[proto].push_back(rule.ports);
                }
        }
    }

    for (auto& [key, permit] : g.edges)
        for (auto& [proto, intervals] : permit.by_protocol) normalize_intervals(intervals);

    g.rebuild_index();
    return g;
}

ConnectivityGraph build_flat(const NetworkSpec& spec, const ProtocolUniverse& universe,
                             int port_space) {
    if (universe.names.empty()) throw ValidationError("protocol universe is empty");
    if (port_space < 1 || port_space > kMaxPort)
        throw ValidationError("port_space must be in [1, 65535]");
    ConnectivityGraph g;
    g.vertices = spec.internal_host_ids();
    int n = g.vertex_count();
    PortRange full{1, port_space};
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            EdgePermit& permit = g.edges[{u, v}];
            for (const std::string& proto : universe.names) permit.by_protocol[proto] = {full};
        }
    g.rebuild_index();
    return g;
}

PolicySet strip_perimeter_rules(const PolicySet& policy, const NetworkSpec& spec) {
    PolicySet out = policy;
    std::optional<std::string> internet = spec.internet_host();
    if (!internet) return out;
    out.rules.erase(std::remove_if(out.rules.begin(), out.rules.end(),
                                   [&](const FirewallRule& r) {
                                       return r.src == *internet || r.dst == *internet;
                                   }),
                    out.rules.end());
    return out;
}

}  // namespace microseg
