#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "microseg/model.hpp"

namespace microseg {

// Permitted traffic on one directed host pair, grouped by protocol.
// Intervals are kept sorted, disjoint and maximally merged, so the tuple
// count is simply the sum of interval lengths and downstream consumers can
// treat each interval as one equivalence class of ports.
struct EdgePermit {
    std::map<std::string, std::vector<PortRange>> by_protocol;

    std::uint64_t weight() const;
};

// Directed host-to-host reachability graph induced by a firewall policy.
// Vertices are hosts; an edge (u, v) exists when at least one
// (protocol, port) tuple from u to v is permitted, and carries the full
// permitted tuple set as its weight.
class ConnectivityGraph {
public:
    std::vector<std::string> vertices;
    std::map<std::pair<int, int>, EdgePermit> edges;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    std::size_t edge_count() const { return edges.size(); }

    // -1 when the host is not a vertex of this graph.
    int index_of(const std::string& host_id) const;

    bool has_edge(int u, int v) const { return edges.count({u, v}) != 0; }
    std::uint64_t edge_weight(int u, int v) const;

    bool has_edge(const std::string& u, const std::string& v) const {
        return has_edge(index_of(u), index_of(v));
    }
    std::uint64_t edge_weight(const std::string& u, const std::string& v) const {
        return edge_weight(index_of(u), index_of(v));
    }

    const std::vector<int>& out_neighbors(int u) const { return out_[static_cast<std::size_t>(u)]; }
    const std::vector<int>& in_neighbors(int u) const { return in_[static_cast<std::size_t>(u)]; }

    // Neighbor sets of the undirected projection (u~v when either direction
    // has an edge), sorted, without self loops.
    std::vector<std::vector<int>> undirected_adjacency() const;

    // Recomputes the adjacency indexes from `edges`. Builders call this; call
    // it again after mutating `edges` or `vertices` by hand.
    void rebuild_index();

private:
    std::unordered_map<std::string, int> index_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
};

// Expands a rule set into the reachability graph. Vertices are all internal
// hosts of `spec`, plus the internet host when some rule names it explicitly;
// wildcard endpoints range over internal hosts only. Self pairs are never
// materialized. Unknown host references throw ValidationError.
ConnectivityGraph build_segmented(const NetworkSpec& spec, const PolicySet& policy,
                                  const ProtocolUniverse& universe);

// The any-to-any baseline: a complete digraph over the internal hosts where
// every ordered pair permits every protocol of `universe` on every port of
// [1, port_space].
ConnectivityGraph build_flat(const NetworkSpec& spec, const ProtocolUniverse& universe,
                             int port_space = kMaxPort);

// Copy of `policy` with every rule that names the internet host removed.
// Exposure metrics are defined over enterprise-internal traffic, so builders
// of internal views run on this subset while attack-graph compilation keeps
// the perimeter rules.
PolicySet strip_perimeter_rules(const PolicySet& policy, const NetworkSpec& spec);

}  // namespace microseg
