#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "microseg/connectivity.hpp"

namespace microseg {

// Whether a path's length is the number of edges traversed or the number of
// vertices touched (edges + 1). Edge counting is the default everywhere.
enum class PathLengthMode { EdgeCount, VertexCount };

// Shortest-path statistics over all ordered vertex pairs (u, v), u != v.
// Mean and diameter are taken over the reachable pairs only and are absent
// when no pair is reachable; infinity_fraction is the share of unreachable
// ordered pairs.
struct PathLengthStats {
    std::optional<double> mean;
    std::optional<int> diameter;
    double infinity_fraction = 0.0;
    std::uint64_t reachable_pairs = 0;
    std::uint64_t total_pairs = 0;
    std::map<int, std::uint64_t> histogram;
};

// Sum of edge weights: the count of permitted (src, dst, protocol, port)
// tuples across the whole graph.
std::uint64_t enice(const ConnectivityGraph& g);

// Closed over total connected triplets of the undirected projection.
// Throws MetricError for graphs with fewer than 3 vertices; returns 0 when
// no connected triplet exists.
double global_clustering(const ConnectivityGraph& g);

PathLengthStats path_length_stats(const ConnectivityGraph& g,
                                  PathLengthMode mode = PathLengthMode::EdgeCount);

// Number of ordered pairs (u, v), u != v, with a directed path from u to v.
std::uint64_t transitive_closure_pairs(const ConnectivityGraph& g);

// Mean out-degree |E| / |V|. Throws MetricError on an empty graph.
double avg_out_degree(const ConnectivityGraph& g);

// Closeness of each vertex, scaled by the reachable share so that vertices
// of small out-components score low: with r vertices reachable from v
// (v included), n vertices total and d the sum of distances to the other
// r - 1, the score is ((r-1)/(n-1)) * ((r-1)/d), and 0 when r = 1.
std::vector<double> closeness_centrality(const ConnectivityGraph& g);

double avg_closeness(const ConnectivityGraph& g);

// Everything above, computed in one pass over the graph. Optional fields are
// absent where the metric is undefined for this graph. Per-node maps are
// keyed by host id.
struct ExposureReport {
    int host_count = 0;
    std::uint64_t edge_count = 0;
    std::uint64_t enice = 0;  // permitted (protocol, port) tuples over all edges
    std::optional<double> global_clustering;
    std::optional<double> mean_path_length;
    std::optional<int> diameter;
    double infinity_fraction = 0.0;
    std::uint64_t tinr = 0;  // ordered host pairs joined by a directed path
    double avg_out_degree = 0.0;
    std::map<std::string, std::uint64_t> out_degree_per_node;
    double avg_closeness = 0.0;
    std::map<std::string, double> closeness_per_node;
    std::map<int, std::uint64_t> path_length_histogram;
    PathLengthMode mode = PathLengthMode::EdgeCount;
};

ExposureReport compute_exposure_report(const ConnectivityGraph& g,
                                       PathLengthMode mode = PathLengthMode::EdgeCount);

}  // namespace microseg
