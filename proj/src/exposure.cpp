#include "microseg/exposure.hpp"

#include <algorithm>
#include <deque>

namespace microseg {

namespace {

// BFS hop distances from src; -1 marks unreachable vertices.
std::vector<int> bfs_distances(const ConnectivityGraph& g, int src) {
    std::vector<int> dist(static_cast<std::size_t>(g.vertex_count()), -1);
    std::deque<int> queue;
    dist[static_cast<std::size_t>(src)] = 0;
    queue.push_back(src);
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : g.out_neighbors(u))
            if (dist[static_cast<std::size_t>(v)] < 0) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            }
    }
    return dist;
}

}  // namespace

std::uint64_t enice(const ConnectivityGraph& g) {
    std::uint64_t total = 0;
    for (const auto& [key, permit] : g.edges) total += permit.weight();
    return total;
}

double global_clustering(const ConnectivityGraph& g) {
    if (g.vertex_count() < 3)
        throw MetricError("clustering needs at least 3 vertices, got " +
                          std::to_string(g.vertex_count()));
    auto adj = g.undirected_adjacency();
    std::uint64_t total_triplets = 0;
    std::uint64_t triangles = 0;
    for (std::size_t v = 0; v < adj.size(); ++v) {
        std::uint64_t deg = adj[v].size();
        total_triplets += deg * (deg - 1) / 2;
        // Count each triangle once at its lowest-index vertex.
        for (std::size_t i = 0; i < adj[v].size(); ++i) {
            int a = adj[v][i];
            if (a <= static_cast<int>(v)) continue;
            for (std::size_t j = i + 1; j < adj[v].size(); ++j) {
                int b = adj[v][j];
                if (std::binary_search(adj[static_cast<std::size_t>(a)].begin(),
                                       adj[static_cast<std::size_t>(a)].end(), b))
                    ++triangles;
            }
        }
    }
    if (total_triplets == 0) return 0.0;
    return static_cast<double>(3 * triangles) / static_cast<double>(total_triplets);
}

PathLengthStats path_length_stats(const ConnectivityGraph& g, PathLengthMode mode) {
    PathLengthStats stats;
    int n = g.vertex_count();
    stats.total_pairs = n < 2 ? 0 : static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1);
    if (stats.total_pairs == 0) {
        stats.infinity_fraction = 0.0;
        return stats;
    }
    int offset = mode == PathLengthMode::VertexCount ? 1 : 0;
    std::uint64_t dist_sum = 0;
    int max_dist = -1;
    for (int src = 0; src < n; ++src) {
        auto dist = bfs_distances(g, src);
        for (int v = 0; v < n; ++v) {
            if (v == src || dist[static_cast<std::size_t>(v)] < 0) continue;
            int d = dist[static_cast<std::size_t>(v)] + offset;
            ++stats.reachable_pairs;
            dist_sum += static_cast<std::uint64_t>(d);
            max_dist = std::max(max_dist, d);
            ++stats.histogram[d];
        }
    }
    if (stats.reachable_pairs > 0) {
        stats.mean = static_cast<double>(dist_sum) / static_cast<double>(stats.reachable_pairs);
        stats.diameter = max_dist;
    }
    stats.infinity_fraction = static_cast<double>(stats.total_pairs - stats.reachable_pairs) /
                              static_cast<double>(stats.total_pairs);
    return stats;
}

std::uint64_t transitive_closure_pairs(const ConnectivityGraph& g) {
    std::uint64_t pairs = 0;
    int n = g.vertex_count();
    for (int src = 0; src < n; ++src) {
        auto dist = bfs_distances(g, src);
        for (int v = 0; v < n; ++v)
            if (v != src && dist[static_cast<std::size_t>(v)] >= 0) ++pairs;
    }
    return pairs;
}

double avg_out_degree(const ConnectivityGraph& g) {
    if (g.vertex_count() == 0) throw MetricError("out-degree undefined on an empty graph");
    return static_cast<double>(g.edge_count()) / static_cast<double>(g.vertex_count());
}

std::vector<double> closeness_centrality(const ConnectivityGraph& g) {
    int n = g.vertex_count();
    std::vector<double> scores(static_cast<std::size_t>(n), 0.0);
    if (n < 2) return scores;
    for (int v = 0; v < n; ++v) {
        auto dist = bfs_distances(g, v);
        std::uint64_t reachable = 0;
        std::uint64_t dist_sum = 0;
        for (int u = 0; u < n; ++u) {
            if (u == v || dist[static_cast<std::size_t>(u)] < 0) continue;
            ++reachable;
            dist_sum += static_cast<std::uint64_t>(dist[static_cast<std::size_t>(u)]);
        }
        if (reachable == 0) continue;
        double r_minus_1 = static_cast<double>(reachable);
        scores[static_cast<std::size_t>(v)] =
            (r_minus_1 / static_cast<double>(n - 1)) * (r_minus_1 / static_cast<double>(dist_sum));
    }
    return scores;
}

double avg_closeness(const ConnectivityGraph& g) {
    if (g.vertex_count() == 0) throw MetricError("closeness undefined on an empty graph");
    auto scores = closeness_centrality(g);
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

ExposureReport compute_exposure_report(const ConnectivityGraph& g, PathLengthMode mode) {
    ExposureReport report;
    report.mode = mode;
    report.host_count = g.vertex_count();
    report.edge_count = g.edge_count();
    report.enice = enice(g);
    if (g.vertex_count() >= 3) report.global_clustering = global_clustering(g);
    auto stats = path_length_stats(g, mode);
    report.mean_path_length = stats.mean;
    report.diameter = stats.diameter;
    report.infinity_fraction = stats.infinity_fraction;
    report.tinr = stats.reachable_pairs;
    report.path_length_histogram = std::move(stats.histogram);
    if (g.vertex_count() > 0) {
        report.avg_out_degree = avg_out_degree(g);
        auto closeness = closeness_centrality(g);
        double sum = 0.0;
        for (int v = 0; v < g.vertex_count(); ++v) {
            const std::string& id = g.vertices[static_cast<std::size_t>(v)];
            report.out_degree_per_node[id] = g.out_neighbors(v).size();
            report.closeness_per_node[id] = closeness[static_cast<std::size_t>(v)];
            sum += closeness[static_cast<std::size_t>(v)];
        }
        report.avg_closeness = sum / static_cast<double>(g.vertex_count());
    }
    return report;
}

}  // namespace microseg
