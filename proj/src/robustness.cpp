#include "microseg/robustness.hpp"

#include <algorithm>
#include <vector>

namespace microseg {

std::uint64_t cmc(const AttackGraph& g) {
    std::uint64_t count = 0;
    for (const AttackNode& n : g.nodes)
        if (n.kind == NodeKind::Leaf) ++count;
    return count;
}

namespace {

// Single-source BFS from `target` along predecessor edges, so dist[x] is the
// hop count of the shortest x -> target path in the forward graph and
// sigma[x] the number of such paths. `order` lists visited nodes nearest
// first; dag_pred[x] holds the BFS-tree neighbors one hop nearer the target.
struct ReverseSearch {
    std::vector<int> dist;
    std::vector<std::uint64_t> sigma;
    std::vector<int> order;
    std::vector<std::vector<int>> dag_pred;
};

ReverseSearch reverse_bfs(const AttackGraph& g, int target) {
    ReverseSearch rs;
    std::size_t n = g.nodes.size();
    rs.dist.assign(n, -1);
    rs.sigma.assign(n, 0);
    rs.dag_pred.assign(n, {});
    rs.dist[static_cast<std::size_t>(target)] = 0;
    rs.sigma[static_cast<std::size_t>(target)] = 1;
    rs.order.push_back(target);
    for (std::size_t head = 0; head < rs.order.size(); ++head) {
        int v = rs.order[head];
        for (int w : g.pred[static_cast<std::size_t>(v)]) {
            auto wi = static_cast<std::size_t>(w);
            if (rs.dist[wi] < 0) {
                rs.dist[wi] = rs.dist[static_cast<std::size_t>(v)] + 1;
                rs.order.push_back(w);
            }
            if (rs.dist[wi] == rs.dist[static_cast<std::size_t>(v)] + 1) {
                rs.sigma[wi] += rs.sigma[static_cast<std::size_t>(v)];
                rs.dag_pred[wi].push_back(v);
            }
        }
    }
    return rs;
}

}  // namespace

PathCounts shortest_attack_paths(const AttackGraph& g) {
    PathCounts out;
    std::uint64_t total = 0;
    bool any = false;
    for (int l : g.privileges()) {
        ReverseSearch rs = reverse_bfs(g, l);
        for (std::size_t r = 0; r < g.nodes.size(); ++r) {
            if (g.nodes[r].kind != NodeKind::Leaf || rs.dist[r] < 0) continue;
            any = true;
            total += rs.sigma[r];
            out.histogram[rs.dist[r]] += rs.sigma[r];
        }
    }
    if (!any) return out;
    out.nsp = total;
    out.mspl = out.histogram.begin()->first;
    out.cmpl = out.histogram.begin()->second;
    return out;
}

OutDegreeStats privilege_out_degree(const AttackGraph& g) {
    OutDegreeStats out;
    auto privileges = g.privileges();
    if (privileges.empty()) return out;
    std::uint64_t sum = 0;
    std::uint64_t max = 0;
    for (int p : privileges) {
        std::uint64_t deg = g.succ[static_cast<std::size_t>(p)].size();
        sum += deg;
        max = std::max(max, deg);
    }
    out.aod = static_cast<double>(sum) / static_cast<double>(privileges.size());
    out.mod = max;
    return out;
}

BetweennessResult betweenness(const AttackGraph& g) {
    BetweennessResult out;
    auto privileges = g.privileges();
    if (privileges.empty()) return out;

    std::vector<double> bn(g.nodes.size(), 0.0);
    std::vector<double> delta(g.nodes.size(), 0.0);
    for (int l : privileges) {
        ReverseSearch rs = reverse_bfs(g, l);
        std::fill(delta.begin(), delta.end(), 0.0);
        // Farthest-first dependency accumulation; a LEAF endpoint contributes
        // the pair itself, interior nodes inherit proportionally by path count.
        for (auto it = rs.order.rbegin(); it != rs.order.rend(); ++it) {
            auto w = static_cast<std::size_t>(*it);
            double endpoint = g.nodes[w].kind == NodeKind::Leaf ? 1.0 : 0.0;
            for (int v : rs.dag_pred[w]) {
                auto vi = static_cast<std::size_t>(v);
                delta[vi] += static_cast<double>(rs.sigma[vi]) / static_cast<double>(rs.sigma[w]) *
                             (endpoint + delta[w]);
            }
        }
        for (std::size_t v = 0; v < g.nodes.size(); ++v)
            if (static_cast<int>(v) != l) bn[v] += delta[v];
    }

    double sum = 0.0;
    for (int p : privileges) {
        double value = bn[static_cast<std::size_t>(p)];
        out.per_privilege[g.nodes[static_cast<std::size_t>(p)].label] = value;
        sum += value;
    }
    out.average = sum / static_cast<double>(privileges.size());
    return out;
}

RobustnessReport compute_robustness_report(const AttackGraph& g) {
    RobustnessReport report;
    report.cmc = cmc(g);
    PathCounts paths = shortest_attack_paths(g);
    report.nsp = paths.nsp;
    report.mspl = paths.mspl;
    report.cmpl = paths.cmpl;
    report.attack_path_length_histogram = std::move(paths.histogram);
    OutDegreeStats degrees = privilege_out_degree(g);
    report.aod = degrees.aod;
    report.mod = degrees.mod;
    BetweennessResult bn = betweenness(g);
    report.avg_betweenness = bn.average;
    report.betweenness_per_node = std::move(bn.per_privilege);
    return report;
}

}  // namespace microseg
