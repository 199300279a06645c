#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "microseg/attackgraph.hpp"

namespace microseg {

// Shortest-path census over every ordered (root, privilege) pair, where roots
// are the LEAF nodes and path length counts edges. All fields are absent when
// no root reaches any privilege; this is distinct from a zero count.
struct PathCounts {
    std::optional<std::uint64_t> nsp;   // shortest paths summed over all pairs
    std::optional<int> mspl;            // globally minimal shortest-path length
    std::optional<std::uint64_t> cmpl;  // shortest paths achieving that minimum
    std::map<int, std::uint64_t> histogram;
};

struct OutDegreeStats {
    std::optional<double> aod;
    std::optional<std::uint64_t> mod;
};

struct BetweennessResult {
    std::optional<double> average;  // mean over the privilege nodes
    std::map<std::string, double> per_privilege;
};

struct RobustnessReport {
    std::uint64_t cmc = 0;
    std::optional<std::uint64_t> nsp;
    std::optional<int> mspl;
    std::optional<std::uint64_t> cmpl;
    std::optional<double> aod;
    std::optional<std::uint64_t> mod;
    std::optional<double> avg_betweenness;
    std::map<std::string, double> betweenness_per_node;
    std::map<int, std::uint64_t> attack_path_length_histogram;
};

// Count of configuration (LEAF) nodes.
std::uint64_t cmc(const AttackGraph& g);

// Exact shortest-path counting by BFS layering per privilege node; shortest
// paths in an unweighted digraph never revisit a vertex, so the counts equal
// simple-path counts at minimal length even through cycles.
PathCounts shortest_attack_paths(const AttackGraph& g);

// Mean and max out-degree over privilege nodes; absent when there are none.
OutDegreeStats privilege_out_degree(const AttackGraph& g);

// BN(n) for privilege node n: the fraction of shortest root-to-privilege
// paths passing through n, summed over all ordered (root, privilege) pairs
// with n interior. Unreachable pairs contribute 0.
BetweennessResult betweenness(const AttackGraph& g);

RobustnessReport compute_robustness_report(const AttackGraph& g);

}  // namespace microseg
