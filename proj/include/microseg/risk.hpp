#pragma once

#include <map>
#include <string>

#include "microseg/attackgraph.hpp"

namespace microseg {

enum class RiskMethod { Auto, Exact, Iterative };

std::string to_string(RiskMethod method);

struct RiskOptions {
    RiskMethod method = RiskMethod::Auto;
    // Auto picks the exact method when the graph has at most this many
    // AND + OR nodes, the iterative method otherwise.
    int node_budget = 20;
    double tolerance = 1e-9;
    int max_iterations = 100000;
    // Inclusion-exclusion term cap; past it the exact method switches to
    // joint enumeration of the AND events (still exact).
    int max_minimal_sets = 22;
};

struct RiskReport {
    std::map<std::string, double> per_privilege;  // node label -> probability
    RiskMethod method_used = RiskMethod::Exact;
};

// CVSS base score mapped linearly onto [0, 1].
double exploit_probability(const VulnerabilityRecord& v);

// One probability per AND node: attack steps backed by a vulnerability
// premise get that vulnerability's mapped CVSS; pure reachability steps are
// certain (probability 1).
std::map<std::string, double> default_and_probabilities(const AttackGraph& g);

// Probability that each privilege is eventually obtained, treating every AND
// node's exploit as an independent event while premises shared between
// derivations remain one event (never re-sampled). Configuration leaves are
// certain. The exact method enumerates minimal well-founded derivations and
// applies inclusion-exclusion over their AND sets; the iterative method is a
// noisy-OR fixed point over the condensation, cutting cycles by reading the
// previous iteration's values, monotone non-decreasing from 0, run to
// `tolerance`. Throws RiskError when an AND node has no probability, a
// probability is outside [0, 1], or a forced exact run exceeds 25 AND nodes.
RiskReport cumulative_risk(const AttackGraph& g, const std::map<std::string, double>& and_probs,
                           const RiskOptions& opts = {});

}  // namespace microseg
