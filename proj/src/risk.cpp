#include "microseg/risk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace microseg {

std::string to_string(RiskMethod method) {
    switch (method) {
        case RiskMethod::Auto: return "auto";
        case RiskMethod::Exact: return "exact";
        case RiskMethod::Iterative: return "iterative";
    }
    return "?";
}

double exploit_probability(const VulnerabilityRecord& v) {
    if (v.cvss_base < 0.0 || v.cvss_base > 10.0)
        throw RiskError("cvss " + std::to_string(v.cvss_base) + " outside [0, 10] for " + v.vuln_id);
    return v.cvss_base / 10.0;
}

std::map<std::string, double> default_and_probabilities(const AttackGraph& g) {
    std::map<std::string, double> probs;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (g.nodes[i].kind != NodeKind::And) continue;
        double p = 1.0;
        for (int q : g.pred[i]) {
            const AttackNode& premise = g.nodes[static_cast<std::size_t>(q)];
            if (premise.fact == FactKind::VulExists && premise.cvss) {
                p = *premise.cvss / 10.0;
                break;
            }
        }
        probs[g.nodes[i].label] = p;
    }
    return probs;
}

namespace {

using Mask = std::uint64_t;

constexpr std::size_t kSetCap = 4096;       // support sets kept per subproblem
constexpr int kJointEnumerationCap = 25;    // AND events enumerable as 2^m outcomes

// Keeps only the minimal sets (no kept set is a superset of another).
void minimalize(std::vector<Mask>& sets) {
    std::sort(sets.begin(), sets.end(),
              [](Mask a, Mask b) { return std::popcount(a) < std::popcount(b); });
    std::vector<Mask> kept;
    for (Mask s : sets) {
        bool dominated = false;
        for (Mask k : kept)
            if ((k & s) == k) {
                dominated = true;
                break;
            }
        if (!dominated) kept.push_back(s);
    }
    sets = std::move(kept);
}

// Enumerates the AND sets of all minimal well-founded derivations of a node.
// The stack set confines the search to acyclic derivations. Returns nullopt
// when intermediate set counts exceed the cap.
struct SupportEnumerator {
    const AttackGraph& g;
    const std::vector<int>& and_index;  // node id -> bit, -1 for non-AND
    std::vector<char> on_stack;

    explicit SupportEnumerator(const AttackGraph& graph, const std::vector<int>& idx)
        : g(graph), and_index(idx), on_stack(graph.nodes.size(), 0) {}

    std::optional<std::vector<Mask>> for_node(int node) {
        const AttackNode& n = g.nodes[static_cast<std::size_t>(node)];
        if (n.kind == NodeKind::Leaf) return std::vector<Mask>{0};
        if (on_stack[static_cast<std::size_t>(node)]) return std::vector<Mask>{};
        on_stack[static_cast<std::size_t>(node)] = 1;
        std::optional<std::vector<Mask>> result =
            n.kind == NodeKind::Or ? for_or(node) : for_and(node);
        on_stack[static_cast<std::size_t>(node)] = 0;
        return result;
    }

    std::optional<std::vector<Mask>> for_or(int node) {
        std::vector<Mask> sets;
        for (int a : g.pred[static_cast<std::size_t>(node)]) {
            auto sub = for_node(a);
            if (!sub) return std::nullopt;
            sets.insert(sets.end(), sub->begin(), sub->end());
            if (sets.size() > kSetCap) return std::nullopt;
        }
        minimalize(sets);
        return sets;
    }

    std::optional<std::vector<Mask>> for_and(int node) {
        Mask self = Mask{1} << and_index[static_cast<std::size_t>(node)];
        std::vector<Mask> sets{self};
        for (int q : g.pred[static_cast<std::size_t>(node)]) {
            auto sub = for_node(q);
            if (!sub) return std::nullopt;
            if (sub->empty()) return std::vector<Mask>{};  // premise underivable here
            std::vector<Mask> combined;
            combined.reserve(sets.size() * sub->size());
            for (Mask s : sets)
                for (Mask t : *sub) {
                    combined.push_back(s | t);
                    if (combined.size() > kSetCap) return std::nullopt;
                }
            minimalize(combined);
            sets = std::move(combined);
        }
        return sets;
    }
};

double product_over(Mask bits, const std::vector<double>& p) {
    double prod = 1.0;
    while (bits) {
        int b = std::countr_zero(bits);
        bits &= bits - 1;
        prod *= p[static_cast<std::size_t>(b)];
    }
    return prod;
}

// Inclusion-exclusion over the union of "all ANDs in set i succeed" events.
double union_probability(const std::vector<Mask>& sets, const std::vector<double>& p) {
    double total = 0.0;
    auto rec = [&](auto&& self, std::size_t i, Mask mask, double prod, int count) -> void {
        if (i == sets.size()) {
            if (count > 0) total += (count % 2 == 1 ? prod : -prod);
            return;
        }
        self(self, i + 1, mask, prod, count);
        Mask extra = sets[i] & ~mask;
        self(self, i + 1, mask | sets[i], prod * product_over(extra, p), count + 1);
    };
    rec(rec, 0, 0, 1.0, 0);
    return total;
}

// Derivable OR nodes when exactly the AND events in `mask` succeed.
std::vector<char> derivable_under(const AttackGraph& g, const std::vector<int>& and_index,
                                  Mask mask) {
    std::vector<char> value(g.nodes.size(), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            if (value[i]) continue;
            const AttackNode& n = g.nodes[i];
            bool now = false;
            if (n.kind == NodeKind::Leaf) {
                now = true;
            } else if (n.kind == NodeKind::And) {
                if (mask & (Mask{1} << and_index[i])) {
                    now = true;
                    for (int q : g.pred[i])
                        if (!value[static_cast<std::size_t>(q)]) {
                            now = false;
                            break;
                        }
                }
            } else {
                for (int a : g.pred[i])
                    if (value[static_cast<std::size_t>(a)]) {
                        now = true;
                        break;
                    }
            }
            if (now) {
                value[i] = 1;
                changed = true;
            }
        }
    }
    return value;
}

std::map<std::string, double> exact_risk(const AttackGraph& g, const std::vector<double>& and_prob,
                                         const std::vector<int>& and_index, int and_count,
                                         const RiskOptions& opts) {
    std::map<std::string, double> out;
    SupportEnumerator enumerator(g, and_index);
    std::optional<std::map<std::string, double>> joint;  // computed at most once

    auto joint_values = [&]() -> const std::map<std::string, double>& {
        if (joint) return *joint;
        if (and_count > kJointEnumerationCap)
            throw RiskError("exact method infeasible: " + std::to_string(and_count) +
                            " attack-step events");
        std::map<std::string, double> values;
        for (int l : g.privileges()) values[g.nodes[static_cast<std::size_t>(l)].label] = 0.0;
        Mask top = Mask{1} << and_count;
        for (Mask mask = 0; mask < top; ++mask) {
            double weight = 1.0;
            for (int b = 0; b < and_count; ++b)
                weight *= (mask & (Mask{1} << b)) ? and_prob[static_cast<std::size_t>(b)]
                                                  : 1.0 - and_prob[static_cast<std::size_t>(b)];
            if (weight == 0.0) continue;
            auto value = derivable_under(g, and_index, mask);
            for (int l : g.privileges())
                if (value[static_cast<std::size_t>(l)])
                    values[g.nodes[static_cast<std::size_t>(l)].label] += weight;
        }
        joint = std::move(values);
        return *joint;
    };

    for (int l : g.privileges()) {
        const std::string& label = g.nodes[static_cast<std::size_t>(l)].label;
        auto sets = enumerator.for_node(l);
        if (sets && sets->size() <= static_cast<std::size_t>(opts.max_minimal_sets)) {
            out[label] = union_probability(*sets, and_prob);
        } else {
            out[label] = joint_values().at(label);
        }
    }
    return out;
}

std::map<std::string, double> iterative_risk(const AttackGraph& g,
                                             const std::vector<double>& prob_by_node,
                                             const RiskOptions& opts) {
    std::size_t n = g.nodes.size();

    // Tarjan SCCs; emission order has every SCC after all SCCs it reaches,
    // so reversing it evaluates premises before conclusions.
    std::vector<int> idx(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::vector<int>> sccs;
    int counter = 0;
    // Iterative Tarjan (graphs can be deep).
    struct Frame {
        int v;
        std::size_t edge;
    };
    for (std::size_t s = 0; s < n; ++s) {
        if (idx[s] >= 0) continue;
        std::vector<Frame> frames{{static_cast<int>(s), 0}};
        idx[s] = low[s] = counter++;
        stack.push_back(static_cast<int>(s));
        on_stack[s] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            auto vi = static_cast<std::size_t>(f.v);
            if (f.edge < g.succ[vi].size()) {
                int w = g.succ[vi][f.edge++];
                auto wi = static_cast<std::size_t>(w);
                if (idx[wi] < 0) {
                    idx[wi] = low[wi] = counter++;
                    stack.push_back(w);
                    on_stack[wi] = 1;
                    frames.push_back({w, 0});
                } else if (on_stack[wi]) {
                    low[vi] = std::min(low[vi], idx[wi]);
                }
            } else {
                if (low[vi] == idx[vi]) {
                    sccs.emplace_back();
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[static_cast<std::size_t>(w)] = 0;
                        comp[static_cast<std::size_t>(w)] = static_cast<int>(sccs.size()) - 1;
                        sccs.back().push_back(w);
                        if (w == f.v) break;
                    }
                }
                frames.pop_back();
                if (!frames.empty()) {
                    auto pi = static_cast<std::size_t>(frames.back().v);
                    low[pi] = std::min(low[pi], low[vi]);
                }
            }
        }
    }

    std::vector<double> value(n, 0.0);
    auto eval = [&](std::size_t i, const std::vector<double>& source) -> double {
        const AttackNode& node = g.nodes[i];
        if (node.kind == NodeKind::Leaf) return 1.0;
        if (node.kind == NodeKind::And) {
            double p = prob_by_node[i];
            for (int q : g.pred[i]) p *= source[static_cast<std::size_t>(q)];
            return p;
        }
        double miss = 1.0;
        for (int a : g.pred[i]) miss *= 1.0 - source[static_cast<std::size_t>(a)];
        return 1.0 - miss;
    };

    for (auto it = sccs.rbegin(); it != sccs.rend(); ++it) {
        const std::vector<int>& members = *it;
        if (members.size() == 1) {
            auto i = static_cast<std::size_t>(members.front());
            value[i] = eval(i, value);
            continue;
        }
        // Cyclic component: Jacobi sweeps reading the previous iteration,
        // starting from 0; monotone, so the limit is the least fixed point.
        for (int iter = 0; iter < opts.max_iterations; ++iter) {
            double delta = 0.0;
            std::vector<double> next = value;
            for (int m : members) {
                auto i = static_cast<std::size_t>(m);
                next[i] = eval(i, value);
                delta = std::max(delta, std::abs(next[i] - value[i]));
            }
            for (int m : members) {
                auto i = static_cast<std::size_t>(m);
                value[i] = next[i];
            }
            if (delta < opts.tolerance) break;
        }
    }

    std::map<std::string, double> out;
    for (int l : g.privileges()) out[g.nodes[static_cast<std::size_t>(l)].label] = value[static_cast<std::size_t>(l)];
    return out;
}

}  // namespace

RiskReport cumulative_risk(const AttackGraph& g, const std::map<std::string, double>& and_probs,
                           const RiskOptions& opts) {
    std::vector<int> and_index(g.nodes.size(), -1);
    std::vector<double> prob_by_node(g.nodes.size(), 1.0);
    std::vector<double> and_prob;
    int and_count = 0;
    int or_count = 0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (g.nodes[i].kind == NodeKind::Or) ++or_count;
        if (g.nodes[i].kind != NodeKind::And) continue;
        auto it = and_probs.find(g.nodes[i].label);
        if (it == and_probs.end())
            throw RiskError("no probability for attack step: " + g.nodes[i].label);
        if (it->second < 0.0 || it->second > 1.0)
            throw RiskError("probability outside [0, 1] for attack step: " + g.nodes[i].label);
        and_index[i] = and_count++;
        prob_by_node[i] = it->second;
        and_prob.push_back(it->second);
    }

    RiskMethod method = opts.method;
    if (method == RiskMethod::Auto)
        method = and_count + or_count <= opts.node_budget ? RiskMethod::Exact
                                                          : RiskMethod::Iterative;
    if (method == RiskMethod::Exact && and_count > kJointEnumerationCap)
        throw RiskError("exact method infeasible: " + std::to_string(and_count) +
                        " attack-step events");

    RiskReport report;
    report.method_used = method;
    report.per_privilege = method == RiskMethod::Exact
                               ? exact_risk(g, and_prob, and_index, and_count, opts)
                               : iterative_risk(g, prob_by_node, opts);
    return report;
}

}  // namespace microseg
