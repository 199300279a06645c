// Acceptance gate: ten end-to-end checks, one PASS or FAIL line each.
// Tolerances are pinned here; the exit status is nonzero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "microseg/pipeline.hpp"
#include "microseg/synth.hpp"
#include "oracles.hpp"

using namespace microseg;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kRealTol = 1e-12;   // real-valued metrics vs independent recomputation
constexpr double kBruteTol = 1e-9;   // exact risk vs joint-outcome enumeration
constexpr double kIterTol = 1e-6;    // iterative risk vs exact on acyclic fixtures

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Collects the first failing condition of a criterion.
struct Check {
    std::string detail;

    bool ok() const { return detail.empty(); }
    void require(bool cond, const std::string& what) {
        if (!cond && detail.empty()) detail = what;
    }
};

int g_failed = 0;

void criterion(int id, const char* title, const std::function<void(Check&)>& body) {
    Check c;
    auto t0 = Clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    double secs = seconds_since(t0);
    if (c.ok()) {
        std::printf("PASS criterion %2d: %s (%.2fs)\n", id, title, secs);
    } else {
        std::printf("FAIL criterion %2d: %s (%.2fs) [%s]\n", id, title, secs, c.detail.c_str());
        ++g_failed;
    }
    std::fflush(stdout);
}

NetworkSpec internal_only(int n) {
    NetworkSpec spec;
    for (int i = 0; i < n; ++i) {
        Host h;
        h.id = "h" + std::to_string(i);
        h.name = h.id;
        h.zone = Zone::Internal;
        spec.hosts.push_back(std::move(h));
    }
    return spec;
}

// Hand-wired attack graphs for the risk anchors.
struct Builder {
    AttackGraph g;

    int leaf(const std::string& label) {
        AttackNode n;
        n.kind = NodeKind::Leaf;
        n.label = label;
        n.fact = FactKind::Hacl;
        return g.add_node(std::move(n));
    }
    int step(const std::string& label) {
        AttackNode n;
        n.kind = NodeKind::And;
        n.label = label;
        n.rule = AttackRule::RemoteExploit;
        return g.add_node(std::move(n));
    }
    int priv(const std::string& label) {
        AttackNode n;
        n.kind = NodeKind::Or;
        n.label = label;
        n.literal = LiteralKind::ExecCode;
        return g.add_node(std::move(n));
    }
};

RiskOptions forced(RiskMethod m) {
    RiskOptions opts;
    opts.method = m;
    return opts;
}

std::set<std::string> node_set(const AttackGraph& g) {
    std::set<std::string> out;
    for (const AttackNode& n : g.nodes) {
        const char* kind = n.kind == NodeKind::Leaf ? "leaf|" : n.kind == NodeKind::And ? "and|" : "or|";
        out.insert(kind + n.label);
    }
    return out;
}

std::string diff_sets(const std::set<std::string>& got, const std::set<std::string>& want) {
    for (const std::string& s : got)
        if (!want.count(s)) return "unexpected node " + s;
    for (const std::string& s : want)
        if (!got.count(s)) return "missing node " + s;
    return "";
}

}  // namespace

int main() {
    const ProtocolUniverse universe = ProtocolUniverse::standard();

    // Shared synthetic enterprise for criteria 3 and 9.
    std::optional<CompareResult> tiered;
    std::string tiered_error;
    try {
        SynthConfig cfg;
        cfg.host_count = 60;
        cfg.seed = 7;
        cfg.vuln_density = 0.5;
        SynthOutput enterprise = generate(cfg);
        tiered = run_compare(enterprise.spec, enterprise.flat_policy, enterprise.segmented_policy,
                             enterprise.scan, universe);
    } catch (const std::exception& e) {
        tiered_error = e.what();
    }

    criterion(1, "flat baseline service-channel totals at 300 and 238 hosts", [&](Check& c) {
        auto t0 = Clock::now();
        std::uint64_t big = enice(build_flat(internal_only(300), universe, kMaxPort));
        std::uint64_t mid = enice(build_flat(internal_only(238), universe, kMaxPort));
        double secs = seconds_since(t0);
        c.require(big == 17635468500ULL, "300-host total " + std::to_string(big));
        c.require(mid == 11089701630ULL, "238-host total " + std::to_string(mid));
        c.require(secs < 5.0, "took " + fmt(secs) + "s");
    });

    criterion(2, "complete-graph exposure metrics at 5, 50 and 300 hosts", [&](Check& c) {
        for (int n : {5, 50, 300}) {
            ExposureReport r = compute_exposure_report(build_flat(internal_only(n), universe, kMaxPort));
            std::string tag = std::to_string(n) + " hosts: ";
            c.require(r.global_clustering == 1.0, tag + "clustering");
            c.require(r.mean_path_length == 1.0, tag + "mean path length");
            c.require(r.diameter == 1, tag + "diameter");
            c.require(r.infinity_fraction == 0.0, tag + "infinity fraction");
            c.require(r.avg_out_degree == static_cast<double>(n - 1), tag + "avg out-degree");
            c.require(r.avg_closeness == 1.0, tag + "avg closeness");
            c.require(r.tinr == static_cast<std::uint64_t>(n) * (n - 1), tag + "reachable pairs");
        }
    });

    criterion(3, "tiered segmentation topology and improvement targets", [&](Check& c) {
        c.require(tiered.has_value(), "enterprise fixture failed: " + tiered_error);
        if (!tiered) return;
        const ExposureReport& seg = tiered->segmented.exposure;
        c.require(seg.mean_path_length && *seg.mean_path_length >= 2.0 && *seg.mean_path_length <= 3.0,
                  "segmented mean path length " +
                      (seg.mean_path_length ? fmt(*seg.mean_path_length) : std::string("absent")));
        c.require(seg.diameter == 3,
                  "segmented diameter " + (seg.diameter ? std::to_string(*seg.diameter) : std::string("absent")));
        const auto& imp = tiered->improvement_percentages;
        c.require(imp.count("enice") && imp.at("enice") >= 99.0,
                  "service-channel improvement " + (imp.count("enice") ? fmt(imp.at("enice")) : std::string("absent")));
        c.require(imp.count("global_clustering") && imp.at("global_clustering") >= 60.0,
                  "clustering improvement " +
                      (imp.count("global_clustering") ? fmt(imp.at("global_clustering")) : std::string("absent")));
    });

    criterion(4, "exposure metrics match brute force on 200 random digraphs", [&](Check& c) {
        std::mt19937_64 rng(424242);
        const double edge_prob[4] = {0.08, 0.2, 0.45, 0.8};
        auto t0 = Clock::now();
        for (int round = 0; round < 200 && c.ok(); ++round) {
            std::string tag = "round " + std::to_string(round) + ": ";
            ConnectivityGraph g = oracle::random_connectivity(rng, 12, edge_prob[round % 4]);
            int n = g.vertex_count();
            std::vector<std::vector<int>> succ;
            succ.reserve(static_cast<std::size_t>(n));
            for (int u = 0; u < n; ++u) succ.push_back(g.out_neighbors(u));
            auto dist = oracle::all_pairs_hops(n, succ);
            oracle::PathStats want = oracle::path_stats(dist);

            ExposureReport r = compute_exposure_report(g);
            c.require(r.mean_path_length.has_value() == want.mean.has_value(), tag + "mean presence");
            if (r.mean_path_length && want.mean)
                c.require(std::fabs(*r.mean_path_length - *want.mean) <= kRealTol, tag + "mean value");
            c.require(r.diameter == want.diameter, tag + "diameter");
            c.require(std::fabs(r.infinity_fraction - want.infinity_fraction) <= kRealTol,
                      tag + "infinity fraction");
            c.require(r.tinr == want.reachable, tag + "reachable pairs");

            if (n >= 3) {
                std::vector<std::vector<bool>> und(static_cast<std::size_t>(n),
                                                   std::vector<bool>(static_cast<std::size_t>(n), false));
                for (const auto& [key, permit] : g.edges) {
                    und[static_cast<std::size_t>(key.first)][static_cast<std::size_t>(key.second)] = true;
                    und[static_cast<std::size_t>(key.second)][static_cast<std::size_t>(key.first)] = true;
                }
                double wc = oracle::global_clustering(und);
                c.require(r.global_clustering && std::fabs(*r.global_clustering - wc) <= kRealTol,
                          tag + "clustering");
            } else {
                c.require(!r.global_clustering, tag + "clustering should be absent");
            }

            std::vector<double> close = oracle::closeness(dist);
            double sum = 0.0;
            for (int v = 0; v < n; ++v) {
                sum += close[static_cast<std::size_t>(v)];
                c.require(std::fabs(r.closeness_per_node.at(g.vertices[static_cast<std::size_t>(v)]) -
                                    close[static_cast<std::size_t>(v)]) <= kRealTol,
                          tag + "closeness of " + g.vertices[static_cast<std::size_t>(v)]);
            }
            c.require(std::fabs(r.avg_closeness - sum / n) <= kRealTol, tag + "avg closeness");
        }
        double secs = seconds_since(t0);
        c.require(secs < 30.0, "took " + fmt(secs) + "s");
    });

    criterion(5, "robustness metrics match exhaustive census on 100 attack graphs", [&](Check& c) {
        std::mt19937_64 rng(515151);
        auto t0 = Clock::now();
        int accepted = 0;
        for (int attempt = 0; attempt < 4000 && accepted < 100 && c.ok(); ++attempt) {
            AttackGraph g = derive(oracle::random_facts(rng));
            if (g.node_count() > 30) continue;
            ++accepted;
            std::string tag = "graph " + std::to_string(accepted) + ": ";

            int n = g.node_count();
            std::vector<int> roots = g.leaves();
            std::vector<int> privs = g.privileges();
            std::uint64_t nsp = 0, cmpl = 0;
            int mspl = -1;
            std::map<int, std::uint64_t> hist;
            std::vector<double> bn(static_cast<std::size_t>(n), 0.0);
            for (int r : roots)
                for (int p : privs) {
                    oracle::PathCensus cen = oracle::shortest_path_census(g.succ, r, p);
                    if (cen.count == 0) continue;
                    nsp += cen.count;
                    if (mspl < 0 || cen.dist < mspl) {
                        mspl = cen.dist;
                        cmpl = 0;
                    }
                    if (cen.dist == mspl) cmpl += cen.count;
                    hist[cen.dist] += cen.count;
                    for (int v = 0; v < n; ++v)
                        if (cen.through[static_cast<std::size_t>(v)])
                            bn[static_cast<std::size_t>(v)] +=
                                static_cast<double>(cen.through[static_cast<std::size_t>(v)]) /
                                static_cast<double>(cen.count);
                }

            PathCounts pc = shortest_attack_paths(g);
            if (nsp == 0) {
                c.require(!pc.nsp && !pc.mspl && !pc.cmpl && pc.histogram.empty(),
                          tag + "counts should be absent");
            } else {
                c.require(pc.nsp == nsp, tag + "path count");
                c.require(pc.mspl == mspl, tag + "minimal length");
                c.require(pc.cmpl == cmpl, tag + "paths at minimum");
                c.require(pc.histogram == hist, tag + "length histogram");
            }

            BetweennessResult bt = betweenness(g);
            if (privs.empty()) {
                c.require(!bt.average, tag + "betweenness should be absent");
            } else {
                double sum = 0.0;
                for (int p : privs) {
                    double want = bn[static_cast<std::size_t>(p)];
                    sum += want;
                    c.require(std::fabs(bt.per_privilege.at(g.nodes[static_cast<std::size_t>(p)].label) -
                                        want) <= kRealTol,
                              tag + "betweenness of " + g.nodes[static_cast<std::size_t>(p)].label);
                }
                c.require(bt.average &&
                              std::fabs(*bt.average - sum / static_cast<double>(privs.size())) <= kRealTol,
                          tag + "avg betweenness");
            }
        }
        double secs = seconds_since(t0);
        c.require(accepted == 100, "only " + std::to_string(accepted) + " graphs sampled");
        c.require(secs < 60.0, "took " + fmt(secs) + "s");
    });

    criterion(6, "hand-checked derivations and per-host configuration counts", [&](Check& c) {
        // Single host: reach, exploit, escalate.
        std::vector<Fact> chain = {
            AttackerLocatedFact{"internet"},
            HaclFact{"internet", "web", "tcp", PortRange{80, 80}},
            ServiceFact{"web", "httpd", "tcp", 80, Privilege::User},
            VulnFact{"web", "CVE-X", "httpd", VulnRange::RemoteExploit, Consequence::PrivEscalation, 8.0},
            VulnFact{"web", "CVE-L", "os", VulnRange::LocalExploit, Consequence::PrivEscalation, 7.0},
        };
        std::set<std::string> want_chain = {
            "leaf|attackerLocated(internet)",
            "leaf|hacl(internet,web,tcp,80)",
            "leaf|networkServiceInfo(web,httpd,tcp,80,user)",
            "leaf|vulExists(web,CVE-X,httpd,remoteExploit,privEscalation)",
            "leaf|vulExists(web,CVE-L,os,localExploit,privEscalation)",
            "or|netAccess(web,tcp,80)",
            "or|execCode(web,user)",
            "or|execCode(web,root)",
            "and|directReach(netAccess(web,tcp,80) <- attackerLocated(internet) hacl(internet,web,tcp,80))",
            "and|remoteExploit(execCode(web,user) <- netAccess(web,tcp,80) networkServiceInfo(web,httpd,tcp,80,user) vulExists(web,CVE-X,httpd,remoteExploit,privEscalation))",
            "and|localEscalation(execCode(web,root) <- execCode(web,user) vulExists(web,CVE-L,os,localExploit,privEscalation))",
        };
        c.require(node_set(derive(chain)) == want_chain,
                  "escalation chain: " + diff_sets(node_set(derive(chain)), want_chain));

        // Two hops: foothold on web, pivot to db.
        std::vector<Fact> pivot = {
            AttackerLocatedFact{"internet"},
            HaclFact{"internet", "web", "tcp", PortRange{80, 80}},
            HaclFact{"web", "db", "tcp", PortRange{1433, 1433}},
            ServiceFact{"web", "httpd", "tcp", 80, Privilege::User},
            ServiceFact{"db", "mssql", "tcp", 1433, Privilege::User},
            VulnFact{"web", "CVE-X", "httpd", VulnRange::RemoteExploit, Consequence::PrivEscalation, 8.0},
            VulnFact{"db", "CVE-Y", "mssql", VulnRange::RemoteExploit, Consequence::PrivEscalation, 6.0},
        };
        std::set<std::string> want_pivot = {
            "leaf|attackerLocated(internet)",
            "leaf|hacl(internet,web,tcp,80)",
            "leaf|hacl(web,db,tcp,1433)",
            "leaf|networkServiceInfo(web,httpd,tcp,80,user)",
            "leaf|networkServiceInfo(db,mssql,tcp,1433,user)",
            "leaf|vulExists(web,CVE-X,httpd,remoteExploit,privEscalation)",
            "leaf|vulExists(db,CVE-Y,mssql,remoteExploit,privEscalation)",
            "or|netAccess(web,tcp,80)",
            "or|netAccess(db,tcp,1433)",
            "or|execCode(web,user)",
            "or|execCode(db,user)",
            "and|directReach(netAccess(web,tcp,80) <- attackerLocated(internet) hacl(internet,web,tcp,80))",
            "and|remoteExploit(execCode(web,user) <- netAccess(web,tcp,80) networkServiceInfo(web,httpd,tcp,80,user) vulExists(web,CVE-X,httpd,remoteExploit,privEscalation))",
            "and|lateralReach(netAccess(db,tcp,1433) <- execCode(web,user) hacl(web,db,tcp,1433))",
            "and|remoteExploit(execCode(db,user) <- netAccess(db,tcp,1433) networkServiceInfo(db,mssql,tcp,1433,user) vulExists(db,CVE-Y,mssql,remoteExploit,privEscalation))",
        };
        c.require(node_set(derive(pivot)) == want_pivot,
                  "pivot chain: " + diff_sets(node_set(derive(pivot)), want_pivot));

        // Same facts without the perimeter permit: nothing fires, facts remain.
        std::vector<Fact> sealed(pivot);
        sealed.erase(sealed.begin() + 1);
        std::set<std::string> want_sealed = {
            "leaf|attackerLocated(internet)",
            "leaf|hacl(web,db,tcp,1433)",
            "leaf|networkServiceInfo(web,httpd,tcp,80,user)",
            "leaf|networkServiceInfo(db,mssql,tcp,1433,user)",
            "leaf|vulExists(web,CVE-X,httpd,remoteExploit,privEscalation)",
            "leaf|vulExists(db,CVE-Y,mssql,remoteExploit,privEscalation)",
        };
        AttackGraph gs = derive(sealed);
        c.require(node_set(gs) == want_sealed, "sealed set: " + diff_sets(node_set(gs), want_sealed));
        c.require(gs.edge_count() == 0, "sealed set has edges");

        // Configuration facts touching one host under both policy styles.
        NetworkSpec spec;
        for (const char* id : {"internet", "target", "peer1", "peer2"}) {
            Host h;
            h.id = id;
            h.name = id;
            h.zone = std::string(id) == "internet" ? Zone::Internet : Zone::Internal;
            spec.hosts.push_back(std::move(h));
        }
        spec.services.push_back(ServiceEndpoint{"target", "iis", "tcp", 443, Privilege::User});

        PolicySet narrow;
        narrow.mode = PolicyMode::Segmented;
        narrow.rules.push_back(FirewallRule{"internet", "target", "tcp", PortRange{443, 443}});
        std::size_t seg_count =
            derive(compile_facts(spec, narrow, ScanDocument{}, universe)).config_fact_count_involving("target");
        c.require(seg_count == 3, "segmented config count " + std::to_string(seg_count));

        PolicySet broad;
        broad.mode = PolicyMode::Flat;
        broad.rules.push_back(FirewallRule{"*", "*", "*", PortRange{1, kMaxPort}});
        broad.rules.push_back(FirewallRule{"internet", "target", "tcp", PortRange{443, 443}});
        std::size_t flat_count =
            derive(compile_facts(spec, broad, ScanDocument{}, universe)).config_fact_count_involving("target");
        c.require(flat_count >= 10, "flat config count " + std::to_string(flat_count));
    });

    criterion(7, "risk anchors, brute-force and iterative cross-checks", [&](Check& c) {
        {
            Builder b;
            int r = b.leaf("ground");
            int a0 = b.step("step0");
            int p0 = b.priv("priv0");
            int a1 = b.step("step1");
            int p1 = b.priv("priv1");
            b.g.add_edge(r, a0);
            b.g.add_edge(a0, p0);
            b.g.add_edge(p0, a1);
            b.g.add_edge(a1, p1);
            std::map<std::string, double> probs{{"step0", 0.8}, {"step1", 0.8}};
            RiskReport ex = cumulative_risk(b.g, probs, forced(RiskMethod::Exact));
            c.require(std::fabs(ex.per_privilege.at("priv1") - 0.64) <= kRealTol,
                      "serial chain exact " + fmt(ex.per_privilege.at("priv1")));
            RiskReport it = cumulative_risk(b.g, probs, forced(RiskMethod::Iterative));
            c.require(std::fabs(it.per_privilege.at("priv1") - 0.64) <= kIterTol,
                      "serial chain iterative " + fmt(it.per_privilege.at("priv1")));
        }
        {
            Builder b;
            int r = b.leaf("ground");
            int a0 = b.step("step0");
            int a1 = b.step("step1");
            int p0 = b.priv("priv0");
            b.g.add_edge(r, a0);
            b.g.add_edge(r, a1);
            b.g.add_edge(a0, p0);
            b.g.add_edge(a1, p0);
            std::map<std::string, double> probs{{"step0", 0.5}, {"step1", 0.5}};
            RiskReport ex = cumulative_risk(b.g, probs, forced(RiskMethod::Exact));
            c.require(std::fabs(ex.per_privilege.at("priv0") - 0.75) <= kRealTol,
                      "parallel pair exact " + fmt(ex.per_privilege.at("priv0")));
            RiskReport it = cumulative_risk(b.g, probs, forced(RiskMethod::Iterative));
            c.require(std::fabs(it.per_privilege.at("priv0") - 0.75) <= kIterTol,
                      "parallel pair iterative " + fmt(it.per_privilege.at("priv0")));
        }

        std::mt19937_64 rng(7117);
        int solved = 0;
        for (int round = 0; round < 400 && solved < 25 && c.ok(); ++round) {
            AttackGraph g = derive(oracle::random_facts(rng));
            std::vector<int> ands = g.and_nodes();
            if (ands.empty() || ands.size() > 15 || g.privileges().empty()) continue;
            std::map<std::string, double> probs;
            int k = 0;
            for (int a : ands)
                probs[g.nodes[static_cast<std::size_t>(a)].label] = (k++ % 2) ? 0.85 : 0.55;
            RiskReport got = cumulative_risk(g, probs, forced(RiskMethod::Exact));
            std::map<std::string, double> want = oracle::brute_risk(g, probs);
            for (const auto& [label, p] : want)
                c.require(std::fabs(got.per_privilege.at(label) - p) <= kBruteTol,
                          "graph " + std::to_string(solved) + ": " + label + " got " +
                              fmt(got.per_privilege.at(label)) + " want " + fmt(p));
            ++solved;
        }
        c.require(solved >= 25, "only " + std::to_string(solved) + " graphs under the event cap");

        for (int depth : {1, 2, 3}) {
            Builder b;
            int root = b.leaf("ground");
            int goal = b.priv("goal");
            std::map<std::string, double> probs;
            double miss = 1.0;
            for (int branch = 0; branch < 2; ++branch) {
                int prev = root;
                double product = 1.0;
                for (int i = 0; i < depth; ++i) {
                    std::string name = "b" + std::to_string(branch) + "s" + std::to_string(i);
                    int a = b.step(name);
                    b.g.add_edge(prev, a);
                    double p = 0.3 + 0.2 * i;
                    probs[name] = p;
                    product *= p;
                    int target = i + 1 == depth
                                     ? goal
                                     : b.priv("b" + std::to_string(branch) + "p" + std::to_string(i));
                    b.g.add_edge(a, target);
                    prev = target;
                }
                miss *= 1.0 - product;
            }
            RiskReport ex = cumulative_risk(b.g, probs, forced(RiskMethod::Exact));
            RiskReport it = cumulative_risk(b.g, probs, forced(RiskMethod::Iterative));
            std::string tag = "depth " + std::to_string(depth) + ": ";
            c.require(std::fabs(ex.per_privilege.at("goal") - (1.0 - miss)) <= kRealTol,
                      tag + "exact goal " + fmt(ex.per_privilege.at("goal")));
            for (const auto& [label, p] : ex.per_privilege)
                c.require(std::fabs(it.per_privilege.at(label) - p) <= kIterTol,
                          tag + "iterative drift on " + label);
        }
    });

    criterion(8, "metrics stay monotone under 500 random rule deletions", [&](Check& c) {
        // Two entry hosts feed five app hosts feeding three databases, with no
        // intra-layer rules. In this shape a deletion can only remove paths,
        // never reroute one onto a different length, and four deletions are
        // too few to sever any two-hop pair, so each clause below is exact.
        NetworkSpec spec = internal_only(10);
        Host inet;
        inet.id = "internet";
        inet.name = "internet";
        inet.zone = Zone::Internet;
        spec.hosts.push_back(std::move(inet));
        for (int i = 0; i < 10; ++i)
            spec.services.push_back(ServiceEndpoint{"h" + std::to_string(i), "svc" + std::to_string(i),
                                                    "tcp", 8000 + i, Privilege::User});

        ScanDocument scan;
        scan.findings = {
            VulnerabilityRecord{"h0", "CVE-2020-0000", "svc0", VulnRange::RemoteExploit,
                                Consequence::PrivEscalation, 6.0},
            VulnerabilityRecord{"h1", "CVE-2020-0001", "svc1", VulnRange::RemoteExploit,
                                Consequence::PrivEscalation, 7.0},
            VulnerabilityRecord{"h2", "CVE-2020-0002", "svc2", VulnRange::RemoteExploit,
                                Consequence::PrivEscalation, 5.0},
            VulnerabilityRecord{"h3", "CVE-2020-0003", "svc3", VulnRange::RemoteExploit,
                                Consequence::PrivEscalation, 6.5},
            VulnerabilityRecord{"h4", "CVE-2020-0004", "svc4", VulnRange::RemoteExploit,
                                Consequence::PrivEscalation, 7.5},
            VulnerabilityRecord{"h5", "CVE-2020-0005", "svc5", VulnRange::RemoteExploit,
                                Consequence::PrivEscalation, 8.0},
            VulnerabilityRecord{"h6", "CVE-2020-0006", "svc6", VulnRange::RemoteExploit,
                                Consequence::PrivEscalation, 9.0},
            VulnerabilityRecord{"h0", "CVE-2020-0100", "os", VulnRange::LocalExploit,
                                Consequence::PrivEscalation, 7.5},
            VulnerabilityRecord{"h3", "CVE-2020-0103", "os", VulnRange::LocalExploit,
                                Consequence::PrivEscalation, 8.5},
        };

        PolicySet base;
        base.mode = PolicyMode::Segmented;
        for (int e = 0; e < 2; ++e)
            for (int a = 2; a < 7; ++a)
                base.rules.push_back(FirewallRule{"h" + std::to_string(e), "h" + std::to_string(a),
                                                  "*", PortRange{1, kMaxPort}});
        for (int a = 2; a < 7; ++a)
            for (int d = 7; d < 10; ++d)
                base.rules.push_back(FirewallRule{"h" + std::to_string(a), "h" + std::to_string(d),
                                                  "*", PortRange{1, kMaxPort}});
        base.rules.push_back(FirewallRule{"internet", "h0", "tcp", PortRange{1, kMaxPort}});
        base.rules.push_back(FirewallRule{"internet", "h1", "tcp", PortRange{1, kMaxPort}});

        AnalyzeResult before = run_analyze(spec, base, scan, universe);
        c.require(before.exposure.mean_path_length.has_value(), "baseline has no paths");
        c.require(before.robustness && before.robustness->nsp && before.risk &&
                      !before.risk->per_privilege.empty(),
                  "baseline attack stage empty");
        if (!c.ok()) return;

        std::mt19937_64 rng(8855);
        std::vector<std::size_t> order(base.rules.size());
        for (int round = 0; round < 500 && c.ok(); ++round) {
            std::string tag = "round " + std::to_string(round) + ": ";
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), rng);
            std::vector<std::size_t> drop(order.begin(), order.begin() + 1 + round % 4);
            std::sort(drop.rbegin(), drop.rend());
            PolicySet mutated = base;
            for (std::size_t at : drop)
                mutated.rules.erase(mutated.rules.begin() + static_cast<std::ptrdiff_t>(at));

            AnalyzeResult after = run_analyze(spec, mutated, scan, universe);
            const ExposureReport& ae = after.exposure;
            const ExposureReport& be = before.exposure;
            c.require(ae.enice <= be.enice, tag + "service channels grew");
            c.require(ae.tinr <= be.tinr, tag + "reachable pairs grew");
            c.require(ae.avg_out_degree <= be.avg_out_degree + kRealTol, tag + "avg out-degree grew");
            if (ae.mean_path_length && be.mean_path_length)
                c.require(*ae.mean_path_length >= *be.mean_path_length - kRealTol,
                          tag + "mean path length shrank");
            c.require(after.robustness->cmc <= before.robustness->cmc, tag + "config count grew");
            c.require(after.robustness->nsp.value_or(0) <= *before.robustness->nsp,
                      tag + "path count grew");
            for (const auto& [label, p] : after.risk->per_privilege) {
                auto hit = before.risk->per_privilege.find(label);
                c.require(hit != before.risk->per_privilege.end(), tag + "new privilege " + label);
                if (hit != before.risk->per_privilege.end())
                    c.require(p <= hit->second + kIterTol, tag + "risk grew on " + label);
            }
        }
    });

    criterion(9, "segmentation strictly lowers attack-graph aggregates", [&](Check& c) {
        c.require(tiered.has_value(), "enterprise fixture failed: " + tiered_error);
        if (!tiered) return;
        c.require(tiered->flat.robustness && tiered->segmented.robustness, "attack stage missing");
        if (!tiered->flat.robustness || !tiered->segmented.robustness) return;
        const RobustnessReport& flat = *tiered->flat.robustness;
        const RobustnessReport& seg = *tiered->segmented.robustness;
        c.require(seg.cmc < flat.cmc,
                  "config counts " + std::to_string(seg.cmc) + " vs " + std::to_string(flat.cmc));
        c.require(flat.nsp && seg.nsp && *seg.nsp < *flat.nsp, "path counts not reduced");
        c.require(flat.aod && seg.aod && *seg.aod < *flat.aod, "out-degrees not reduced");
        c.require(flat.avg_betweenness && seg.avg_betweenness &&
                      *seg.avg_betweenness < *flat.avg_betweenness,
                  "betweenness not reduced");
    });

    criterion(10, "300-host compare pipeline finishes under a minute", [&](Check& c) {
        SynthConfig cfg;
        cfg.host_count = 300;
        cfg.seed = 3;
        SynthOutput enterprise = generate(cfg);
        auto t0 = Clock::now();
        CompareResult result = run_compare(enterprise.spec, enterprise.flat_policy,
                                           enterprise.segmented_policy, enterprise.scan, universe);
        double secs = seconds_since(t0);
        c.require(result.flat.robustness && result.segmented.robustness, "attack stage missing");
        c.require(!result.improvement_percentages.empty(), "no improvements reported");
        c.require(secs < 60.0, "took " + fmt(secs) + "s");
    });

    if (g_failed > 0) {
        std::printf("%d of 10 criteria failed\n", g_failed);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
