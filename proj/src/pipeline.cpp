#include "microseg/pipeline.hpp"

#include <fstream>

namespace microseg {

using nlohmann::json;

AnalyzeResult run_analyze(const NetworkSpec& spec, const PolicySet& policy,
                          const std::optional<ScanDocument>& scan, const ProtocolUniverse& universe,
                          const AnalyzeOptions& options) {
    AnalyzeResult result;
    if (policy.mode == PolicyMode::Flat)
        result.connectivity = build_flat(spec, universe, policy.port_space);
    else
        result.connectivity = build_segmented(spec, strip_perimeter_rules(policy, spec), universe);
    result.exposure = compute_exposure_report(result.connectivity, options.path_mode);

    if (scan) {
        result.attack_graph = build_attack_graph(spec, policy, *scan, universe);
        result.robustness = compute_robustness_report(*result.attack_graph);
        result.risk = cumulative_risk(*result.attack_graph,
                                      default_and_probabilities(*result.attack_graph), options.risk);
    }
    return result;
}

namespace {

// Mean cumulative compromise probability over a report's privileges.
std::optional<double> mean_risk(const std::optional<RiskReport>& report) {
    if (!report || report->per_privilege.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& [label, p] : report->per_privilege) sum += p;
    return sum / static_cast<double>(report->per_privilege.size());
}

void add_improvement(std::map<std::string, double>& out, const std::string& metric,
                     std::optional<double> flat, std::optional<double> segmented,
                     bool increase_good) {
    if (!flat || !segmented || *flat == 0.0) return;
    double delta = increase_good ? *segmented - *flat : *flat - *segmented;
    out[metric] = delta / *flat * 100.0;
}

template <typename T>
std::optional<double> num(const std::optional<T>& v) {
    if (!v) return std::nullopt;
    return static_cast<double>(*v);
}

}  // namespace

CompareResult run_compare(const NetworkSpec& spec, const PolicySet& flat_policy,
                          const PolicySet& segmented_policy,
                          const std::optional<ScanDocument>& scan, const ProtocolUniverse& universe,
                          const AnalyzeOptions& options) {
    CompareResult result;
    result.flat = run_analyze(spec, flat_policy, scan, universe, options);
    result.segmented = run_analyze(spec, segmented_policy, scan, universe, options);

    const ExposureReport& fe = result.flat.exposure;
    const ExposureReport& se = result.segmented.exposure;
    auto& imp = result.improvement_percentages;
    add_improvement(imp, "enice", static_cast<double>(fe.enice), static_cast<double>(se.enice), false);
    add_improvement(imp, "global_clustering", fe.global_clustering, se.global_clustering, false);
    add_improvement(imp, "mean_path_length", fe.mean_path_length, se.mean_path_length, true);
    add_improvement(imp, "diameter", num(fe.diameter), num(se.diameter), true);
    add_improvement(imp, "tinr", static_cast<double>(fe.tinr), static_cast<double>(se.tinr), false);
    add_improvement(imp, "avg_out_degree", fe.avg_out_degree, se.avg_out_degree, false);
    add_improvement(imp, "avg_closeness", fe.avg_closeness, se.avg_closeness, false);

    if (result.flat.robustness && result.segmented.robustness) {
        const RobustnessReport& fr = *result.flat.robustness;
        const RobustnessReport& sr = *result.segmented.robustness;
        add_improvement(imp, "cmc", static_cast<double>(fr.cmc), static_cast<double>(sr.cmc), false);
        add_improvement(imp, "nsp", num(fr.nsp), num(sr.nsp), false);
        add_improvement(imp, "cmpl", num(fr.cmpl), num(sr.cmpl), false);
        add_improvement(imp, "aod", fr.aod, sr.aod, false);
        add_improvement(imp, "mod", num(fr.mod), num(sr.mod), false);
        add_improvement(imp, "avg_betweenness", fr.avg_betweenness, sr.avg_betweenness, false);
    }
    add_improvement(imp, "mean_cumulative_risk", mean_risk(result.flat.risk),
                    mean_risk(result.segmented.risk), false);
    return result;
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
    if (!v) return nullptr;
    return *v;
}

json histogram_json(const std::map<int, std::uint64_t>& hist) {
    json out = json::object();
    for (const auto& [k, v] : hist) out[std::to_string(k)] = v;
    return out;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(12);
    s << v;
    return s.str();
}

}  // namespace

json to_json(const ExposureReport& r) {
    json out;
    out["host_count"] = r.host_count;
    out["edge_count"] = r.edge_count;
    out["enice"] = r.enice;
    out["global_clustering"] = opt(r.global_clustering);
    out["mean_path_length"] = opt(r.mean_path_length);
    out["diameter"] = opt(r.diameter);
    out["infinity_fraction"] = r.infinity_fraction;
    out["tinr"] = r.tinr;
    out["avg_out_degree"] = r.avg_out_degree;
    out["out_degree_per_node"] = r.out_degree_per_node;
    out["avg_closeness"] = r.avg_closeness;
    out["closeness_per_node"] = r.closeness_per_node;
    out["path_length_histogram"] = histogram_json(r.path_length_histogram);
    out["path_length_mode"] = r.mode == PathLengthMode::EdgeCount ? "edges" : "vertices";
    return out;
}

json to_json(const RobustnessReport& r) {
    json out;
    out["cmc"] = r.cmc;
    out["nsp"] = opt(r.nsp);
    out["mspl"] = opt(r.mspl);
    out["cmpl"] = opt(r.cmpl);
    out["aod"] = opt(r.aod);
    out["mod"] = opt(r.mod);
    out["avg_betweenness"] = opt(r.avg_betweenness);
    out["betweenness_per_node"] = r.betweenness_per_node;
    out["attack_path_length_histogram"] = histogram_json(r.attack_path_length_histogram);
    return out;
}

json to_json(const RiskReport& r) {
    json out;
    out["method"] = to_string(r.method_used);
    out["per_privilege"] = r.per_privilege;
    return out;
}

json comparison_json(const CompareResult& result) {
    json out;
    out["exposure_flat"] = to_json(result.flat.exposure);
    out["exposure_segmented"] = to_json(result.segmented.exposure);
    out["robustness_flat"] =
        result.flat.robustness ? to_json(*result.flat.robustness) : json(nullptr);
    out["robustness_segmented"] =
        result.segmented.robustness ? to_json(*result.segmented.robustness) : json(nullptr);
    out["risk_flat"] = result.flat.risk ? to_json(*result.flat.risk) : json(nullptr);
    out["risk_segmented"] = result.segmented.risk ? to_json(*result.segmented.risk) : json(nullptr);
    out["improvement_percentages"] = result.improvement_percentages;
    return out;
}

std::string exposure_csv(const ExposureReport& r) {
    std::ostringstream out;
    out << "metric,value\n";
    out << "host_count," << r.host_count << "\n";
    out << "edge_count," << r.edge_count << "\n";
    out << "enice," << r.enice << "\n";
    out << "global_clustering," << (r.global_clustering ? fmt(*r.global_clustering) : "") << "\n";
    out << "mean_path_length," << (r.mean_path_length ? fmt(*r.mean_path_length) : "") << "\n";
    out << "diameter," << (r.diameter ? std::to_string(*r.diameter) : "") << "\n";
    out << "infinity_fraction," << fmt(r.infinity_fraction) << "\n";
    out << "tinr," << r.tinr << "\n";
    out << "avg_out_degree," << fmt(r.avg_out_degree) << "\n";
    out << "avg_closeness," << fmt(r.avg_closeness) << "\n";
    return out.str();
}

std::string robustness_csv(const RobustnessReport& r) {
    std::ostringstream out;
    out << "metric,value\n";
    out << "cmc," << r.cmc << "\n";
    out << "nsp," << (r.nsp ? std::to_string(*r.nsp) : "") << "\n";
    out << "mspl," << (r.mspl ? std::to_string(*r.mspl) : "") << "\n";
    out << "cmpl," << (r.cmpl ? std::to_string(*r.cmpl) : "") << "\n";
    out << "aod," << (r.aod ? fmt(*r.aod) : "") << "\n";
    out << "mod," << (r.mod ? std::to_string(*r.mod) : "") << "\n";
    out << "avg_betweenness," << (r.avg_betweenness ? fmt(*r.avg_betweenness) : "") << "\n";
    return out.str();
}

std::string risk_csv(const RiskReport& r) {
    std::ostringstream out;
    out << "privilege_node,probability,method\n";
    for (const auto& [label, p] : r.per_privilege)
        out << csv_quote(label) << "," << fmt(p) << "," << to_string(r.method_used) << "\n";
    return out.str();
}

std::string connectivity_csv(const ConnectivityGraph& g) {
    std::ostringstream out;
    out << "src,dst,weight\n";
    for (const auto& [key, permit] : g.edges)
        out << csv_quote(g.vertices[static_cast<std::size_t>(key.first)]) << ","
            << csv_quote(g.vertices[static_cast<std::size_t>(key.second)]) << "," << permit.weight()
            << "\n";
    return out.str();
}

namespace {

const char* kind_name(NodeKind kind) {
    switch (kind) {
        case NodeKind::Leaf: return "leaf";
        case NodeKind::And: return "and";
        case NodeKind::Or: return "or";
    }
    return "?";
}

}  // namespace

json attack_graph_json(const AttackGraph& g) {
    json nodes = json::array();
    for (int i = 0; i < g.node_count(); ++i) {
        const AttackNode& n = g.nodes[static_cast<std::size_t>(i)];
        json jn;
        jn["id"] = i;
        jn["kind"] = kind_name(n.kind);
        jn["label"] = n.label;
        if (n.rule) jn["rule"] = to_string(*n.rule);
        if (n.privilege) jn["privilege"] = to_string(*n.privilege);
        jn["hosts"] = n.hosts;
        nodes.push_back(std::move(jn));
    }
    json edges = json::array();
    for (int u = 0; u < g.node_count(); ++u)
        for (int v : g.succ[static_cast<std::size_t>(u)]) edges.push_back(json::array({u, v}));
    json out;
    out["nodes"] = std::move(nodes);
    out["edges"] = std::move(edges);
    return out;
}

std::string attack_graph_dot(const AttackGraph& g) {
    std::ostringstream out;
    out << "digraph attack {\n";
    out << "  rankdir=LR;\n";
    for (int i = 0; i < g.node_count(); ++i) {
        const AttackNode& n = g.nodes[static_cast<std::size_t>(i)];
        const char* shape = n.kind == NodeKind::Leaf ? "box"
                            : n.kind == NodeKind::And ? "ellipse"
                                                      : "diamond";
        std::string label = n.kind == NodeKind::And && n.rule ? to_string(*n.rule) : n.label;
        std::string escaped;
        for (char c : label) {
            if (c == '"' || c == '\\') escaped += '\\';
            escaped += c;
        }
        out << "  n" << i << " [shape=" << shape << ", label=\"" << escaped << "\"];\n";
    }
    for (int u = 0; u < g.node_count(); ++u)
        for (int v : g.succ[static_cast<std::size_t>(u)])
            out << "  n" << u << " -> n" << v << ";\n";
    out << "}\n";
    return out.str();
}

namespace {

void write_file(std::vector<std::filesystem::path>& written, const std::filesystem::path& path,
                const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    written.push_back(path);
}

std::string int_histogram_csv(const std::map<int, std::uint64_t>& hist) {
    std::ostringstream out;
    out << "length,count\n";
    for (const auto& [k, v] : hist) out << k << "," << v << "\n";
    return out.str();
}

template <typename V>
std::string per_node_csv(const char* value_name, const std::map<std::string, V>& values) {
    std::ostringstream out;
    out << "node," << value_name << "\n";
    for (const auto& [node, v] : values) {
        out << csv_quote(node) << ",";
        if constexpr (std::is_floating_point_v<V>)
            out << fmt(v);
        else
            out << v;
        out << "\n";
    }
    return out.str();
}

}  // namespace

std::vector<std::filesystem::path> write_analyze_reports(const AnalyzeResult& result,
                                                         const std::filesystem::path& dir,
                                                         const EmitOptions& options) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    bool csv = options.format == "csv";

    if (csv)
        write_file(written, dir / "exposure.csv", exposure_csv(result.exposure));
    else
        write_file(written, dir / "exposure.json", to_json(result.exposure).dump(2) + "\n");
    write_file(written, dir / "path_lengths.csv",
               int_histogram_csv(result.exposure.path_length_histogram));
    write_file(written, dir / "out_degrees.csv",
               per_node_csv("out_degree", result.exposure.out_degree_per_node));
    write_file(written, dir / "closeness.csv",
               per_node_csv("closeness", result.exposure.closeness_per_node));

    if (result.robustness) {
        if (csv)
            write_file(written, dir / "robustness.csv", robustness_csv(*result.robustness));
        else
            write_file(written, dir / "robustness.json", to_json(*result.robustness).dump(2) + "\n");
        write_file(written, dir / "betweenness.csv",
                   per_node_csv("betweenness", result.robustness->betweenness_per_node));
        write_file(written, dir / "attack_path_lengths.csv",
                   int_histogram_csv(result.robustness->attack_path_length_histogram));
    }
    if (result.risk) write_file(written, dir / "risk.csv", risk_csv(*result.risk));

    if (options.dump_connectivity)
        write_file(written, dir / "connectivity.csv", connectivity_csv(result.connectivity));
    if (options.dump_attack_graph && result.attack_graph) {
        write_file(written, dir / "attack_graph.json",
                   attack_graph_json(*result.attack_graph).dump(2) + "\n");
        write_file(written, dir / "attack_graph.dot", attack_graph_dot(*result.attack_graph));
    }
    return written;
}

std::vector<std::filesystem::path> write_compare_reports(const CompareResult& result,
                                                         const std::filesystem::path& dir,
                                                         const EmitOptions& options) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written = write_analyze_reports(result.flat, dir / "flat", options);
    auto seg = write_analyze_reports(result.segmented, dir / "segmented", options);
    written.insert(written.end(), seg.begin(), seg.end());
    write_file(written, dir / "comparison.json", comparison_json(result).dump(2) + "\n");
    return written;
}

}  // namespace microseg
