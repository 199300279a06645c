#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "microseg/pipeline.hpp"
#include "microseg/synth.hpp"

namespace {

using namespace microseg;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct CommonFlags {
    std::string network_path;
    std::string scan_path;
    std::string out_dir = "reports";
    std::string format = "json";
    int protocols = 3;
    int port_space = kMaxPort;
    std::string path_mode = "edges";
    std::string risk_method = "auto";
    bool want_robustness = false;
    bool dump_connectivity = false;
    bool dump_attack_graph = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--network", flags.network_path, "Network description (JSON)")
        ->required();
    cmd->add_option("--scan", flags.scan_path, "Vulnerability scan (JSON findings or Nessus XML)");
    cmd->add_option("--out", flags.out_dir, "Report output directory")
        ->capture_default_str();
    cmd->add_option("--format", flags.format, "Top-level report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--protocols", flags.protocols, "Protocol universe size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--port-space", flags.port_space, "Highest port number counted")
        ->check(CLI::Range(1, kMaxPort))
        ->capture_default_str();
    cmd->add_option("--path-mode", flags.path_mode, "Path length convention")
        ->check(CLI::IsMember({"edges", "vertices"}))
        ->capture_default_str();
    cmd->add_option("--risk-method", flags.risk_method, "Cumulative risk evaluation")
        ->check(CLI::IsMember({"auto", "exact", "iterative"}))
        ->capture_default_str();
    cmd->add_flag("--robustness", flags.want_robustness,
                  "Require the attack-graph reports (errors without --scan)");
    cmd->add_flag("--dump-connectivity", flags.dump_connectivity,
                  "Also write the connectivity edge list");
    cmd->add_flag("--dump-attack-graph", flags.dump_attack_graph,
                  "Also write the attack graph (JSON and DOT)");
}

AnalyzeOptions analyze_options(const CommonFlags& flags) {
    AnalyzeOptions opts;
    opts.path_mode =
        flags.path_mode == "vertices" ? PathLengthMode::VertexCount : PathLengthMode::EdgeCount;
    if (flags.risk_method == "exact")
        opts.risk.method = RiskMethod::Exact;
    else if (flags.risk_method == "iterative")
        opts.risk.method = RiskMethod::Iterative;
    return opts;
}

EmitOptions emit_options(const CommonFlags& flags) {
    EmitOptions opts;
    opts.format = flags.format;
    opts.dump_connectivity = flags.dump_connectivity;
    opts.dump_attack_graph = flags.dump_attack_graph;
    return opts;
}

std::optional<ScanDocument> load_scan(const CommonFlags& flags, const NetworkSpec& spec) {
    if (flags.scan_path.empty()) {
        if (flags.want_robustness)
            throw std::runtime_error("--robustness requires --scan; no scan document given");
        std::cerr << "warning: no scan provided; robustness and risk reports omitted\n";
        return std::nullopt;
    }
    std::vector<std::string> warnings;
    ScanDocument scan = parse_scan(read_file(flags.scan_path), spec, &warnings);
    print_warnings(warnings);
    return scan;
}

void report_written(const std::vector<std::filesystem::path>& files) {
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

int cmd_analyze(const CommonFlags& flags, const std::string& rules_path,
                const std::string& mode) {
    ProtocolUniverse universe = ProtocolUniverse::standard(static_cast<std::size_t>(flags.protocols));
    std::vector<std::string> warnings;
    NetworkSpec spec = parse_network(read_file(flags.network_path), &warnings);
    print_warnings(warnings);

    std::optional<PolicyMode> mode_override;
    if (!mode.empty()) mode_override = policy_mode_from_string(mode);
    PolicySet policy = parse_rules(read_file(rules_path), universe, flags.port_space, mode_override);

    std::optional<ScanDocument> scan = load_scan(flags, spec);
    AnalyzeResult result = run_analyze(spec, policy, scan, universe, analyze_options(flags));
    report_written(write_analyze_reports(result, flags.out_dir, emit_options(flags)));
    return 0;
}

int cmd_compare(const CommonFlags& flags, const std::string& flat_rules_path,
                const std::string& seg_rules_path) {
    ProtocolUniverse universe = ProtocolUniverse::standard(static_cast<std::size_t>(flags.protocols));
    std::vector<std::string> warnings;
    NetworkSpec spec = parse_network(read_file(flags.network_path), &warnings);
    print_warnings(warnings);

    PolicySet flat_policy =
        parse_rules(read_file(flat_rules_path), universe, flags.port_space, PolicyMode::Flat);
    PolicySet seg_policy =
        parse_rules(read_file(seg_rules_path), universe, flags.port_space, PolicyMode::Segmented);

    std::optional<ScanDocument> scan = load_scan(flags, spec);
    CompareResult result =
        run_compare(spec, flat_policy, seg_policy, scan, universe, analyze_options(flags));
    report_written(write_compare_reports(result, flags.out_dir, emit_options(flags)));
    return 0;
}

int cmd_synth(const std::string& config_path, const SynthConfig& flag_cfg,
              const std::vector<std::string>& set_flags, const std::string& out_dir) {
    SynthConfig cfg;
    if (!config_path.empty()) {
        std::vector<std::string> warnings;
        cfg = parse_synth_config(read_file(config_path), &warnings);
        print_warnings(warnings);
    }
    for (const std::string& name : set_flags) {
        if (name == "hosts") cfg.host_count = flag_cfg.host_count;
        if (name == "three-tier-weight") cfg.three_tier_weight = flag_cfg.three_tier_weight;
        if (name == "mgmt-services") cfg.management_service_count = flag_cfg.management_service_count;
        if (name == "shared-ratio") cfg.shared_infrastructure_ratio = flag_cfg.shared_infrastructure_ratio;
        if (name == "vuln-density") cfg.vuln_density = flag_cfg.vuln_density;
        if (name == "seed") cfg.seed = flag_cfg.seed;
    }
    validate_config(cfg);

    SynthOutput out = generate(cfg);
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    auto write = [&](const std::filesystem::path& path, const std::string& content) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << content;
        std::cout << "wrote " << path.string() << "\n";
    };
    write(dir / "network.json", emit_network(out.spec));
    write(dir / "flat.rules", emit_rules(out.flat_policy));
    write(dir / "segmented.rules", emit_rules(out.segmented_policy));
    write(dir / "scan.json", emit_scan(out.scan));

    std::cout << "hosts: " << out.spec.hosts.size() << "\n";
    std::cout << "flat rules: " << out.flat_policy.rules.size() << "\n";
    std::cout << "segmented rules: " << out.segmented_policy.rules.size() << "\n";
    std::cout << "findings: " << out.scan.findings.size() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantify how much a micro-segmentation policy shrinks network exposure "
                 "and attack-graph robustness versus a flat network"};
    app.require_subcommand(1);

    CommonFlags analyze_flags;
    std::string analyze_rules;
    std::string analyze_mode;
    CLI::App* analyze = app.add_subcommand("analyze", "Compute metric reports for one policy");
    add_common_flags(analyze, analyze_flags);
    analyze->add_option("--rules", analyze_rules, "Firewall rules (CSV)")->required();
    analyze->add_option("--mode", analyze_mode, "Override the policy mode")
        ->check(CLI::IsMember({"flat", "segmented"}));

    CommonFlags compare_flags;
    std::string compare_flat_rules;
    std::string compare_seg_rules;
    CLI::App* compare =
        app.add_subcommand("compare", "Analyze flat and segmented policies and diff the metrics");
    add_common_flags(compare, compare_flags);
    compare->add_option("--flat-rules", compare_flat_rules, "Flat-mode rules (CSV)")->required();
    compare->add_option("--seg-rules", compare_seg_rules, "Segmented rules (CSV)")->required();

    std::string synth_config;
    std::string synth_out = "synth";
    SynthConfig synth_flag_cfg;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic enterprise input set");
    synth->add_option("--config", synth_config, "Generator config (JSON)");
    synth->add_option("--out", synth_out, "Output directory")->capture_default_str();
    CLI::Option* o_hosts = synth->add_option("--hosts", synth_flag_cfg.host_count, "Total host count");
    CLI::Option* o_weight = synth->add_option("--three-tier-weight", synth_flag_cfg.three_tier_weight,
                                              "Probability a carved service gets three tiers");
    CLI::Option* o_mgmt = synth->add_option("--mgmt-services", synth_flag_cfg.management_service_count,
                                            "Management service count");
    CLI::Option* o_shared = synth->add_option("--shared-ratio", synth_flag_cfg.shared_infrastructure_ratio,
                                              "Probability a later service reuses the first database tier");
    CLI::Option* o_density = synth->add_option("--vuln-density", synth_flag_cfg.vuln_density,
                                               "Per-host vulnerability probability");
    CLI::Option* o_seed = synth->add_option("--seed", synth_flag_cfg.seed, "Generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(analyze_flags, analyze_rules, analyze_mode);
        if (compare->parsed()) return cmd_compare(compare_flags, compare_flat_rules, compare_seg_rules);
        if (synth->parsed()) {
            std::vector<std::string> set_flags;
            if (o_hosts->count()) set_flags.push_back("hosts");
            if (o_weight->count()) set_flags.push_back("three-tier-weight");
            if (o_mgmt->count()) set_flags.push_back("mgmt-services");
            if (o_shared->count()) set_flags.push_back("shared-ratio");
            if (o_density->count()) set_flags.push_back("vuln-density");
            if (o_seed->count()) set_flags.push_back("seed");
            return cmd_synth(synth_config, synth_flag_cfg, set_flags, synth_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
