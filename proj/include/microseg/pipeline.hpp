#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "microseg/attackgraph.hpp"
#include "microseg/connectivity.hpp"
#include "microseg/exposure.hpp"
#include "microseg/ingest.hpp"
#include "microseg/risk.hpp"
#include "microseg/robustness.hpp"

namespace microseg {

struct AnalyzeOptions {
    PathLengthMode path_mode = PathLengthMode::EdgeCount;
    RiskOptions risk;
};

// One policy analyzed end to end. Exposure always runs, over the internal
// view of the network (flat mode: the complete baseline; segmented mode: the
// rule-induced graph without perimeter rows). Attack-graph work requires a
// scan and keeps the full policy, perimeter included.
struct AnalyzeResult {
    ConnectivityGraph connectivity;
    ExposureReport exposure;
    std::optional<AttackGraph> attack_graph;
    std::optional<RobustnessReport> robustness;
    std::optional<RiskReport> risk;
};

AnalyzeResult run_analyze(const NetworkSpec& spec, const PolicySet& policy,
                          const std::optional<ScanDocument>& scan, const ProtocolUniverse& universe,
                          const AnalyzeOptions& options = {});

struct CompareResult {
    AnalyzeResult flat;
    AnalyzeResult segmented;
    // metric -> percentage; oriented so that positive means segmentation
    // helped. Keys are dropped when either side is absent or the flat
    // baseline is zero.
    std::map<std::string, double> improvement_percentages;
};

CompareResult run_compare(const NetworkSpec& spec, const PolicySet& flat_policy,
                          const PolicySet& segmented_policy,
                          const std::optional<ScanDocument>& scan, const ProtocolUniverse& universe,
                          const AnalyzeOptions& options = {});

// Serializers. JSON renders absent metrics as null; CSVs are one metric per
// row, or one node/bucket per row for the distribution files.
nlohmann::json to_json(const ExposureReport& report);
nlohmann::json to_json(const RobustnessReport& report);
nlohmann::json to_json(const RiskReport& report);
nlohmann::json comparison_json(const CompareResult& result);

std::string exposure_csv(const ExposureReport& report);
std::string robustness_csv(const RobustnessReport& report);
std::string risk_csv(const RiskReport& report);
std::string connectivity_csv(const ConnectivityGraph& g);

nlohmann::json attack_graph_json(const AttackGraph& g);
std::string attack_graph_dot(const AttackGraph& g);

// Report emission as the command-line front end lays files out. `format` is
// "json" or "csv" and switches the metric reports only; distribution CSVs and
// risk.csv are always CSV. Returns the list of files written.
struct EmitOptions {
    std::string format = "json";
    bool dump_connectivity = false;
    bool dump_attack_graph = false;
};

std::vector<std::filesystem::path> write_analyze_reports(const AnalyzeResult& result,
                                                         const std::filesystem::path& dir,
                                                         const EmitOptions& options = {});
std::vector<std::filesystem::path> write_compare_reports(const CompareResult& result,
                                                         const std::filesystem::path& dir,
                                                         const EmitOptions& options = {});

}  // namespace microseg
