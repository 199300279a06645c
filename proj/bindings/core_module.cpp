#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "microseg/pipeline.hpp"
#include "microseg/synth.hpp"

namespace py = pybind11;
using namespace microseg;
using nlohmann::json;

namespace {

py::object json_to_py(const json& j) {
    switch (j.type()) {
        case json::value_t::null:
            return py::none();
        case json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case json::value_t::number_integer:
            return py::int_(j.get<long long>());
        case json::value_t::number_unsigned:
            return py::int_(j.get<unsigned long long>());
        case json::value_t::number_float:
            return py::float_(j.get<double>());
        case json::value_t::string:
            return py::str(j.get<std::string>());
        case json::value_t::array: {
            py::list out;
            for (const json& item : j) out.append(json_to_py(item));
            return out;
        }
        case json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it)
                out[py::str(it.key())] = json_to_py(it.value());
            return out;
        }
        default:
            return py::none();
    }
}

AnalyzeOptions make_options(const std::string& path_mode, const std::string& risk_method) {
    AnalyzeOptions opts;
    if (path_mode == "vertices")
        opts.path_mode = PathLengthMode::VertexCount;
    else if (path_mode != "edges")
        throw std::invalid_argument("path_mode must be 'edges' or 'vertices'");
    if (risk_method == "exact")
        opts.risk.method = RiskMethod::Exact;
    else if (risk_method == "iterative")
        opts.risk.method = RiskMethod::Iterative;
    else if (risk_method != "auto")
        throw std::invalid_argument("risk_method must be 'auto', 'exact' or 'iterative'");
    return opts;
}

std::optional<ScanDocument> parse_optional_scan(const std::optional<std::string>& scan_text,
                                                const NetworkSpec& spec) {
    if (!scan_text) return std::nullopt;
    return parse_scan(*scan_text, spec);
}

json analyze_to_json(const AnalyzeResult& result) {
    json out;
    out["exposure"] = to_json(result.exposure);
    out["robustness"] = result.robustness ? to_json(*result.robustness) : json(nullptr);
    out["risk"] = result.risk ? to_json(*result.risk) : json(nullptr);
    return out;
}

py::object py_analyze(const std::string& network, const std::string& rules,
                      const std::optional<std::string>& scan, const std::optional<std::string>& mode,
                      int protocols, int port_space, const std::string& path_mode,
                      const std::string& risk_method) {
    ProtocolUniverse universe = ProtocolUniverse::standard(static_cast<std::size_t>(protocols));
    NetworkSpec spec = parse_network(network);
    std::optional<PolicyMode> mode_override;
    if (mode) {
        mode_override = policy_mode_from_string(*mode);
        if (!mode_override) throw std::invalid_argument("mode must be 'flat' or 'segmented'");
    }
    PolicySet policy = parse_rules(rules, universe, port_space, mode_override);
    AnalyzeResult result = run_analyze(spec, policy, parse_optional_scan(scan, spec), universe,
                                       make_options(path_mode, risk_method));
    return json_to_py(analyze_to_json(result));
}

py::object py_compare(const std::string& network, const std::string& flat_rules,
                      const std::string& seg_rules, const std::optional<std::string>& scan,
                      int protocols, int port_space, const std::string& path_mode,
                      const std::string& risk_method) {
    ProtocolUniverse universe = ProtocolUniverse::standard(static_cast<std::size_t>(protocols));
    NetworkSpec spec = parse_network(network);
    PolicySet flat = parse_rules(flat_rules, universe, port_space, PolicyMode::Flat);
    PolicySet seg = parse_rules(seg_rules, universe, port_space, PolicyMode::Segmented);
    CompareResult result = run_compare(spec, flat, seg, parse_optional_scan(scan, spec), universe,
                                       make_options(path_mode, risk_method));
    return json_to_py(comparison_json(result));
}

py::dict py_synthesize(const std::string& config) {
    SynthOutput out = generate(parse_synth_config(config));
    py::dict result;
    result["network"] = emit_network(out.spec);
    result["flat_rules"] = emit_rules(out.flat_policy);
    result["segmented_rules"] = emit_rules(out.segmented_policy);
    result["scan"] = emit_scan(out.scan);
    return result;
}

py::list py_validate_network(const std::string& network) {
    NetworkSpec spec;
    py::list out;
    try {
        spec = parse_network(network);
    } catch (const std::exception& e) {
        out.append(std::string(e.what()));
        return out;
    }
    for (const Violation& v : validate(spec)) out.append(v.record + ": " + v.message);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Connectivity exposure and attack-graph robustness metrics for "
              "micro-segmented networks";

    m.def("analyze", &py_analyze, py::arg("network"), py::arg("rules"),
          py::arg("scan") = py::none(), py::arg("mode") = py::none(), py::arg("protocols") = 3,
          py::arg("port_space") = kMaxPort, py::arg("path_mode") = "edges",
          py::arg("risk_method") = "auto",
          "Compute exposure (and, with a scan, robustness and risk) reports for one policy.");

    m.def("compare", &py_compare, py::arg("network"), py::arg("flat_rules"), py::arg("seg_rules"),
          py::arg("scan") = py::none(), py::arg("protocols") = 3, py::arg("port_space") = kMaxPort,
          py::arg("path_mode") = "edges", py::arg("risk_method") = "auto",
          "Analyze a flat and a segmented policy and report per-metric improvement percentages.");

    m.def("synthesize", &py_synthesize, py::arg("config"),
          "Generate a synthetic enterprise (network, flat rules, segmented rules, scan) "
          "from a JSON config string.");

    m.def("validate_network", &py_validate_network, py::arg("network"),
          "Return the list of problems in a network document; empty means valid.");
}
