#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "microseg/model.hpp"

namespace microseg {

/// Findings from a vulnerability scan, plus any service endpoints the scan
/// itself discovered (Nessus reports carry the listening service; the plain
/// JSON findings format does not).
struct ScanDocument {
    std::vector<VulnerabilityRecord> findings;
    std::vector<ServiceEndpoint> discovered_services;

    friend bool operator==(const ScanDocument&, const ScanDocument&) = default;
};

/// Parses the canonical network JSON ({"hosts":[{id,name,zone,tier,services:[...]}]}).
/// Unknown fields are skipped and reported through `warnings` when given.
/// Throws ParseError on malformed input and ValidationError when the parsed
/// spec fails validate().
NetworkSpec parse_network(std::string_view text, std::vector<std::string>* warnings = nullptr);
std::string emit_network(const NetworkSpec& spec);

/// Parses the rules CSV (header `src,dst,protocol,port`; port is N, N-M or *).
/// An optional leading `#mode=flat|segmented` directive sets the mode; a CLI
/// override wins over the directive. Without either, a policy whose rows
/// include the full generic wildcard row is treated as flat.
PolicySet parse_rules(std::string_view text, const ProtocolUniverse& universe,
                      int port_space = kMaxPort,
                      std::optional<PolicyMode> mode_override = std::nullopt);
std::string emit_rules(const PolicySet& policy);

/// Parses a scan document, auto-detecting the canonical JSON findings format
/// versus the supported Nessus v2 XML subset. Host references must resolve
/// against `spec` (by host id, then by host name). Findings without a CVE are
/// dropped and counted in `warnings`.
ScanDocument parse_scan(std::string_view text, const NetworkSpec& spec,
                        std::vector<std::string>* warnings = nullptr);
std::string emit_scan(const ScanDocument& scan);

}  // namespace microseg
