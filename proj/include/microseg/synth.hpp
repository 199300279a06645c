#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "microseg/ingest.hpp"
#include "microseg/model.hpp"

namespace microseg {

// Knobs for the synthetic enterprise. host_count counts internal hosts; the
// generated spec adds one internet host on top. Services are carved from
// roughly 55% of the non-management hosts; whatever the carving cannot use
// becomes user workstations.
struct SynthConfig {
    int host_count = 12;
    // Probability that a carved service is three-tier (web/app/db) rather
    // than two-tier (web/db).
    double three_tier_weight = 1.0;
    int management_service_count = 1;
    // Probability that a later service reuses the first service's database
    // pool instead of getting its own.
    double shared_infrastructure_ratio = 0.0;
    // Per-host probability of seeding a remotely exploitable vulnerability
    // (web and app tiers) and, independently, a local one (all hosts).
    double vuln_density = 0.2;
    std::uint64_t seed = 1;
};

struct SynthOutput {
    NetworkSpec spec;
    PolicySet flat_policy;
    PolicySet segmented_policy;
    ScanDocument scan;
};

// Throws SynthError when the config violates its invariants.
void validate_config(const SynthConfig& cfg);

SynthConfig parse_synth_config(std::string_view text, std::vector<std::string>* warnings = nullptr);
std::string emit_synth_config(const SynthConfig& cfg);

// Deterministic in cfg (same config, byte-identical outputs). The segmented
// policy allows user->web, web->app, app->db per service, one management
// host fanning out to every internal host per management service, and an
// internet->web perimeter; the flat policy is the generic internal allow plus
// the same perimeter. Throws SynthError when no service fits the host budget.
SynthOutput generate(const SynthConfig& cfg);

}  // namespace microseg
