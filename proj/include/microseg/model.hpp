#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace microseg {

// Thrown when an input document cannot be read at all.
class ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a document parses but breaks a model invariant.
class ValidationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by metric computations whose preconditions do not hold.
class MetricError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by fact compilation / rule derivation.
class DerivationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by risk aggregation.
class RiskError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class SynthError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxPort = 65535;

enum class Zone { Internal, Internet };
enum class Tier { User, Web, App, Database, Management };
enum class Privilege { User, Root };
enum class VulnRange { RemoteExploit, LocalExploit };
enum class Consequence { PrivEscalation };
enum class PolicyMode { Flat, Segmented };

std::string to_string(Zone z);
std::string to_string(Tier t);
std::string to_string(Privilege p);
std::string to_string(VulnRange r);
std::string to_string(Consequence c);
std::string to_string(PolicyMode m);

std::optional<Zone> zone_from_string(std::string_view s);
std::optional<Tier> tier_from_string(std::string_view s);
std::optional<Privilege> privilege_from_string(std::string_view s);
std::optional<VulnRange> vuln_range_from_string(std::string_view s);
std::optional<PolicyMode> policy_mode_from_string(std::string_view s);

/// A service a host listens on. `host` refers to a Host id.
struct ServiceEndpoint {
    std::string host;
    std::string software;
    std::string protocol;
    int port = 0;
    Privilege privilege = Privilege::User;

    friend bool operator==(const ServiceEndpoint&, const ServiceEndpoint&) = default;
};

struct Host {
    std::string id;
    std::string name;
    Zone zone = Zone::Internal;
    std::optional<Tier> tier;

    friend bool operator==(const Host&, const Host&) = default;
};

/// Hosts and their declared services. Service endpoints are kept flat;
/// the JSON form nests them under each host.
struct NetworkSpec {
    std::vector<Host> hosts;
    std::vector<ServiceEndpoint> services;

    const Host* find_host(std::string_view id) const;
    bool has_host(std::string_view id) const { return find_host(id) != nullptr; }
    std::optional<std::string> internet_host() const;
    std::vector<std::string> internal_host_ids() const;
    std::vector<const ServiceEndpoint*> services_of(std::string_view host_id) const;

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Inclusive TCP/UDP port interval.
struct PortRange {
    int lo = 1;
    int hi = kMaxPort;

    bool contains(int p) const { return p >= lo && p <= hi; }
    bool valid() const { return 1 <= lo && lo <= hi && hi <= kMaxPort; }
    std::string to_string() const;

    friend bool operator==(const PortRange&, const PortRange&) = default;
};

inline constexpr std::string_view kWildcard = "*";

/// Allow rule. Anything not matched by some rule is denied.
/// `src`, `dst` and `protocol` may be the wildcard "*"; host wildcards
/// range over internal hosts only.
struct FirewallRule {
    std::string src;
    std::string dst;
    std::string protocol;
    PortRange ports;

    bool src_any() const { return src == kWildcard; }
    bool dst_any() const { return dst == kWildcard; }
    bool protocol_any() const { return protocol == kWildcard; }
    bool is_generic_internal_allow(int port_space) const;

    friend bool operator==(const FirewallRule&, const FirewallRule&) = default;
};

struct PolicySet {
    PolicyMode mode = PolicyMode::Segmented;
    std::vector<FirewallRule> rules;
    int port_space = kMaxPort;

    friend bool operator==(const PolicySet&, const PolicySet&) = default;
};

struct VulnerabilityRecord {
    std::string host;
    std::string vuln_id;
    std::string software;
    VulnRange range = VulnRange::RemoteExploit;
    Consequence consequence = Consequence::PrivEscalation;
    double cvss_base = 0.0;

    friend bool operator==(const VulnerabilityRecord&, const VulnerabilityRecord&) = default;
};

/// Ordered set of protocol names rule weights are counted over.
struct ProtocolUniverse {
    std::vector<std::string> names;

    /// First `n` of {tcp, udp, icmp}, then proto4, proto5, ...
    static ProtocolUniverse standard(std::size_t n = 3);

    bool contains(std::string_view name) const;
    std::size_t size() const { return names.size(); }
    std::string describe() const;
};

struct Violation {
    std::string record;   // offending record, e.g. "host web1"
    std::string message;  // violated invariant

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Returns the (sorted, deduplicated) list of invariant violations.
/// An empty list means every downstream builder accepts the spec.
std::vector<Violation> validate(const NetworkSpec& spec);

/// Policy-level invariants that need the spec for context (host references,
/// the flat-mode rule shape). Returns violations in the same format.
std::vector<Violation> validate_policy(const PolicySet& policy, const NetworkSpec& spec,
                                       const ProtocolUniverse& universe);

}  // namespace microseg
