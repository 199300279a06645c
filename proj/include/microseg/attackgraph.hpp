#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "microseg/ingest.hpp"
#include "microseg/model.hpp"

namespace microseg {

// ---------------------------------------------------------------------------
// Ground facts. These are the leaves of every derivation: what the attacker
// starts with (location), what traffic the policy permits (hacl), what
// listens where (service info), what is exploitable (vuln) and which accounts
// exist. Every fact carries enough structure to print a stable label.
// ---------------------------------------------------------------------------

struct AttackerLocatedFact {
    std::string host;
    friend bool operator==(const AttackerLocatedFact&, const AttackerLocatedFact&) = default;
};

struct HaclFact {
    std::string src;
    std::string dst;
    std::string protocol;
    PortRange ports;  // one maximal permitted interval for this (src, dst, protocol)
    friend bool operator==(const HaclFact&, const HaclFact&) = default;
};

struct ServiceFact {
    std::string host;
    std::string software;
    std::string protocol;
    int port = 0;
    Privilege privilege = Privilege::User;
    friend bool operator==(const ServiceFact&, const ServiceFact&) = default;
};

struct VulnFact {
    std::string host;
    std::string vuln_id;
    std::string software;
    VulnRange range = VulnRange::RemoteExploit;
    Consequence consequence = Consequence::PrivEscalation;
    double cvss = 0.0;
    friend bool operator==(const VulnFact&, const VulnFact&) = default;
};

struct AccountFact {
    std::string principal;
    std::string host;
    Privilege privilege = Privilege::User;
    friend bool operator==(const AccountFact&, const AccountFact&) = default;
};

using Fact = std::variant<AttackerLocatedFact, HaclFact, ServiceFact, VulnFact, AccountFact>;

std::string to_string(const Fact& fact);

enum class FactKind { AttackerLocated, Hacl, NetworkServiceInfo, VulExists, HasAccount };

FactKind kind_of(const Fact& fact);

// Hosts a fact mentions (hacl mentions two).
std::vector<std::string> hosts_of(const Fact& fact);

// ---------------------------------------------------------------------------
// The attack graph: a typed AND/OR graph. Edges run premise -> conclusion,
// so a minimal derivation is LEAF -> AND -> OR. LEAF nodes (facts) have
// in-degree 0 and form the root set; OR nodes (derived privileges: network
// access and code execution) form the privilege set.
// ---------------------------------------------------------------------------

enum class NodeKind { Leaf, And, Or };

enum class AttackRule { DirectReach, LateralReach, RemoteExploit, LocalEscalation };

std::string to_string(AttackRule rule);

enum class LiteralKind { NetAccess, ExecCode };

struct AttackNode {
    NodeKind kind = NodeKind::Leaf;
    std::string label;
    std::optional<FactKind> fact;        // leaves
    std::optional<AttackRule> rule;      // and nodes
    std::optional<LiteralKind> literal;  // or nodes
    std::vector<std::string> hosts;      // hosts the node is about
    std::optional<Privilege> privilege;  // code-execution nodes
    std::optional<double> cvss;          // vulnerability leaves
};

class AttackGraph {
public:
    std::vector<AttackNode> nodes;
    std::vector<std::vector<int>> succ;  // premise -> consumers
    std::vector<std::vector<int>> pred;  // conclusion <- supports

    int node_count() const { return static_cast<int>(nodes.size()); }
    std::size_t edge_count() const;

    // -1 when no node carries the label.
    int find(const std::string& label) const;

    std::vector<int> leaves() const;      // the root set
    std::vector<int> and_nodes() const;
    std::vector<int> privileges() const;  // all OR nodes

    // Configuration facts (hacl, service info, accounts) that mention `host`.
    // Attacker location and vulnerability findings are not configurations.
    std::size_t config_fact_count_involving(const std::string& host) const;

    int add_node(AttackNode node);
    void add_edge(int from, int to);
};

// Grounds every fact species from the inputs: one hacl per maximal permitted
// (src, dst, protocol, interval), one service fact per known endpoint (spec
// endpoints take precedence over scan-discovered ones on the same host,
// protocol and port), one vuln fact per finding, one account per internal
// host, and the attacker's internet location. Throws DerivationError when the
// spec has no internet host.
std::vector<Fact> compile_facts(const NetworkSpec& spec, const PolicySet& policy,
                                const ScanDocument& scan,
                                const ProtocolUniverse& universe = ProtocolUniverse::standard());

// Least fixed point of the rule set over `facts`:
//   direct reach:      netAccess(H,P,C)  <- attackerLocated(Z), hacl(Z,H,P,C)
//   lateral reach:     netAccess(H,P,C)  <- execCode(H0,_), hacl(H0,H,P,C)
//   remote exploit:    execCode(H,Perm)  <- netAccess(H,P,C), service(H,SW,P,Port,Perm),
//                                           vuln(H,_,SW,remote,privEscalation), Port in C
//   local escalation:  execCode(H,root)  <- execCode(H,user), vuln(H,_,_,local,privEscalation)
// One AND node per (rule, ground premise tuple); one OR node per derived
// literal. Deterministic: input facts are canonicalized before grounding, so
// any ordering of the same fact set yields an identical graph.
AttackGraph derive(const std::vector<Fact>& facts);

AttackGraph build_attack_graph(const NetworkSpec& spec, const PolicySet& policy,
                               const ScanDocument& scan,
                               const ProtocolUniverse& universe = ProtocolUniverse::standard());

}  // namespace microseg
