#include "microseg/model.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace microseg {

std::string to_string(Zone z) {
    return z == Zone::Internal ? "internal" : "internet";
}

std::string to_string(Tier t) {
    switch (t) {
        case Tier::User: return "user";
        case Tier::Web: return "web";
        case Tier::App: return "app";
        case Tier::Database: return "database";
        case Tier::Management: return "management";
    }
    return "user";
}

std::string to_string(Privilege p) {
    return p == Privilege::User ? "user" : "root";
}

std::string to_string(VulnRange r) {
    return r == VulnRange::RemoteExploit ? "remoteExploit" : "localExploit";
}

std::string to_string(Consequence) {
    return "privEscalation";
}

std::string to_string(PolicyMode m) {
    return m == PolicyMode::Flat ? "flat" : "segmented";
}

std::optional<Zone> zone_from_string(std::string_view s) {
    if (s == "internal") return Zone::Internal;
    if (s == "internet") return Zone::Internet;
    return std::nullopt;
}

std::optional<Tier> tier_from_string(std::string_view s) {
    if (s == "user") return Tier::User;
    if (s == "web") return Tier::Web;
    if (s == "app") return Tier::App;
    if (s == "database" || s == "db") return Tier::Database;
    if (s == "management" || s == "mgmt") return Tier::Management;
    return std::nullopt;
}

std::optional<Privilege> privilege_from_string(std::string_view s) {
    if (s == "user") return Privilege::User;
    if (s == "root") return Privilege::Root;
    return std::nullopt;
}

std::optional<VulnRange> vuln_range_from_string(std::string_view s) {
    if (s == "remote" || s == "remoteExploit") return VulnRange::RemoteExploit;
    if (s == "local" || s == "localExploit") return VulnRange::LocalExploit;
    return std::nullopt;
}

std::optional<PolicyMode> policy_mode_from_string(std::string_view s) {
    if (s == "flat") return PolicyMode::Flat;
    if (s == "segmented") return PolicyMode::Segmented;
    return std::nullopt;
}

std::string PortRange::to_string() const {
    if (lo == hi) return std::to_string(lo);
    return std::to_string(lo) + "-" + std::to_string(hi);
}

bool FirewallRule::is_generic_internal_allow(int port_space) const {
    return src_any() && dst_any() && protocol_any() && ports.lo == 1 && ports.hi == port_space;
}

const Host* NetworkSpec::find_host(std::string_view id) const {
    for (const Host& h : hosts)
        if (h.id == id) return &h;
    return nullptr;
}

std::optional<std::string> NetworkSpec::internet_host() const {
    for (const Host& h : hosts)
        if (h.zone == Zone::Internet) return h.id;
    return std::nullopt;
}

std::vector<std::string> NetworkSpec::internal_host_ids() const {
    std::vector<std::string> out;
    out.reserve(hosts.size());
    for (const Host& h : hosts)
        if (h.zone == Zone::Internal) out.push_back(h.id);
    return out;
}

std::vector<const ServiceEndpoint*> NetworkSpec::services_of(std::string_view host_id) const {
    std::vector<const ServiceEndpoint*> out;
    for (const ServiceEndpoint& s : services)
        if (s.host == host_id) out.push_back(&s);
    return out;
}

ProtocolUniverse ProtocolUniverse::standard(std::size_t n) {
    static const char* base[] = {"tcp", "udp", "icmp"};
    ProtocolUniverse u;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < 3)
            u.names.emplace_back(base[i]);
        else
            u.names.push_back("proto" + std::to_string(i + 1));
    }
    return u;
}

bool ProtocolUniverse::contains(std::string_view name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::string ProtocolUniverse::describe() const {
    std::string out = "{";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    out += "}";
    return out;
}

namespace {

void sort_unique(std::vector<Violation>& v) {
    std::sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) {
        return std::tie(a.record, a.message) < std::tie(b.record, b.message);
    });
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<Violation> validate(const NetworkSpec& spec) {
    std::vector<Violation> out;

    std::unordered_map<std::string, int> id_count;
    std::vector<std::string> internet_hosts;
    for (const Host& h : spec.hosts) {
        if (h.id.empty()) out.push_back({"host \"\"", "host id must be non-empty"});
        ++id_count[h.id];
        if (h.zone == Zone::Internet) internet_hosts.push_back(h.id);
    }
    for (const auto& [id, n] : id_count)
        if (n > 1 && !id.empty())
            out.push_back({"host " + id, "host id appears " + std::to_string(n) + " times, ids must be unique"});
    if (internet_hosts.size() > 1) {
        std::sort(internet_hosts.begin(), internet_hosts.end());
        std::string list;
        for (const auto& id : internet_hosts) {
            if (!list.empty()) list += ", ";
            list += id;
        }
        out.push_back({"hosts " + list, "at most one host may have zone=internet"});
    }

    std::set<std::tuple<std::string, std::string, int>> seen_endpoints;
    for (const ServiceEndpoint& s : spec.services) {
        std::string rec = "service " + s.host + ":" + s.protocol + "/" + std::to_string(s.port);
        if (!spec.has_host(s.host))
            out.push_back({rec, "service references unknown host " + s.host});
        if (s.port < 1 || s.port > kMaxPort)
            out.push_back({rec, "service port must be in [1, 65535]"});
        if (s.software.empty())
            out.push_back({rec, "service software must be non-empty"});
        if (!seen_endpoints.insert({s.host, s.protocol, s.port}).second)
            out.push_back({rec, "duplicate (host, protocol, port) endpoint"});
    }

    sort_unique(out);
    return out;
}

std::vector<Violation> validate_policy(const PolicySet& policy, const NetworkSpec& spec,
                                       const ProtocolUniverse& universe) {
    std::vector<Violation> out;
    auto rule_rec = [](const FirewallRule& r) {
        return "rule " + r.src + "," + r.dst + "," + r.protocol + "," + r.ports.to_string();
    };

    if (policy.port_space < 1 || policy.port_space > kMaxPort)
        out.push_back({"policy", "port_space must be in [1, 65535]"});

    int generic_rows = 0;
    int internal_rows = 0;
    for (const FirewallRule& r : policy.rules) {
        if (!r.ports.valid() || r.ports.hi > policy.port_space)
            out.push_back({rule_rec(r), "port range must satisfy 1 <= lo <= hi <= port_space"});
        if (!r.src_any() && !spec.has_host(r.src))
            out.push_back({rule_rec(r), "rule references unknown host " + r.src});
        if (!r.dst_any() && !spec.has_host(r.dst))
            out.push_back({rule_rec(r), "rule references unknown host " + r.dst});
        if (!r.src_any() && !r.dst_any() && r.src == r.dst)
            out.push_back({rule_rec(r), "src must differ from dst"});
        if (!r.protocol_any() && !universe.contains(r.protocol))
            out.push_back({rule_rec(r), "protocol not in declared universe " + universe.describe()});

        if (r.is_generic_internal_allow(policy.port_space)) {
            ++generic_rows;
        } else {
            // Perimeter rows (naming the internet host) are allowed in flat mode.
            const Host* sh = r.src_any() ? nullptr : spec.find_host(r.src);
            const Host* dh = r.dst_any() ? nullptr : spec.find_host(r.dst);
            bool perimeter = (sh && sh->zone == Zone::Internet) || (dh && dh->zone == Zone::Internet);
            if (!perimeter) ++internal_rows;
        }
    }
    if (policy.mode == PolicyMode::Flat && (generic_rows != 1 || internal_rows != 0))
        out.push_back({"policy", "flat mode requires exactly the generic *,*,*,1-" +
                                     std::to_string(policy.port_space) +
                                     " internal rule plus perimeter rules"});

    std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
        return std::tie(a.record, a.message) < std::tie(b.record, b.message);
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace microseg
