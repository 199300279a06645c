#include "microseg/synth.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "json.hpp"

namespace microseg {

using nlohmann::json;

namespace {

// Draws routed through these helpers only; their arithmetic is fully pinned
// by the standard, keeping outputs byte-identical across platforms.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    std::uint64_t bound = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r = rng();
    while (r >= bound) r = rng();
    return r % n;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool bernoulli(std::mt19937_64& rng, double p) { return uniform01(rng) < p; }

struct Shape {
    int web = 0;
    int app = 0;  // 0 marks a two-tier service
    int db = 0;
    int size() const { return web + app + db; }
};

const Shape kThreeTierFull{2, 2, 5};
const Shape kTwoTierFull{2, 0, 4};
const std::vector<Shape> kThreeTierLadder{{2, 2, 5}, {1, 2, 3}, {1, 1, 2}, {1, 1, 1}};
const std::vector<Shape> kTwoTierLadder{{2, 0, 4}, {1, 0, 2}, {1, 0, 1}};

std::string pad(int value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

struct MgmtService {
    const char* software;
    const char* protocol;
    int port;
};

const MgmtService kMgmtCatalog[] = {
    {"dns", "udp", 53},       {"ntp", "udp", 123},      {"directory", "tcp", 389},
    {"backup", "tcp", 9102},  {"monitoring", "tcp", 9100},
};

struct ServicePlan {
    Shape shape;
    bool shares_db = false;
    std::vector<std::string> web_hosts;
    std::vector<std::string> app_hosts;
    std::vector<std::string> db_hosts;  // empty when shared
    int web_port = 0;
    int app_port = 0;
    int db_port = 0;
};

}  // namespace

void validate_config(const SynthConfig& cfg) {
    if (cfg.host_count < 4)
        throw SynthError("host_count must be at least 4, got " + std::to_string(cfg.host_count));
    if (cfg.three_tier_weight < 0.0 || cfg.three_tier_weight > 1.0)
        throw SynthError("three_tier_weight must be in [0, 1]");
    if (cfg.shared_infrastructure_ratio < 0.0 || cfg.shared_infrastructure_ratio > 1.0)
        throw SynthError("shared_infrastructure_ratio must be in [0, 1]");
    if (cfg.vuln_density < 0.0 || cfg.vuln_density > 1.0)
        throw SynthError("vuln_density must be in [0, 1]");
    if (cfg.management_service_count < 0)
        throw SynthError("management_service_count must be non-negative");
    if (cfg.management_service_count >= cfg.host_count)
        throw SynthError("management hosts leave no room for services");
}

SynthConfig parse_synth_config(std::string_view text, std::vector<std::string>* warnings) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("synth config: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("synth config: expected a JSON object");
    SynthConfig cfg;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (key == "host_count")
            cfg.host_count = it->get<int>();
        else if (key == "three_tier_weight")
            cfg.three_tier_weight = it->get<double>();
        else if (key == "management_service_count")
            cfg.management_service_count = it->get<int>();
        else if (key == "shared_infrastructure_ratio")
            cfg.shared_infrastructure_ratio = it->get<double>();
        else if (key == "vuln_density")
            cfg.vuln_density = it->get<double>();
        else if (key == "seed")
            cfg.seed = it->get<std::uint64_t>();
        else if (warnings)
            warnings->push_back("synth config: ignoring unknown field '" + key + "'");
    }
    validate_config(cfg);
    return cfg;
}

std::string emit_synth_config(const SynthConfig& cfg) {
    json doc;
    doc["host_count"] = cfg.host_count;
    doc["three_tier_weight"] = cfg.three_tier_weight;
    doc["management_service_count"] = cfg.management_service_count;
    doc["shared_infrastructure_ratio"] = cfg.shared_infrastructure_ratio;
    doc["vuln_density"] = cfg.vuln_density;
    doc["seed"] = cfg.seed;
    return doc.dump(2) + "\n";
}

SynthOutput generate(const SynthConfig& cfg) {
    validate_config(cfg);
    std::mt19937_64 rng(cfg.seed);

    int mgmt_count = cfg.management_service_count;
    int pool = cfg.host_count - mgmt_count;
    int budget = pool * 55 / 100;

    // Carve full-size services while they fit; the leftover becomes users.
    std::vector<Shape> shapes;
    std::optional<bool> failed_three;
    int remaining = budget;
    while (remaining >= kTwoTierFull.size()) {
        bool three = bernoulli(rng, cfg.three_tier_weight);
        const Shape& full = three ? kThreeTierFull : kTwoTierFull;
        if (full.size() > remaining) {
            failed_three = three;
            break;
        }
        shapes.push_back(full);
        remaining -= full.size();
    }
    if (shapes.empty()) {
        // Nothing full fits; fall back to the largest shrunken shape.
        bool three = failed_three ? *failed_three : bernoulli(rng, cfg.three_tier_weight);
        for (const auto& ladder : three
                 ? std::vector<const std::vector<Shape>*>{&kThreeTierLadder, &kTwoTierLadder}
                 : std::vector<const std::vector<Shape>*>{&kTwoTierLadder, &kThreeTierLadder}) {
            for (const Shape& s : *ladder)
                if (s.size() <= remaining) {
                    shapes.push_back(s);
                    remaining -= s.size();
                    break;
                }
            if (!shapes.empty()) break;
        }
        if (shapes.empty())
            throw SynthError("host_count " + std::to_string(cfg.host_count) +
                             " too small for any service next to " + std::to_string(mgmt_count) +
                             " management hosts");
    }

    std::vector<ServicePlan> plans(shapes.size());
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        plans[i].shape = shapes[i];
        plans[i].web_port = 8000 + static_cast<int>(i);
        plans[i].app_port = 9000 + static_cast<int>(i);
        plans[i].db_port = 5400 + static_cast<int>(i);
        if (i > 0) plans[i].shares_db = bernoulli(rng, cfg.shared_infrastructure_ratio);
    }

    SynthOutput out;
    NetworkSpec& spec = out.spec;

    Host internet;
    internet.id = "internet";
    internet.name = "internet";
    internet.zone = Zone::Internet;
    spec.hosts.push_back(internet);

    auto add_host = [&](const std::string& id, Tier tier) {
        Host h;
        h.id = id;
        h.name = id;
        h.zone = Zone::Internal;
        h.tier = tier;
        spec.hosts.push_back(h);
    };
    auto add_service_endpoint = [&](const std::string& host, const char* software,
                                    const char* protocol, int port) {
        ServiceEndpoint ep;
        ep.host = host;
        ep.software = software;
        ep.protocol = protocol;
        ep.port = port;
        ep.privilege = Privilege::User;
        spec.services.push_back(ep);
    };

    std::vector<std::string> mgmt_hosts;
    for (int m = 0; m < mgmt_count; ++m) {
        std::string id = "mgmt" + std::to_string(m + 1);
        add_host(id, Tier::Management);
        const MgmtService& svc = kMgmtCatalog[static_cast<std::size_t>(m) %
                                              (sizeof(kMgmtCatalog) / sizeof(kMgmtCatalog[0]))];
        add_service_endpoint(id, svc.software, svc.protocol, svc.port);
        mgmt_hosts.push_back(id);
    }

    int used_by_services = 0;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        ServicePlan& plan = plans[i];
        std::string prefix = "s" + pad(static_cast<int>(i) + 1, 2);
        for (int k = 0; k < plan.shape.web; ++k) {
            std::string id = prefix + "-web" + std::to_string(k + 1);
            add_host(id, Tier::Web);
            add_service_endpoint(id, "nginx", "tcp", plan.web_port);
            plan.web_hosts.push_back(id);
        }
        for (int k = 0; k < plan.shape.app; ++k) {
            std::string id = prefix + "-app" + std::to_string(k + 1);
            add_host(id, Tier::App);
            add_service_endpoint(id, "tomcat", "tcp", plan.app_port);
            plan.app_hosts.push_back(id);
        }
        if (!plan.shares_db) {
            for (int k = 0; k < plan.shape.db; ++k) {
                std::string id = prefix + "-db" + std::to_string(k + 1);
                add_host(id, Tier::Database);
                add_service_endpoint(id, "postgres", "tcp", plan.db_port);
                plan.db_hosts.push_back(id);
            }
        }
        used_by_services += plan.shape.web + plan.shape.app + (plan.shares_db ? 0 : plan.shape.db);
    }

    int user_count = pool - used_by_services;
    std::vector<std::string> user_hosts;
    for (int u = 0; u < user_count; ++u) {
        std::string id = "u" + pad(u + 1, 3);
        add_host(id, Tier::User);
        user_hosts.push_back(id);
    }

    // Policies. Port field as a degenerate range "N-N" is normalized by the
    // PortRange printer, so build rules directly.
    auto rule = [](const std::string& src, const std::string& dst, const std::string& proto,
                   int port) {
        FirewallRule r;
        r.src = src;
        r.dst = dst;
        r.protocol = proto;
        r.ports = PortRange{port, port};
        return r;
    };

    std::vector<FirewallRule> perimeter;
    for (const ServicePlan& plan : plans)
        for (const std::string& web : plan.web_hosts)
            perimeter.push_back(rule("internet", web, "tcp", plan.web_port));

    PolicySet& seg = out.segmented_policy;
    seg.mode = PolicyMode::Segmented;
    seg.port_space = kMaxPort;
    seg.rules = perimeter;
    for (const std::string& user : user_hosts)
        for (const ServicePlan& plan : plans)
            for (const std::string& web : plan.web_hosts)
                seg.rules.push_back(rule(user, web, "tcp", plan.web_port));
    for (const ServicePlan& plan : plans) {
        const std::vector<std::string>& db_pool =
            plan.shares_db ? plans.front().db_hosts : plan.db_hosts;
        int db_port = plan.shares_db ? plans.front().db_port : plan.db_port;
        if (plan.shape.app > 0) {
            for (const std::string& web : plan.web_hosts)
                for (const std::string& app : plan.app_hosts)
                    seg.rules.push_back(rule(web, app, "tcp", plan.app_port));
            for (const std::string& app : plan.app_hosts)
                for (const std::string& db : db_pool)
                    seg.rules.push_back(rule(app, db, "tcp", db_port));
        } else {
            for (const std::string& web : plan.web_hosts)
                for (const std::string& db : db_pool)
                    seg.rules.push_back(rule(web, db, "tcp", db_port));
        }
    }
    for (int m = 0; m < mgmt_count; ++m) {
        const MgmtService& svc = kMgmtCatalog[static_cast<std::size_t>(m) %
                                              (sizeof(kMgmtCatalog) / sizeof(kMgmtCatalog[0]))];
        for (const Host& h : spec.hosts) {
            if (h.zone != Zone::Internal || h.id == mgmt_hosts[static_cast<std::size_t>(m)]) continue;
            seg.rules.push_back(rule(mgmt_hosts[static_cast<std::size_t>(m)], h.id, svc.protocol,
                                     svc.port));
        }
    }

    PolicySet& flat = out.flat_policy;
    flat.mode = PolicyMode::Flat;
    flat.port_space = kMaxPort;
    FirewallRule generic;
    generic.src = kWildcard;
    generic.dst = kWildcard;
    generic.protocol = kWildcard;
    generic.ports = PortRange{1, kMaxPort};
    flat.rules.push_back(generic);
    flat.rules.insert(flat.rules.end(), perimeter.begin(), perimeter.end());

    // Vulnerability seeding: remote findings against the web/app software,
    // local privilege escalations anywhere.
    int cve_counter = 0;
    auto next_cve = [&]() { return "CVE-0000-" + pad(++cve_counter, 4); };
    auto draw_cvss = [&]() { return static_cast<double>(50 + uniform_below(rng, 50)) / 10.0; };

    for (const ServicePlan& plan : plans) {
        for (const std::string& web : plan.web_hosts)
            if (bernoulli(rng, cfg.vuln_density))
                out.scan.findings.push_back({web, next_cve(), "nginx", VulnRange::RemoteExploit,
                                             Consequence::PrivEscalation, draw_cvss()});
        for (const std::string& app : plan.app_hosts)
            if (bernoulli(rng, cfg.vuln_density))
                out.scan.findings.push_back({app, next_cve(), "tomcat", VulnRange::RemoteExploit,
                                             Consequence::PrivEscalation, draw_cvss()});
    }
    for (const Host& h : spec.hosts) {
        if (h.zone != Zone::Internal) continue;
        if (bernoulli(rng, cfg.vuln_density))
            out.scan.findings.push_back({h.id, next_cve(), "os-kernel", VulnRange::LocalExploit,
                                         Consequence::PrivEscalation, draw_cvss()});
    }

    return out;
}

}  // namespace microseg
