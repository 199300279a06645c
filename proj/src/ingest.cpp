#include "microseg/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace microseg {

using nlohmann::json;

namespace {

std::string join_violations(const std::vector<Violation>& vs) {
    std::string out;
    for (const Violation& v : vs) {
        if (!out.empty()) out += "; ";
        out += v.record + ": " + v.message;
    }
    return out;
}

void warn(std::vector<std::string>* warnings, std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
}

void note_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                       const std::string& where, std::vector<std::string>* warnings) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok) warn(warnings, where + ": ignoring unknown field '" + it.key() + "'");
    }
}

json parse_json_document(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

NetworkSpec parse_network(std::string_view text, std::vector<std::string>* warnings) {
    json doc = parse_json_document(text, "network spec");
    if (!doc.is_object() || !doc.contains("hosts") || !doc["hosts"].is_array())
        throw ParseError("network spec: top-level object with a 'hosts' array is required");
    note_unknown_keys(doc, {"hosts"}, "network spec", warnings);

    NetworkSpec spec;
    std::size_t idx = 0;
    for (const json& h : doc["hosts"]) {
        std::string where = "host entry " + std::to_string(idx++);
        if (!h.is_object()) throw ParseError(where + ": expected an object");
        if (!h.contains("id") || !h["id"].is_string())
            throw ParseError(where + ": missing required field 'id'");
        note_unknown_keys(h, {"id", "name", "zone", "tier", "services"}, where, warnings);

        Host host;
        host.id = h["id"].get<std::string>();
        host.name = h.value("name", host.id);
        if (h.contains("zone")) {
            auto z = zone_from_string(h["zone"].get<std::string>());
            if (!z) throw ParseError(where + " (" + host.id + "): unknown zone '" +
                                     h["zone"].get<std::string>() + "', expected internal|internet");
            host.zone = *z;
        }
        if (h.contains("tier") && !h["tier"].is_null()) {
            auto t = tier_from_string(h["tier"].get<std::string>());
            if (!t) throw ParseError(where + " (" + host.id + "): unknown tier '" +
                                     h["tier"].get<std::string>() + "'");
            host.tier = *t;
        }
        spec.hosts.push_back(host);

        if (h.contains("services")) {
            if (!h["services"].is_array())
                throw ParseError(where + " (" + host.id + "): 'services' must be an array");
            std::size_t sidx = 0;
            for (const json& s : h["services"]) {
                std::string swhere = where + " service " + std::to_string(sidx++);
                if (!s.is_object() || !s.contains("software") || !s.contains("protocol") ||
                    !s.contains("port"))
                    throw ParseError(swhere + ": software, protocol and port are required");
                note_unknown_keys(s, {"software", "protocol", "port", "privilege"}, swhere, warnings);
                ServiceEndpoint ep;
                ep.host = host.id;
                ep.software = s["software"].get<std::string>();
                ep.protocol = s["protocol"].get<std::string>();
                if (!s["port"].is_number_integer())
                    throw ParseError(swhere + ": port must be an integer");
                ep.port = s["port"].get<int>();
                if (s.contains("privilege")) {
                    auto p = privilege_from_string(s["privilege"].get<std::string>());
                    if (!p) throw ParseError(swhere + ": unknown privilege '" +
                                             s["privilege"].get<std::string>() + "', expected user|root");
                    ep.privilege = *p;
                }
                spec.services.push_back(std::move(ep));
            }
        }
    }

    auto violations = validate(spec);
    if (!violations.empty()) throw ValidationError("network spec: " + join_violations(violations));
    return spec;
}

std::string emit_network(const NetworkSpec& spec) {
    json hosts = json::array();
    for (const Host& h : spec.hosts) {
        json jh;
        jh["id"] = h.id;
        jh["name"] = h.name;
        jh["zone"] = to_string(h.zone);
        if (h.tier) jh["tier"] = to_string(*h.tier);
        json services = json::array();
        for (const ServiceEndpoint& s : spec.services) {
            if (s.host != h.id) continue;
            services.push_back({{"software", s.software},
                                {"protocol", s.protocol},
                                {"port", s.port},
                                {"privilege", to_string(s.privilege)}});
        }
        if (!services.empty()) jh["services"] = services;
        hosts.push_back(jh);
    }
    json doc;
    doc["hosts"] = hosts;
    return doc.dump(2) + "\n";
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

int parse_int(std::string_view s, const std::string& where) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(where + ": expected an integer, got '" + std::string(s) + "'");
    return value;
}

PortRange parse_port_field(std::string_view field, int port_space, const std::string& where) {
    PortRange r;
    if (field == "*") {
        r.lo = 1;
        r.hi = port_space;
        return r;
    }
    std::size_t dash = field.find('-');
    if (dash == std::string_view::npos) {
        r.lo = r.hi = parse_int(field, where);
    } else {
        r.lo = parse_int(field.substr(0, dash), where);
        r.hi = parse_int(field.substr(dash + 1), where);
    }
    if (r.lo < 1 || r.hi > port_space || r.lo > r.hi)
        throw ValidationError(where + ": port range " + std::string(field) +
                              " outside [1, " + std::to_string(port_space) + "]");
    return r;
}

}  // namespace

PolicySet parse_rules(std::string_view text, const ProtocolUniverse& universe, int port_space,
                      std::optional<PolicyMode> mode_override) {
    if (port_space < 1 || port_space > kMaxPort)
        throw ValidationError("rules: port_space must be in [1, 65535]");

    PolicySet policy;
    policy.port_space = port_space;

    std::optional<PolicyMode> directive;
    bool header_seen = false;
    std::set<std::tuple<std::string, std::string, std::string, int, int>> seen;

    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string_view raw = end == std::string_view::npos ? text.substr(start)
                                                             : text.substr(start, end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++lineno;
        std::string_view line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '#') {
            std::string_view body = trim(line.substr(1));
            if (body.rfind("mode=", 0) == 0) {
                auto m = policy_mode_from_string(trim(body.substr(5)));
                if (!m) throw ParseError("rules line " + std::to_string(lineno) +
                                         ": unknown mode directive '" + std::string(body) + "'");
                directive = *m;
            }
            continue;  // other comments are ignored
        }

        if (!header_seen) {
            auto cells = split(line, ',');
            if (cells.size() != 4 || cells[0] != "src" || cells[1] != "dst" ||
                cells[2] != "protocol" || cells[3] != "port")
                throw ParseError("rules line " + std::to_string(lineno) +
                                 ": expected header 'src,dst,protocol,port'");
            header_seen = true;
            continue;
        }

        std::string where = "rules line " + std::to_string(lineno);
        auto cells = split(line, ',');
        if (cells.size() != 4) throw ParseError(where + ": expected 4 fields");

        FirewallRule rule;
        rule.src = std::string(cells[0]);
        rule.dst = std::string(cells[1]);
        rule.protocol = std::string(cells[2]);
        if (rule.src.empty() || rule.dst.empty() || rule.protocol.empty())
            throw ParseError(where + ": empty field");
        if (!rule.protocol_any() && !universe.contains(rule.protocol))
            throw ValidationError(where + ": protocol '" + rule.protocol +
                                  "' not in declared universe " + universe.describe());
        if (!rule.src_any() && !rule.dst_any() && rule.src == rule.dst)
            throw ValidationError(where + ": src must differ from dst");
        rule.ports = parse_port_field(cells[3], port_space, where);

        // Exact duplicate rows collapse into one logical rule.
        if (seen.insert({rule.src, rule.dst, rule.protocol, rule.ports.lo, rule.ports.hi}).second)
            policy.rules.push_back(std::move(rule));
    }

    if (!header_seen && !policy.rules.empty())
        throw ParseError("rules: header row 'src,dst,protocol,port' is required");
    if (!header_seen && !directive && !mode_override)
        throw ParseError("rules: header row 'src,dst,protocol,port' is required");

    if (mode_override) {
        policy.mode = *mode_override;
    } else if (directive) {
        policy.mode = *directive;
    } else {
        bool generic = std::any_of(policy.rules.begin(), policy.rules.end(), [&](const FirewallRule& r) {
            return r.is_generic_internal_allow(port_space);
        });
        policy.mode = generic ? PolicyMode::Flat : PolicyMode::Segmented;
    }
    return policy;
}

std::string emit_rules(const PolicySet& policy) {
    std::ostringstream out;
    out << "#mode=" << to_string(policy.mode) << "\n";
    out << "src,dst,protocol,port\n";
    for (const FirewallRule& r : policy.rules)
        out << r.src << "," << r.dst << "," << r.protocol << "," << r.ports.to_string() << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Scan documents: canonical JSON findings, or the Nessus v2 XML subset
// (ReportHost/ReportItem with port, protocol, svc_name, cve and
// cvss3_base_score). Port 0 items are host-level findings and map to local
// exploits; everything else is a remotely reachable service finding.
// ---------------------------------------------------------------------------

namespace {

const Host* resolve_scan_host(const NetworkSpec& spec, const std::string& ref) {
    if (const Host* h = spec.find_host(ref)) return h;
    for (const Host& h : spec.hosts)
        if (h.name == ref) return &h;
    return nullptr;
}

double parse_cvss(const json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where + ": cvss must be a number");
    double score = v.get<double>();
    if (score < 0.0 || score > 10.0)
        throw ValidationError(where + ": cvss " + std::to_string(score) + " outside [0, 10]");
    return score;
}

ScanDocument parse_scan_json(std::string_view text, const NetworkSpec& spec,
                             std::vector<std::string>* warnings) {
    json doc = parse_json_document(text, "scan");
    if (!doc.is_object() || !doc.contains("findings") || !doc["findings"].is_array())
        throw ParseError("scan: top-level object with a 'findings' array is required");
    note_unknown_keys(doc, {"findings", "services"}, "scan", warnings);

    ScanDocument scan;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t dropped = 0;
    std::size_t idx = 0;
    for (const json& f : doc["findings"]) {
        std::string where = "scan finding " + std::to_string(idx++);
        if (!f.is_object()) throw ParseError(where + ": expected an object");
        note_unknown_keys(f, {"host", "cve", "software", "range", "cvss"}, where, warnings);
        std::string cve = f.value("cve", "");
        if (cve.empty()) {
            ++dropped;
            continue;
        }
        if (!f.contains("host") || !f.contains("software") || !f.contains("range") ||
            !f.contains("cvss"))
            throw ParseError(where + ": host, software, range and cvss are required");

        const Host* host = resolve_scan_host(spec, f["host"].get<std::string>());
        if (!host)
            throw ValidationError(where + ": unresolvable host reference '" +
                                  f["host"].get<std::string>() + "'");
        auto range = vuln_range_from_string(f["range"].get<std::string>());
        if (!range)
            throw ParseError(where + ": unknown range '" + f["range"].get<std::string>() +
                             "', expected remote|local");

        VulnerabilityRecord rec;
        rec.host = host->id;
        rec.vuln_id = cve;
        rec.software = f["software"].get<std::string>();
        rec.range = *range;
        rec.cvss_base = parse_cvss(f["cvss"], where);
        if (!seen.insert({rec.host, rec.vuln_id}).second) {
            warn(warnings, where + ": duplicate (host, cve) pair dropped");
            continue;
        }
        scan.findings.push_back(std::move(rec));
    }

    if (doc.contains("services")) {
        if (!doc["services"].is_array()) throw ParseError("scan: 'services' must be an array");
        std::size_t sidx = 0;
        for (const json& s : doc["services"]) {
            std::string where = "scan service " + std::to_string(sidx++);
            if (!s.contains("host") || !s.contains("software") || !s.contains("protocol") ||
                !s.contains("port"))
                throw ParseError(where + ": host, software, protocol and port are required");
            const Host* host = resolve_scan_host(spec, s["host"].get<std::string>());
            if (!host)
                throw ValidationError(where + ": unresolvable host reference '" +
                                      s["host"].get<std::string>() + "'");
            ServiceEndpoint ep;
            ep.host = host->id;
            ep.software = s["software"].get<std::string>();
            ep.protocol = s["protocol"].get<std::string>();
            ep.port = s["port"].get<int>();
            if (s.contains("privilege")) {
                auto p = privilege_from_string(s["privilege"].get<std::string>());
                if (!p) throw ParseError(where + ": unknown privilege");
                ep.privilege = *p;
            }
            scan.discovered_services.push_back(std::move(ep));
        }
    }

    if (dropped) warn(warnings, "scan: dropped " + std::to_string(dropped) + " finding(s) without a CVE");
    return scan;
}

// Minimal XML scanner, just enough for the Nessus subset we accept.
class XmlScanner {
public:
    explicit XmlScanner(std::string_view text) : text_(text) {}

    struct Tag {
        std::string name;
        std::map<std::string, std::string> attrs;
        bool closing = false;
        bool self_closing = false;
    };

    // Advances to the next tag; returns nullopt at end of input.
    // Text between the previous tag and this one lands in `last_text`.
    std::optional<Tag> next() {
        last_text.clear();
        while (pos_ < text_.size()) {
            std::size_t lt = text_.find('<', pos_);
            if (lt == std::string_view::npos) {
                pos_ = text_.size();
                return std::nullopt;
            }
            last_text.append(text_.substr(pos_, lt - pos_));
            pos_ = lt;
            if (starts_with("<!--")) {
                std::size_t end = text_.find("-->", pos_);
                if (end == std::string_view::npos) fail("unterminated comment");
                pos_ = end + 3;
                continue;
            }
            if (starts_with("<?")) {
                std::size_t end = text_.find("?>", pos_);
                if (end == std::string_view::npos) fail("unterminated declaration");
                pos_ = end + 2;
                continue;
            }
            if (starts_with("<!")) {  // DOCTYPE and friends
                std::size_t end = text_.find('>', pos_);
                if (end == std::string_view::npos) fail("unterminated markup declaration");
                pos_ = end + 1;
                continue;
            }
            return read_tag();
        }
        return std::nullopt;
    }

    std::string last_text;

private:
    bool starts_with(std::string_view p) const { return text_.substr(pos_, p.size()) == p; }

    [[noreturn]] void fail(const std::string& msg) const {
        std::size_t line = 1 + std::count(text_.begin(), text_.begin() + static_cast<long>(pos_), '\n');
        throw ParseError("scan XML line " + std::to_string(line) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string read_name() {
        std::size_t begin = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                text_[pos_] == '-' || text_[pos_] == ':' || text_[pos_] == '.'))
            ++pos_;
        if (begin == pos_) fail("expected a name");
        return std::string(text_.substr(begin, pos_ - begin));
    }

    static std::string decode_entities(std::string_view s) {
        std::string out;
        out.reserve(s.size());
        for (std::size_t i = 0; i < s.size();) {
            if (s[i] != '&') {
                out += s[i++];
                continue;
            }
            auto take = [&](std::string_view ent, char c) {
                if (s.substr(i, ent.size()) == ent) {
                    out += c;
                    i += ent.size();
                    return true;
                }
                return false;
            };
            if (take("&amp;", '&') || take("&lt;", '<') || take("&gt;", '>') ||
                take("&quot;", '"') || take("&apos;", '\''))
                continue;
            out += s[i++];
        }
        return out;
    }

    Tag read_tag() {
        Tag tag;
        ++pos_;  // consume '<'
        if (pos_ < text_.size() && text_[pos_] == '/') {
            tag.closing = true;
            ++pos_;
        }
        tag.name = read_name();
        while (true) {
            skip_ws();
            if (pos_ >= text_.size()) fail("unterminated tag <" + tag.name);
            if (text_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (text_[pos_] == '/') {
                if (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '>') fail("expected '/>'");
                tag.self_closing = true;
                pos_ += 2;
                break;
            }
            std::string attr = read_name();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != '=') fail("expected '=' after attribute " + attr);
            ++pos_;
            skip_ws();
            if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\''))
                fail("expected quoted value for attribute " + attr);
            char quote = text_[pos_++];
            std::size_t begin = pos_;
            std::size_t end = text_.find(quote, begin);
            if (end == std::string_view::npos) fail("unterminated attribute value for " + attr);
            tag.attrs[attr] = decode_entities(text_.substr(begin, end - begin));
            pos_ = end + 1;
        }
        return tag;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

ScanDocument parse_scan_nessus(std::string_view text, const NetworkSpec& spec,
                               std::vector<std::string>* warnings) {
    XmlScanner scanner(text);
    ScanDocument scan;
    std::set<std::pair<std::string, std::string>> seen_vulns;
    std::set<std::tuple<std::string, std::string, int>> seen_services;

    const Host* current_host = nullptr;
    std::vector<std::string> open_elements;
    bool in_item = false;
    int item_port = 0;
    std::string item_protocol, item_svc;
    std::vector<std::string> item_cves;
    std::optional<double> item_cvss;
    std::string pending_element;  // cve / cvss3_base_score while open
    std::size_t dropped = 0;

    auto flush_item = [&]() {
        if (!current_host) return;
        if (item_port > 0 && !item_svc.empty() && !item_protocol.empty()) {
            if (seen_services.insert({current_host->id, item_protocol, item_port}).second) {
                ServiceEndpoint ep;
                ep.host = current_host->id;
                ep.software = item_svc;
                ep.protocol = item_protocol;
                ep.port = item_port;
                ep.privilege = Privilege::User;
                scan.discovered_services.push_back(std::move(ep));
            }
        }
        if (item_cves.empty()) {
            ++dropped;
            return;
        }
        for (const std::string& cve : item_cves) {
            if (!seen_vulns.insert({current_host->id, cve}).second) continue;
            VulnerabilityRecord rec;
            rec.host = current_host->id;
            rec.vuln_id = cve;
            rec.software = item_svc.empty() ? "unknown" : item_svc;
            rec.range = item_port == 0 ? VulnRange::LocalExploit : VulnRange::RemoteExploit;
            rec.cvss_base = item_cvss.value_or(0.0);
            if (rec.cvss_base < 0.0 || rec.cvss_base > 10.0)
                throw ValidationError("scan: cvss " + std::to_string(rec.cvss_base) +
                                      " outside [0, 10] for " + rec.host + "/" + cve);
            scan.findings.push_back(std::move(rec));
        }
    };

    while (auto tag = scanner.next()) {
        if (tag->closing) {
            if (open_elements.empty() || open_elements.back() != tag->name)
                throw ParseError("scan XML: mismatched closing tag '" + tag->name + "'");
            open_elements.pop_back();
        } else if (!tag->self_closing) {
            open_elements.push_back(tag->name);
        }
        if (tag->name == "ReportHost") {
            if (tag->closing) {
                current_host = nullptr;
            } else {
                auto it = tag->attrs.find("name");
                if (it == tag->attrs.end())
                    throw ParseError("scan XML: ReportHost without a name attribute");
                current_host = resolve_scan_host(spec, it->second);
                if (!current_host)
                    throw ValidationError("scan: unresolvable host reference '" + it->second + "'");
            }
        } else if (tag->name == "ReportItem") {
            if (tag->closing || tag->self_closing) {
                if (in_item) flush_item();
                in_item = false;
            }
            if (!tag->closing) {
                in_item = true;
                item_port = 0;
                item_protocol.clear();
                item_svc.clear();
                item_cves.clear();
                item_cvss.reset();
                if (auto it = tag->attrs.find("port"); it != tag->attrs.end())
                    item_port = parse_int(it->second, "scan XML ReportItem port");
                if (auto it = tag->attrs.find("protocol"); it != tag->attrs.end())
                    item_protocol = it->second;
                if (auto it = tag->attrs.find("svc_name"); it != tag->attrs.end())
                    item_svc = it->second;
                if (tag->self_closing) {
                    flush_item();
                    in_item = false;
                }
            }
        } else if (in_item && !tag->closing && (tag->name == "cve" || tag->name == "cvss3_base_score")) {
            pending_element = tag->name;
        } else if (in_item && tag->closing && tag->name == pending_element) {
            std::string value = std::string(trim(scanner.last_text));
            if (pending_element == "cve") {
                if (!value.empty()) item_cves.push_back(value);
            } else {
                try {
                    item_cvss = std::stod(value);
                } catch (const std::exception&) {
                    throw ParseError("scan XML: bad cvss3_base_score '" + value + "'");
                }
            }
            pending_element.clear();
        }
    }

    if (!open_elements.empty())
        throw ParseError("scan XML: unexpected end of document inside '" + open_elements.back() +
                         "'");
    if (dropped) warn(warnings, "scan: dropped " + std::to_string(dropped) + " item(s) without a CVE");
    return scan;
}

}  // namespace

ScanDocument parse_scan(std::string_view text, const NetworkSpec& spec,
                        std::vector<std::string>* warnings) {
    std::string_view body = trim(text);
    if (body.empty()) throw ParseError("scan: empty document");
    if (body.front() == '<') return parse_scan_nessus(body, spec, warnings);
    return parse_scan_json(body, spec, warnings);
}

std::string emit_scan(const ScanDocument& scan) {
    json doc;
    json findings = json::array();
    for (const VulnerabilityRecord& r : scan.findings) {
        findings.push_back({{"host", r.host},
                            {"cve", r.vuln_id},
                            {"software", r.software},
                            {"range", r.range == VulnRange::RemoteExploit ? "remote" : "local"},
                            {"cvss", r.cvss_base}});
    }
    doc["findings"] = findings;
    if (!scan.discovered_services.empty()) {
        json services = json::array();
        for (const ServiceEndpoint& s : scan.discovered_services) {
            services.push_back({{"host", s.host},
                                {"software", s.software},
                                {"protocol", s.protocol},
                                {"port", s.port},
                                {"privilege", to_string(s.privilege)}});
        }
        doc["services"] = services;
    }
    return doc.dump(2) + "\n";
}

}  // namespace microseg
