#include <string>
#include <vector>

#include "doctest.h"
#include "microseg/ingest.hpp"

using namespace microseg;

namespace {

const char* kNetworkDoc = R"({
  "hosts": [
    {"id": "internet", "zone": "internet"},
    {"id": "web1", "name": "front", "zone": "internal", "tier": "web",
     "services": [{"software": "nginx", "protocol": "tcp", "port": 443}]},
    {"id": "db1", "zone": "internal", "tier": "database",
     "services": [{"software": "postgres", "protocol": "tcp", "port": 5432, "privilege": "root"}]}
  ]
})";

NetworkSpec sample_spec() {
    return parse_network(kNetworkDoc);
}

}  // namespace

TEST_CASE("network parse pulls hosts and nested services") {
    std::vector<std::string> warnings;
    NetworkSpec spec = parse_network(kNetworkDoc, &warnings);
    CHECK(warnings.empty());
    REQUIRE(spec.hosts.size() == 3);
    CHECK(spec.hosts[0].zone == Zone::Internet);
    CHECK(spec.hosts[1].name == "front");
    CHECK(spec.hosts[1].tier == Tier::Web);
    REQUIRE(spec.services.size() == 2);
    CHECK(spec.services[0].host == "web1");
    CHECK(spec.services[0].port == 443);
    CHECK(spec.services[0].privilege == Privilege::User);
    CHECK(spec.services[1].privilege == Privilege::Root);
}

TEST_CASE("network parse defaults name to id") {
    NetworkSpec spec = sample_spec();
    CHECK(spec.hosts[0].name == "internet");
    CHECK(spec.hosts[2].name == "db1");
}

TEST_CASE("network emit round-trips") {
    NetworkSpec spec = sample_spec();
    std::string text = emit_network(spec);
    NetworkSpec again = parse_network(text);
    CHECK(again == spec);
    CHECK(emit_network(again) == text);
}

TEST_CASE("network parse reports unknown fields as warnings") {
    std::vector<std::string> warnings;
    parse_network(R"({"hosts": [{"id": "a", "rack": 7}], "site": "x"})", &warnings);
    REQUIRE(warnings.size() == 2);
    CHECK(warnings[0].find("site") != std::string::npos);
    CHECK(warnings[1].find("rack") != std::string::npos);
}

TEST_CASE("network parse errors") {
    CHECK_THROWS_AS(parse_network("not json"), ParseError);
    CHECK_THROWS_AS(parse_network("[]"), ParseError);
    CHECK_THROWS_AS(parse_network(R"({"hosts": [{"zone": "internal"}]})"), ParseError);
    CHECK_THROWS_WITH_AS(parse_network(R"({"hosts": [{"name": "x"}]})"),
                         "host entry 0: missing required field 'id'", ParseError);
    CHECK_THROWS_AS(parse_network(R"({"hosts": [{"id": "a", "zone": "dmz"}]})"), ParseError);
    CHECK_THROWS_AS(parse_network(R"({"hosts": [{"id": "a", "tier": "edge"}]})"), ParseError);
    CHECK_THROWS_AS(
        parse_network(R"({"hosts": [{"id": "a", "services": [{"software": "s"}]}]})"), ParseError);
}

TEST_CASE("network parse rejects invalid specs") {
    CHECK_THROWS_AS(parse_network(R"({"hosts": [{"id": "a"}, {"id": "a"}]})"), ValidationError);
    CHECK_THROWS_AS(parse_network(R"({"hosts": [
        {"id": "a", "zone": "internet"}, {"id": "b", "zone": "internet"}]})"),
                    ValidationError);
}

TEST_CASE("rules parse with directive") {
    PolicySet policy = parse_rules("#mode=segmented\nsrc,dst,protocol,port\nweb1,db1,tcp,5432\n",
                                   ProtocolUniverse::standard());
    CHECK(policy.mode == PolicyMode::Segmented);
    REQUIRE(policy.rules.size() == 1);
    CHECK(policy.rules[0].src == "web1");
    CHECK(policy.rules[0].ports == PortRange{5432, 5432});
}

TEST_CASE("rules port forms") {
    PolicySet policy = parse_rules(
        "src,dst,protocol,port\n"
        "a,b,tcp,80\n"
        "a,b,udp,100-200\n"
        "a,b,icmp,*\n",
        ProtocolUniverse::standard(), 30000);
    REQUIRE(policy.rules.size() == 3);
    CHECK(policy.rules[0].ports == PortRange{80, 80});
    CHECK(policy.rules[1].ports == PortRange{100, 200});
    CHECK(policy.rules[2].ports == PortRange{1, 30000});
}

TEST_CASE("rules mode inference and override") {
    const char* generic = "src,dst,protocol,port\n*,*,*,1-65535\n";
    CHECK(parse_rules(generic, ProtocolUniverse::standard()).mode == PolicyMode::Flat);

    const char* narrow = "src,dst,protocol,port\na,b,tcp,80\n";
    CHECK(parse_rules(narrow, ProtocolUniverse::standard()).mode == PolicyMode::Segmented);

    CHECK(parse_rules(generic, ProtocolUniverse::standard(), kMaxPort, PolicyMode::Segmented).mode ==
          PolicyMode::Segmented);
    CHECK(parse_rules("#mode=flat\nsrc,dst,protocol,port\na,b,tcp,80\n",
                      ProtocolUniverse::standard(), kMaxPort, PolicyMode::Segmented)
              .mode == PolicyMode::Segmented);
}

TEST_CASE("rules exact duplicates collapse") {
    PolicySet policy = parse_rules(
        "src,dst,protocol,port\na,b,tcp,80\na,b,tcp,80\na,b,tcp,81\n", ProtocolUniverse::standard());
    CHECK(policy.rules.size() == 2);
}

TEST_CASE("rules blank lines and comments are skipped") {
    PolicySet policy = parse_rules(
        "# produced by hand\n\nsrc,dst,protocol,port\n\na,b,tcp,80\n# trailing\n",
        ProtocolUniverse::standard());
    CHECK(policy.rules.size() == 1);
}

TEST_CASE("rules parse errors") {
    ProtocolUniverse u = ProtocolUniverse::standard();
    CHECK_THROWS_AS(parse_rules("src,dst,proto,port\na,b,tcp,80\n", u), ParseError);
    CHECK_THROWS_AS(parse_rules("src,dst,protocol,port\na,b,tcp\n", u), ParseError);
    CHECK_THROWS_AS(parse_rules("src,dst,protocol,port\na,,tcp,80\n", u), ParseError);
    CHECK_THROWS_AS(parse_rules("#mode=open\nsrc,dst,protocol,port\n", u), ParseError);
    CHECK_THROWS_AS(parse_rules("src,dst,protocol,port\na,b,tcp,x\n", u), ParseError);

    CHECK_THROWS_AS(parse_rules("src,dst,protocol,port\na,b,sctp,80\n", u), ValidationError);
    CHECK_THROWS_AS(parse_rules("src,dst,protocol,port\na,a,tcp,80\n", u), ValidationError);
    CHECK_THROWS_AS(parse_rules("src,dst,protocol,port\na,b,tcp,0\n", u), ValidationError);
    CHECK_THROWS_AS(parse_rules("src,dst,protocol,port\na,b,tcp,90-80\n", u), ValidationError);
    CHECK_THROWS_AS(parse_rules("src,dst,protocol,port\na,b,tcp,500\n", u, 400), ValidationError);
    CHECK_THROWS_AS(parse_rules("src,dst,protocol,port\n", u, 0), ValidationError);

    // The offending line number is part of the message.
    try {
        parse_rules("src,dst,protocol,port\na,b,tcp,80\na,b,tcp,99999\n", u);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("rules emit round-trips") {
    PolicySet policy = parse_rules(
        "#mode=segmented\nsrc,dst,protocol,port\na,b,tcp,80\nb,c,udp,53-60\nc,d,icmp,*\n",
        ProtocolUniverse::standard());
    std::string text = emit_rules(policy);
    PolicySet again = parse_rules(text, ProtocolUniverse::standard());
    CHECK(again == policy);
    CHECK(emit_rules(again) == text);
}

TEST_CASE("scan JSON findings parse") {
    NetworkSpec spec = sample_spec();
    std::vector<std::string> warnings;
    ScanDocument scan = parse_scan(R"({
      "findings": [
        {"host": "web1", "cve": "CVE-2024-0001", "software": "nginx",
         "range": "remote", "cvss": 9.8},
        {"host": "db1", "cve": "CVE-2024-0002", "software": "os-kernel",
         "range": "localExploit", "cvss": 7.0}
      ]
    })",
                                   spec, &warnings);
    CHECK(warnings.empty());
    REQUIRE(scan.findings.size() == 2);
    CHECK(scan.findings[0].vuln_id == "CVE-2024-0001");
    CHECK(scan.findings[0].range == VulnRange::RemoteExploit);
    CHECK(scan.findings[0].cvss_base == doctest::Approx(9.8));
    CHECK(scan.findings[1].range == VulnRange::LocalExploit);
    CHECK(scan.discovered_services.empty());
}

TEST_CASE("scan JSON drops findings without a CVE and duplicates") {
    NetworkSpec spec = sample_spec();
    std::vector<std::string> warnings;
    ScanDocument scan = parse_scan(R"({
      "findings": [
        {"host": "web1", "software": "nginx", "range": "remote", "cvss": 5.0},
        {"host": "web1", "cve": "CVE-1", "software": "nginx", "range": "remote", "cvss": 5.0},
        {"host": "web1", "cve": "CVE-1", "software": "nginx", "range": "remote", "cvss": 6.0}
      ]
    })",
                                   spec, &warnings);
    CHECK(scan.findings.size() == 1);
    CHECK(scan.findings[0].cvss_base == doctest::Approx(5.0));
    // Duplicate rows warn inline; the CVE-less drop count is summarized last.
    REQUIRE(warnings.size() == 2);
    CHECK(warnings[0].find("duplicate") != std::string::npos);
    CHECK(warnings[1].find("without a CVE") != std::string::npos);
}

TEST_CASE("scan JSON host references resolve by name too") {
    NetworkSpec spec = sample_spec();
    ScanDocument scan = parse_scan(
        R"({"findings": [{"host": "front", "cve": "C-1", "software": "nginx",
            "range": "remote", "cvss": 5.0}]})",
        spec);
    REQUIRE(scan.findings.size() == 1);
    CHECK(scan.findings[0].host == "web1");
}

TEST_CASE("scan JSON errors") {
    NetworkSpec spec = sample_spec();
    CHECK_THROWS_AS(parse_scan("", spec), ParseError);
    CHECK_THROWS_AS(parse_scan("{}", spec), ParseError);
    CHECK_THROWS_AS(parse_scan(R"({"findings": [{"host": "web1", "cve": "C-1"}]})", spec),
                    ParseError);
    CHECK_THROWS_AS(parse_scan(R"({"findings": [{"host": "nope", "cve": "C-1",
        "software": "s", "range": "remote", "cvss": 5.0}]})",
                               spec),
                    ValidationError);
    CHECK_THROWS_AS(parse_scan(R"({"findings": [{"host": "web1", "cve": "C-1",
        "software": "s", "range": "remote", "cvss": 11.0}]})",
                               spec),
                    ValidationError);
    CHECK_THROWS_AS(parse_scan(R"({"findings": [{"host": "web1", "cve": "C-1",
        "software": "s", "range": "sideways", "cvss": 5.0}]})",
                               spec),
                    ParseError);
}

TEST_CASE("scan JSON optional services array") {
    NetworkSpec spec = sample_spec();
    ScanDocument scan = parse_scan(R"({
      "findings": [],
      "services": [{"host": "db1", "software": "postgres", "protocol": "tcp", "port": 5432}]
    })",
                                   spec);
    REQUIRE(scan.discovered_services.size() == 1);
    CHECK(scan.discovered_services[0].host == "db1");
    CHECK(scan.discovered_services[0].port == 5432);
}

TEST_CASE("scan Nessus XML parse") {
    NetworkSpec spec = sample_spec();
    std::vector<std::string> warnings;
    ScanDocument scan = parse_scan(R"(<?xml version="1.0"?>
<NessusClientData_v2>
  <Report name="weekly">
    <ReportHost name="front">
      <ReportItem port="443" protocol="tcp" svc_name="www" severity="4">
        <cve>CVE-2024-1111</cve>
        <cve>CVE-2024-2222</cve>
        <cvss3_base_score>9.1</cvss3_base_score>
      </ReportItem>
      <ReportItem port="0" protocol="tcp" svc_name="general" severity="3">
        <cve>CVE-2024-3333</cve>
        <cvss3_base_score>7.8</cvss3_base_score>
      </ReportItem>
      <ReportItem port="443" protocol="tcp" svc_name="www" severity="0">
        <plugin_output>no cve here</plugin_output>
      </ReportItem>
    </ReportHost>
  </Report>
</NessusClientData_v2>
)",
                                   spec, &warnings);
    REQUIRE(scan.findings.size() == 3);
    CHECK(scan.findings[0].vuln_id == "CVE-2024-1111");
    CHECK(scan.findings[0].host == "web1");
    CHECK(scan.findings[0].range == VulnRange::RemoteExploit);
    CHECK(scan.findings[0].cvss_base == doctest::Approx(9.1));
    CHECK(scan.findings[1].vuln_id == "CVE-2024-2222");
    CHECK(scan.findings[2].range == VulnRange::LocalExploit);
    CHECK(scan.findings[2].cvss_base == doctest::Approx(7.8));
    // Two items on 443 collapse into one discovered endpoint.
    REQUIRE(scan.discovered_services.size() == 1);
    CHECK(scan.discovered_services[0].host == "web1");
    CHECK(scan.discovered_services[0].software == "www");
    // The CVE-less item is dropped with a warning.
    REQUIRE(!warnings.empty());
    CHECK(warnings[0].find("without a CVE") != std::string::npos);
}

TEST_CASE("scan Nessus XML errors") {
    NetworkSpec spec = sample_spec();
    CHECK_THROWS_AS(parse_scan("<NessusClientData_v2><Report>", spec), ParseError);
    CHECK_THROWS_AS(parse_scan(R"(<NessusClientData_v2>
        <ReportHost name="stranger"><ReportItem port="1" protocol="tcp" svc_name="x">
        <cve>C-1</cve></ReportItem></ReportHost></NessusClientData_v2>)",
                               spec),
                    ValidationError);
}

TEST_CASE("scan emit round-trips including services") {
    NetworkSpec spec = sample_spec();
    ScanDocument scan = parse_scan(R"({
      "findings": [{"host": "web1", "cve": "CVE-9", "software": "nginx",
                    "range": "remote", "cvss": 8.0}],
      "services": [{"host": "web1", "software": "nginx", "protocol": "tcp", "port": 443}]
    })",
                                   spec);
    std::string text = emit_scan(scan);
    ScanDocument again = parse_scan(text, spec);
    CHECK(again == scan);
    CHECK(emit_scan(again) == text);
}
