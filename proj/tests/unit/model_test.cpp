#include <gtest/gtest.h>

#include <random>

#include "alurity/model/ipv4.hpp"
#include "alurity/model/module_ref.hpp"
#include "alurity/model/validate.hpp"
#include "generators.hpp"
#include "listings.hpp"

using namespace alurity;
using alurity::testing::expected_listing1;
using alurity::testing::merged_listing12;

namespace {

std::vector<std::string> codes(const std::vector<Diagnostic>& diagnostics) {
    std::vector<std::string> out;
    for (const auto& d : diagnostics) {
        out.push_back(d.code);
    }
    return out;
}

bool names_location(const std::vector<Diagnostic>& diagnostics, const std::string& location) {
    return std::any_of(diagnostics.begin(), diagnostics.end(), [&](const Diagnostic& d) {
        return d.severity == Severity::error && d.location == location;
    });
}

} // namespace

TEST(Ipv4, ParsesAndPrintsDottedQuad) {
    auto addr = Ipv4Address::parse("12.0.0.20");
    ASSERT_TRUE(addr);
    EXPECT_EQ(addr->value(), (12u << 24) | 20u);
    EXPECT_EQ(addr->to_string(), "12.0.0.20");
    for (const char* bad : {"", "1.2.3", "1.2.3.4.5", "256.0.0.1", "01.2.3.4", "1.2.3.4 ", "a.b.c.d", "1..2.3"}) {
        EXPECT_FALSE(Ipv4Address::parse(bad)) << bad;
    }
}

TEST(Ipv4, CidrGeometry) {
    auto net = *Ipv4Cidr::parse("12.0.0.0/24");
    EXPECT_EQ(net.network().to_string(), "12.0.0.0");
    EXPECT_EQ(net.broadcast().to_string(), "12.0.0.255");
    EXPECT_EQ(net.first_host().to_string(), "12.0.0.1");
    EXPECT_EQ(net.host_count(), 254u);
    EXPECT_TRUE(net.contains(*Ipv4Address::parse("12.0.0.20")));
    EXPECT_FALSE(net.contains(*Ipv4Address::parse("13.0.0.5")));

    auto slash30 = *Ipv4Cidr::parse("10.0.0.4/30");
    EXPECT_EQ(slash30.host_count(), 2u);
    EXPECT_TRUE(Ipv4Cidr::parse("10.0.0.5/24")->has_host_bits());
    EXPECT_TRUE(Ipv4Cidr::parse("10.0.0.0/8")->overlaps(*Ipv4Cidr::parse("10.3.0.0/16")));
    EXPECT_FALSE(Ipv4Cidr::parse("10.0.0.0/24")->overlaps(*Ipv4Cidr::parse("10.0.1.0/24")));
    for (const char* bad : {"10.0.0.0", "10.0.0.0/33", "10.0.0.0/", "10.0.0.0/024", "10.0.0.0/x"}) {
        EXPECT_FALSE(Ipv4Cidr::parse(bad)) << bad;
    }
}

TEST(ModuleRef, PrintingReproducesInput) {
    for (const char* text : {"registry.gitlab.com/aliasrobotics/offensive/alurity/robo_ur_cb3_1:3.13.0",
                             "registry.gitlab.com/aliasrobotics/offensive/alurity/expl_robosploit/expl_robosploit:latest",
                             "a/b:1", "localhost:5000/tool:2", "ubuntu", "ubuntu:20.04", "reg/path/without/tag"}) {
        auto ref = ModuleRef::parse(text);
        ASSERT_TRUE(ref) << text;
        EXPECT_EQ(ref->to_string(), text);
    }
    auto ref = *ModuleRef::parse("localhost:5000/tool:2");
    EXPECT_EQ(ref.registry, "localhost:5000");
    EXPECT_EQ(ref.path, "tool");
    EXPECT_EQ(ref.tag, "2");
    for (const char* bad : {"", "/x:1", "a/b:", "a/b/", "has space/x:1", "a//b:1"}) {
        EXPECT_FALSE(ModuleRef::parse(bad)) << bad;
    }
}

TEST(ModuleRef, GroupFollowsLeafPrefix) {
    EXPECT_EQ(ModuleRef::parse("r/x/robo_ur_cb3_1:3.13.0")->group(), ModuleGroup::robots);
    EXPECT_EQ(ModuleRef::parse("r/x/expl_robosploit/expl_robosploit:latest")->group(), ModuleGroup::exploitation);
    EXPECT_EQ(ModuleRef::parse("r/x/deve_gazebo:latest")->group(), ModuleGroup::ide_ui);
    EXPECT_EQ(ModuleRef::parse("r/x/xyz_tool:1")->group(), ModuleGroup::unknown);

    GroupPrefixTable custom{{{"xyz_", ModuleGroup::forensics}}};
    EXPECT_EQ(ModuleRef::parse("r/x/xyz_tool:1")->group(custom), ModuleGroup::forensics);
}

TEST(Validate, ListingOneIsClean) {
    EXPECT_TRUE(validate(expected_listing1()).empty());
    EXPECT_TRUE(validate(merged_listing12()).empty());
}

TEST(Validate, IpOutsideSubnet) {
    auto s = expected_listing1();
    s.containers[0].ip = Ipv4Address::parse("13.0.0.5");
    const auto diagnostics = validate(s);
    ASSERT_EQ(diagnostics.size(), 1u);
    EXPECT_EQ(diagnostics[0].code, "ip-outside-subnet");
    EXPECT_EQ(diagnostics[0].location, "containers[0].ip");
    EXPECT_EQ(diagnostics[0].severity, Severity::error);
}

TEST(Validate, DuplicateIp) {
    auto s = expected_listing1();
    s.containers[1].ip = Ipv4Address::parse("12.0.0.20");
    EXPECT_EQ(codes(validate(s)), std::vector<std::string>{"duplicate-ip"});
}

TEST(Validate, ReservedAddresses) {
    for (const char* ip : {"12.0.0.0", "12.0.0.1", "12.0.0.255"}) {
        auto s = expected_listing1();
        s.containers[0].ip = Ipv4Address::parse(ip);
        EXPECT_EQ(codes(validate(s)), std::vector<std::string>{"ip-reserved"}) << ip;
    }
}

TEST(Validate, NetworkLevelChecks) {
    auto s = expected_listing1();
    s.networks[1].subnet = *Ipv4Cidr::parse("12.0.0.128/25");
    EXPECT_EQ(codes(validate(s)), std::vector<std::string>{"overlapping-subnet"});

    s = expected_listing1();
    s.networks[1].name = "process-network";
    EXPECT_TRUE(names_location(validate(s), "networks[1].name"));

    s = expected_listing1();
    s.networks[0].subnet = *Ipv4Cidr::parse("12.0.0.0/31");
    s.containers[0].ip.reset();
    EXPECT_EQ(codes(validate(s)), std::vector<std::string>{"invalid-prefix"});

    s = expected_listing1();
    s.networks[0].subnet = *Ipv4Cidr::parse("12.0.0.0/7");
    EXPECT_TRUE(names_location(validate(s), "networks[0].subnet"));
}

TEST(Validate, ZeroNetworksIsOnlyAWarning) {
    auto s = expected_listing1();
    s.containers[1].networks.clear();
    const auto diagnostics = validate(s);
    ASSERT_EQ(diagnostics.size(), 1u);
    EXPECT_EQ(diagnostics[0].code, "no-network");
    EXPECT_EQ(diagnostics[0].severity, Severity::warning);
    EXPECT_FALSE(has_errors(diagnostics));
}

TEST(Validate, OrderingIsDocumentThenCode) {
    auto s = expected_listing1();
    s.containers[1].networks = {"nowhere"};
    s.containers[1].cpus = 0;
    s.containers[0].ip = Ipv4Address::parse("17.0.0.9");
    s.networks[1].name = "bad name";
    const auto diagnostics = validate(s);
    std::vector<std::string> locations;
    for (const auto& d : diagnostics) {
        locations.push_back(d.location);
    }
    EXPECT_EQ(locations, (std::vector<std::string>{"networks[1].name", "containers[0].ip",
                                                   "containers[1].networks[0]", "containers[1].cpus"}));
}

TEST(Endpoints, ContainersThenVms) {
    EXPECT_EQ(endpoints(expected_listing1()),
              (std::vector<EndpointRef>{{"ur3", EndpointKind::container}, {"attacker", EndpointKind::container}}));
    EXPECT_EQ(endpoints(merged_listing12()),
              (std::vector<EndpointRef>{{"ur3", EndpointKind::container},
                                        {"attacker", EndpointKind::container},
                                        {"irc5", EndpointKind::vm}}));
    EXPECT_TRUE(endpoints(Scenario{}).empty());
}

// Independent statement of every scenario invariant.
namespace {

bool invariants_hold(const Scenario& s) {
    std::set<std::string> nets;
    for (const auto& n : s.networks) {
        if (!nets.insert(n.name).second || n.subnet.prefix() < 8 || n.subnet.prefix() > 30) {
            return false;
        }
    }
    for (std::size_t i = 0; i < s.networks.size(); ++i) {
        for (std::size_t j = i + 1; j < s.networks.size(); ++j) {
            const auto& a = s.networks[i].subnet;
            const auto& b = s.networks[j].subnet;
            if (a.contains(b.network()) || b.contains(a.network())) {
                return false;
            }
        }
    }
    std::set<std::string> names;
    std::set<std::uint32_t> ips;
    const auto check = [&](const std::string& name, const std::vector<std::string>& attached,
                           const std::optional<Ipv4Address>& ip) {
        if (!names.insert(name).second) {
            return false;
        }
        for (const auto& n : attached) {
            if (!nets.contains(n)) {
                return false;
            }
        }
        if (ip) {
            int homes = 0;
            for (const auto& n : attached) {
                const auto& subnet = s.find_network(n)->subnet;
                if (subnet.contains(*ip)) {
                    ++homes;
                    if (*ip == subnet.network() || *ip == subnet.broadcast()) {
                        return false;
                    }
                }
            }
            if (homes != 1 || !ips.insert(ip->value()).second) {
                return false;
            }
        }
        return true;
    };
    for (const auto& c : s.containers) {
        if (c.base.path.empty() || !check(c.name, c.networks, c.ip)) {
            return false;
        }
    }
    for (const auto& v : s.vms) {
        if (!check(v.name, v.networks, v.ip)) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST(ValidateProperty, CleanImpliesInvariantsAndInjectedViolationsAreLocated) {
    std::mt19937 rng(20240607);
    int injected = 0;
    for (int round = 0; round < 300; ++round) {
        auto s = alurity::testing::random_scenario(rng);
        const auto diagnostics = validate(s);
        ASSERT_FALSE(has_errors(diagnostics)) << format_diagnostic(diagnostics.front());
        EXPECT_TRUE(invariants_hold(s));
        EXPECT_EQ(validate(s), diagnostics);

        // One violation at a time, each must be reported at its location.
        if (!s.containers.empty()) {
            auto broken = s;
            if (s.containers.size() > 1) {
                broken.containers.back().name = s.containers.front().name;
                EXPECT_TRUE(names_location(validate(broken), "containers[" +
                                                                 std::to_string(s.containers.size() - 1) + "].name"));
                ++injected;
            }
            broken = s;
            broken.containers.front().networks.push_back("no-such-network");
            EXPECT_TRUE(names_location(validate(broken),
                                       "containers[0].networks[" +
                                           std::to_string(broken.containers.front().networks.size() - 1) + "]"));
            broken = s;
            broken.containers.front().ip = Ipv4Address::parse("203.0.113.9");
            EXPECT_TRUE(names_location(validate(broken), "containers[0].ip"));
            EXPECT_FALSE(invariants_hold(broken));
            ++injected;
        }
        if (s.networks.size() >= 2) {
            auto broken = s;
            broken.networks[1].subnet = broken.networks[0].subnet;
            EXPECT_TRUE(names_location(validate(broken), "networks[1].subnet"));
            EXPECT_FALSE(invariants_hold(broken));
            ++injected;
        }
    }
    EXPECT_GT(injected, 100);
}
