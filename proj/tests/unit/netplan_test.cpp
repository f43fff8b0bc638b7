#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <set>

#include "alurity/model/errors.hpp"
#include "alurity/netplan/addressing.hpp"
#include "alurity/netplan/connectivity.hpp"
#include "generators.hpp"
#include "listings.hpp"

using namespace alurity;
using namespace alurity::netplan;
namespace t = alurity::testing;

namespace {

Ipv4Address ip(const char* text) { return *Ipv4Address::parse(text); }

int count_matches(const std::string& text, const std::regex& re) {
    return static_cast<int>(std::distance(std::sregex_iterator(text.begin(), text.end(), re), std::sregex_iterator()));
}

int dot_nodes(const std::string& dot) { return count_matches(dot, std::regex(R"(^\s*"[^"]+"\s*\[)", std::regex::multiline)); }
int dot_edges(const std::string& dot) { return count_matches(dot, std::regex(R"(->)")); }

// Reachability stated directly on the scenario: a shared network.
bool shares_network(const Scenario& s, const std::string& a, const std::string& b) {
    if (a == b) {
        return true;
    }
    for (const auto& n : *s.networks_of(a)) {
        for (const auto& m : *s.networks_of(b)) {
            if (n == m) {
                return true;
            }
        }
    }
    return false;
}

} // namespace

TEST(Addressing, ListingOne) {
    const auto a = allocate_addresses(t::expected_listing1());
    EXPECT_EQ(a.gateway_of("process-network"), ip("12.0.0.1"));
    EXPECT_EQ(a.gateway_of("cloud-network"), ip("17.0.0.1"));
    EXPECT_EQ(a.address_of("ur3", "process-network"), ip("12.0.0.20"));
    EXPECT_EQ(a.address_of("attacker", "process-network"), ip("12.0.0.2"));
    EXPECT_EQ(a.address_of("attacker", "cloud-network"), ip("17.0.0.2"));
    EXPECT_FALSE(a.address_of("ur3", "cloud-network"));
    EXPECT_EQ(a.attachments.size(), 3u);
}

TEST(Addressing, MergedKeepsDeclaredVmAddress) {
    const auto a = allocate_addresses(t::merged_listing12());
    EXPECT_EQ(a.address_of("irc5", "process-network"), ip("12.0.0.100"));
    EXPECT_EQ(a.address_of("attacker", "process-network"), ip("12.0.0.2"));
}

TEST(Addressing, FullSubnetFails) {
    Scenario s;
    s.networks.push_back({.name = "tiny", .subnet = *Ipv4Cidr::parse("10.0.0.4/30")});
    s.containers.push_back({.name = "a", .base = t::ref("r/x/a:1"), .networks = {"tiny"}});
    s.containers.push_back({.name = "b", .base = t::ref("r/x/b:1"), .networks = {"tiny"}});
    try {
        allocate_addresses(s);
        FAIL();
    } catch (const AllocationFailure& e) {
        EXPECT_EQ(e.network(), "tiny");
    }
    s.containers.pop_back();
    EXPECT_EQ(allocate_addresses(s).address_of("a", "tiny"), ip("10.0.0.6"));
}

TEST(Addressing, InvalidScenarioIsAPrecondition) {
    auto s = t::expected_listing1();
    s.containers[0].ip = ip("13.0.0.5");
    EXPECT_THROW(allocate_addresses(s), PreconditionError);
}

TEST(AddressingProperty, AgreesWithBruteForce) {
    std::mt19937 rng(5);
    for (int round = 0; round < 200; ++round) {
        const auto s = t::random_scenario(rng);
        AddressAssignment a;
        try {
            a = allocate_addresses(s);
        } catch (const AllocationFailure&) {
            continue;
        }
        EXPECT_EQ(a, allocate_addresses(s));
        // Replay the allocation rule by scanning each subnet from the bottom.
        std::map<std::string, std::set<std::uint32_t>> taken;
        for (const auto& n : s.networks) {
            taken[n.name].insert(n.subnet.first_host().value());
        }
        for (const auto& ep : endpoints(s)) {
            if (auto declared = s.declared_ip(ep.name)) {
                for (const auto& n : *s.networks_of(ep.name)) {
                    if (s.find_network(n)->subnet.contains(*declared)) {
                        taken[n].insert(declared->value());
                    }
                }
            }
        }
        std::vector<Attachment> expected;
        for (const auto& ep : endpoints(s)) {
            const auto declared = s.declared_ip(ep.name);
            for (const auto& n : *s.networks_of(ep.name)) {
                const auto& subnet = s.find_network(n)->subnet;
                if (declared && subnet.contains(*declared)) {
                    expected.push_back({ep.name, n, *declared});
                    continue;
                }
                std::uint32_t candidate = subnet.network().value() + 1;
                while (taken[n].contains(candidate)) {
                    ++candidate;
                }
                ASSERT_LT(candidate, subnet.broadcast().value());
                taken[n].insert(candidate);
                expected.push_back({ep.name, n, Ipv4Address{candidate}});
            }
        }
        ASSERT_EQ(a.attachments, expected);
    }
}

TEST(Connectivity, ListingOnePlan) {
    const auto s = t::expected_listing1();
    const auto a = allocate_addresses(s);
    const auto plan = build_connectivity_plan(s, a);
    EXPECT_EQ(plan.all<BridgeEntry>(), (std::vector<BridgeEntry>{{"br-process-network", "process-network"},
                                                                 {"br-cloud-network", "cloud-network"}}));
    EXPECT_EQ(plan.all<VethPairEntry>().size(), 3u);
    EXPECT_TRUE(plan.all<TapAttachEntry>().empty());
    EXPECT_TRUE(plan.all<RouteEntry>().empty());
    EXPECT_EQ(plan.all<FilterRuleEntry>(),
              (std::vector<FilterRuleEntry>{{FilterAction::drop_external, "process-network"},
                                            {FilterAction::masquerade, "cloud-network"}}));
    EXPECT_EQ(parse_plan(serialize_plan(plan)), plan);
}

TEST(Connectivity, MixedPlan) {
    const auto s = t::merged_listing12();
    const auto a = allocate_addresses(s);
    const auto plan = build_connectivity_plan(s, a);
    EXPECT_EQ(plan.all<BridgeEntry>().size(), 2u);
    EXPECT_EQ(plan.all<VethPairEntry>().size(), 3u);
    EXPECT_EQ(plan.all<TapAttachEntry>(), (std::vector<TapAttachEntry>{{"irc5", "br-process-network"}}));
    EXPECT_EQ(plan.all<RouteEntry>(), (std::vector<RouteEntry>{{*Ipv4Cidr::parse("12.0.0.0/24"), ip("12.0.0.1")}}));
    EXPECT_TRUE(reachable(plan, a, "irc5", "ur3"));
    EXPECT_TRUE(reachable(plan, a, "irc5", "attacker"));
    EXPECT_THROW(reachable(plan, a, "irc5", "ghost"), UnknownEndpoint);
    EXPECT_EQ(parse_plan(serialize_plan(plan)), plan);

    // Entry order: bridges, attachments, routes, filter rules, metadata.
    std::vector<std::size_t> kinds;
    for (const auto& e : plan.entries) {
        kinds.push_back(e.index());
    }
    EXPECT_TRUE(std::is_sorted(kinds.begin(), kinds.end()));
}

TEST(Connectivity, CloudOnlyEndpointIsUnreachableFromVm) {
    auto s = t::merged_listing12();
    s.containers.push_back({.name = "cloudy", .base = t::ref("r/x/comp_ros:1"), .networks = {"cloud-network"}});
    const auto a = allocate_addresses(s);
    const auto plan = build_connectivity_plan(s, a);
    EXPECT_FALSE(reachable(plan, a, "irc5", "cloudy"));
    EXPECT_TRUE(reachable(plan, a, "attacker", "cloudy"));
}

TEST(Connectivity, EncryptionBecomesMetadata) {
    auto s = t::expected_listing1();
    s.networks[1].encryption = true;
    const auto plan = build_connectivity_plan(s, allocate_addresses(s));
    EXPECT_EQ(plan.all<MetadataEntry>(), (std::vector<MetadataEntry>{{"cloud-network", true}}));
}

TEST(ConnectivityProperty, InvariantsAndReachabilityOracle) {
    std::mt19937 rng(11);
    for (int round = 0; round < 150; ++round) {
        const auto s = t::random_scenario(rng, {.max_networks = 4, .max_endpoints = 8});
        AddressAssignment a;
        try {
            a = allocate_addresses(s);
        } catch (const AllocationFailure&) {
            continue;
        }
        const auto plan = build_connectivity_plan(s, a);
        for (const auto& n : s.networks) {
            const auto rules = plan.all<FilterRuleEntry>();
            for (const auto& r : rules) {
                if (r.network == n.name && n.internal) {
                    EXPECT_NE(r.action, FilterAction::masquerade);
                }
            }
        }
        for (const auto& x : endpoints(s)) {
            for (const auto& y : endpoints(s)) {
                ASSERT_EQ(reachable(plan, a, x.name, y.name), shares_network(s, x.name, y.name))
                    << x.name << " " << y.name;
            }
        }
        EXPECT_EQ(parse_plan(serialize_plan(plan)), plan);
    }
}

TEST(Graph, NodeAndEdgeCounts) {
    const auto check = [](const Scenario& s, int nodes, int edges) {
        const auto a = allocate_addresses(s);
        const auto dot = export_graph(build_connectivity_plan(s, a), a, GraphFormat::dot);
        EXPECT_EQ(dot.rfind("digraph", 0), 0u) << dot;
        EXPECT_EQ(dot_nodes(dot), nodes) << dot;
        EXPECT_EQ(dot_edges(dot), edges) << dot;
        EXPECT_EQ(dot, export_graph(build_connectivity_plan(s, a), a, GraphFormat::dot));
    };
    check(t::expected_listing1(), 4, 3);
    check(Scenario{}, 0, 0);
    check(t::merged_listing12(), 5, 4);
    EXPECT_EQ(parse_graph_format("dot"), GraphFormat::dot);
    EXPECT_THROW(parse_graph_format("png"), UnsupportedFormat);
}
