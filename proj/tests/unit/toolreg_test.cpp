#include <gtest/gtest.h>

#include "alurity/toolreg/registry.hpp"
#include "listings.hpp"

using namespace alurity;
using namespace alurity::toolreg;
namespace t = alurity::testing;

namespace {

const std::string kPrefix = "registry.gitlab.com/aliasrobotics/offensive/alurity/";

RegistryIndex fixture_index() { return RegistryIndex::load_file(t::fixture_path("registry.yaml")); }

} // namespace

TEST(Classify, PrefixGroups) {
    EXPECT_EQ(classify(t::ref(kPrefix + "robo_ur_cb3_1:3.13.0")), ModuleGroup::robots);
    EXPECT_EQ(classify(t::ref(kPrefix + "reco_aztarna:latest")), ModuleGroup::reconnaissance);
    EXPECT_EQ(classify(t::ref(kPrefix + "comp_ros:melodic-scenario")), ModuleGroup::robot_components);
    EXPECT_EQ(classify(t::ref("r/x/xyz_tool:1")), ModuleGroup::unknown);
}

TEST(Registry, LoadsFixtureIndex) {
    const auto index = fixture_index();
    EXPECT_EQ(index.size(), 6u);
    const auto robosploit = index.lookup(t::ref(kPrefix + "expl_robosploit/expl_robosploit:latest"));
    EXPECT_EQ(robosploit.group, ModuleGroup::exploitation);
    ASSERT_EQ(robosploit.rules.size(), 1u);
    EXPECT_EQ(robosploit.rules[0].fields, (std::vector<std::string>{"module", "summary"}));
    EXPECT_EQ(robosploit.rules[0].severity, "high");
    const auto aztarna = index.lookup(t::ref(kPrefix + "reco_aztarna:latest"));
    EXPECT_EQ(aztarna.rules[0].vendor, "Universal Robots");
    EXPECT_EQ(index.lookup(t::ref(kPrefix + "robo_ur_cb3_1:3.13.0")).group, ModuleGroup::robots);
}

TEST(Registry, LookupIsExact) {
    const auto index = fixture_index();
    EXPECT_THROW(index.lookup(t::ref(kPrefix + "reco_aztarna:1.0")), UnknownModule);
    EXPECT_THROW(index.lookup(t::ref("other/reco_aztarna:latest")), UnknownModule);
    EXPECT_EQ(index.find(t::ref(kPrefix + "reco_aztarna:1.0")), nullptr);
}

TEST(Registry, RejectsBadManifests) {
    EXPECT_THROW(RegistryIndex::parse("not a ref/:\n  tools: []\n"), RegistryError);
    EXPECT_THROW(RegistryIndex::parse("a/b:1:\n  group: wizards\n"), RegistryError);
    EXPECT_THROW(RegistryIndex::parse("a/b:1:\n  rules:\n    - id: r\n      pattern: '('\n      title: t\n"),
                 RegistryError);
    EXPECT_THROW(RegistryIndex::parse("a/b:1:\n  rules:\n    - id: r\n      pattern: 'x'\n      fields: [a]\n"
                                      "      title: t\n"),
                 RegistryError);
    EXPECT_THROW(RegistryIndex::parse("a/b:1:\n  colour: red\n"), RegistryError);
}

TEST(Registry, PermissiveSynthesizesManifests) {
    const auto index = RegistryIndex::permissive();
    const auto m = index.lookup(t::ref(kPrefix + "reco_aztarna:latest"));
    EXPECT_EQ(m.group, ModuleGroup::reconnaissance);
    EXPECT_EQ(m.tools, std::vector<std::string>{"aztarna"});
    EXPECT_EQ(default_tool_name(t::ref("r/x/expl_robosploit/expl_robosploit:latest")), "robosploit");
    EXPECT_EQ(default_tool_name(t::ref("ubuntu:20.04")), "ubuntu");
}

TEST(Resolve, AttackerStack) {
    const auto attacker = t::expected_listing1().containers[1];
    const auto image = resolve(attacker, fixture_index());
    EXPECT_EQ(image.base, attacker.base);
    EXPECT_EQ(image.overlays, attacker.volumes);
    for (const char* tool : {"robosploit", "aztarna", "gazebo", "roscore"}) {
        EXPECT_TRUE(image.provides_tool(tool)) << tool;
    }
    // gazebo is provided by both the base and the last overlay.
    EXPECT_EQ(image.provides.at("gazebo"), attacker.volumes.back());
    EXPECT_EQ(image.entrypoint, "aztarna -t ros -a {target}");
}

TEST(Resolve, BaseOnly) {
    const auto ur3 = t::expected_listing1().containers[0];
    const auto image = resolve(ur3, fixture_index());
    EXPECT_TRUE(image.overlays.empty());
    EXPECT_EQ(image.provides.size(), 1u);
    EXPECT_EQ(image.provides.at("ur-controller"), ur3.base);
    EXPECT_EQ(image.entrypoint, "/opt/urcontrol/start");
}

TEST(Resolve, MissingVolume) {
    auto attacker = t::expected_listing1().containers[1];
    attacker.volumes.push_back(t::ref(kPrefix + "fore_missing:1"));
    try {
        resolve(attacker, fixture_index());
        FAIL();
    } catch (const UnknownModule& e) {
        EXPECT_EQ(e.ref(), kPrefix + "fore_missing:1");
    }
}

TEST(ResolveProperty, VolumePermutationsReorderOverlays) {
    RegistryIndex index;
    index.add(t::ref("r/base:1"), {.tools = {"shared", "b"}});
    index.add(t::ref("r/one:1"), {.tools = {"shared", "x"}, .entrypoint = "one"});
    index.add(t::ref("r/two:1"), {.tools = {"shared", "y"}});
    ContainerSpec c{.name = "c", .base = t::ref("r/base:1"), .volumes = {t::ref("r/one:1"), t::ref("r/two:1")}};
    const auto forward = resolve(c, index);
    std::reverse(c.volumes.begin(), c.volumes.end());
    const auto backward = resolve(c, index);
    EXPECT_EQ(forward.overlays, (std::vector<ModuleRef>{t::ref("r/one:1"), t::ref("r/two:1")}));
    EXPECT_EQ(backward.overlays, (std::vector<ModuleRef>{t::ref("r/two:1"), t::ref("r/one:1")}));
    EXPECT_EQ(forward.provides.at("shared"), t::ref("r/two:1"));
    EXPECT_EQ(backward.provides.at("shared"), t::ref("r/one:1"));
    EXPECT_EQ(forward.entrypoint, "one");
    EXPECT_EQ(backward.entrypoint, "one");
    EXPECT_EQ(resolve(c, index), backward);
}
