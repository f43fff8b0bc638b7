#include <gtest/gtest.h>

#include <random>

#include "alurity/model/validate.hpp"
#include "alurity/parser/raw_node.hpp"
#include "alurity/parser/scenario_parser.hpp"
#include "generators.hpp"
#include "listings.hpp"

using namespace alurity;
namespace t = alurity::testing;

namespace {

std::string failure_code(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ParseFailure& e) {
        return e.code();
    }
    return "";
}

SourceMark failure_mark(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ParseFailure& e) {
        return e.mark();
    }
    return {};
}

} // namespace

TEST(ScenarioParser, ListingsMatchFieldForField) {
    EXPECT_EQ(parse_scenario(t::read_fixture("listing1.yaml")), t::expected_listing1());
    EXPECT_EQ(parse_scenario(t::read_fixture("listing2.yaml")), t::expected_listing2());
    EXPECT_EQ(parse_flow(t::read_fixture("listing3.yaml")), t::expected_listing3());
    EXPECT_EQ(parse_scenario(t::read_fixture("listing12.yaml")), t::merged_listing12());
}

TEST(ScenarioParser, ListingOneDetails) {
    const auto s = parse_scenario(t::read_fixture("listing1.yaml"));
    ASSERT_EQ(s.networks.size(), 2u);
    EXPECT_EQ(s.networks[1].driver, "overlay");
    EXPECT_FALSE(s.networks[1].internal);
    EXPECT_FALSE(s.networks[1].encryption);
    EXPECT_EQ(s.containers[0].ip->to_string(), "12.0.0.20");
    EXPECT_EQ(s.containers[0].cpus, 4);
    EXPECT_EQ(s.containers[0].memory, 2048);
    EXPECT_EQ(s.containers[1].volumes.size(), 3u);
    EXPECT_EQ(s.containers[1].extra_options, "ALL");
    EXPECT_EQ(s.containers[1].networks, (std::vector<std::string>{"process-network", "cloud-network"}));
}

TEST(ScenarioParser, SourceLinesAreRecorded) {
    const auto s = parse_scenario(t::read_fixture("listing1.yaml"));
    EXPECT_EQ(s.source.line_of("networks[0].subnet"), 7);
    EXPECT_EQ(s.source.line_of("containers[0].ip"), 21);
    EXPECT_EQ(s.source.line_of("containers[1].networks[1]"), 34);

    auto broken = t::read_fixture("listing1.yaml");
    broken.replace(broken.find("12.0.0.20"), 9, "13.0.0.5");
    const auto diagnostics = validate(parse_scenario(broken));
    ASSERT_EQ(diagnostics.size(), 1u);
    EXPECT_EQ(diagnostics[0].code, "ip-outside-subnet");
    EXPECT_EQ(diagnostics[0].line, 21);
}

TEST(ScenarioParser, FixtureDiagnostics) {
    auto d = validate(parse_scenario(t::read_fixture("ip-outside.yaml")));
    ASSERT_FALSE(d.empty());
    EXPECT_EQ(d[0].code, "ip-outside-subnet");
    EXPECT_TRUE(d[0].line.has_value());

    d = validate(parse_scenario(t::read_fixture("duplicate-ip.yaml")));
    EXPECT_EQ(std::count_if(d.begin(), d.end(), [](const auto& x) { return x.code == "duplicate-ip"; }), 1);

    d = validate(parse_scenario(t::read_fixture("no-networks-section.yaml")));
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0].code, "no-network");
    EXPECT_EQ(d[0].severity, Severity::warning);
    EXPECT_EQ(d[0].location, "containers[0].networks");
    EXPECT_EQ(d[1].code, "network-not-found");
    EXPECT_EQ(d[1].severity, Severity::error);
}

TEST(ScenarioParser, DiagonalSplitIsRejected) {
    std::string text = t::read_fixture("listing3.yaml");
    text.replace(text.find("split: horizontal\n"), 17, "split: diagonal");
    try {
        parse_flow(text);
        FAIL() << "expected ParseFailure";
    } catch (const ParseFailure& e) {
        EXPECT_EQ(e.code(), "unknown-split");
        EXPECT_EQ(e.mark().line, 10);
        EXPECT_GT(e.mark().column, 0);
    }
}

TEST(ScenarioParser, RepeatedKeyIsRejected) {
    const std::string text = R"(networks:
  - network:
    - name: n
    - subnet: 10.0.0.0/24
containers:
  - container:
    - name: c
    - modules:
      - base: a/b:1
      - base: a/c:1
      - network:
        - n
)";
    EXPECT_EQ(failure_code(text), "repeated-key");
    EXPECT_EQ(failure_mark(text).line, 10);
}

TEST(ScenarioParser, StructuralFailures) {
    EXPECT_EQ(failure_code("networks: [\n"), "malformed-yaml");
    EXPECT_EQ(failure_code("networks: []\n---\nnetworks: []\n"), "multi-document");
    EXPECT_EQ(failure_code("routers: []\n"), "unknown-section");
    EXPECT_EQ(failure_code("networks:\n  - network:\n    - name: n\n"), "missing-key");
    EXPECT_EQ(failure_code("networks:\n  - network:\n    - name: n\n    - subnet: 10.0.0.0/33\n"), "invalid-subnet");
    EXPECT_EQ(failure_code("networks:\n  - network:\n    - name: n\n    - subnet: 10.0.0.0/24\n"
                           "    - internal: maybe\n"),
              "expected-boolean");
    EXPECT_EQ(failure_code("containers:\n  - container:\n    - name: c\n    - modules:\n      - base: a/b:1\n"
                           "    - cpus: four\n"),
              "expected-integer");
    EXPECT_EQ(failure_code("containers:\n  - container:\n    - name: c\n    - modules:\n      - base: a/b:1\n"
                           "    - ip: 1.2.3\n"),
              "invalid-address");
    EXPECT_EQ(failure_code("containers:\n  - container:\n    - name: c\n    - modules:\n      - base: \"a/b:\"\n"),
              "invalid-module-ref");
    EXPECT_EQ(failure_code("containers:\n  - container:\n    - name: c\n    - modules:\n      - base: a/b:1\n"
                           "  - router:\n    - name: r\n"),
              "unexpected-entry");
}

TEST(ScenarioParser, UnknownKeysBecomeWarnings) {
    const auto s = parse_scenario("containers:\n  - container:\n    - name: c\n    - colour: blue\n"
                                  "    - modules:\n      - base: a/b:1\n");
    ASSERT_EQ(s.source.warnings.size(), 1u);
    EXPECT_EQ(s.source.warnings[0].code, "unknown-key");
    EXPECT_EQ(s.source.warnings[0].line, 4);
    const auto d = validate(s);
    EXPECT_TRUE(std::any_of(d.begin(), d.end(), [](const auto& x) { return x.code == "unknown-key"; }));
}

TEST(FlowParser, StepVariants) {
    const auto flow = parse_flow(R"(flow:
  - vm:
    - name: irc5
    - window:
      - name: w
      - commands:
        - command: "a"
        - command-fail-fast: "b"
        - split: vertical
        - command: "c"
    - select: w
)");
    ASSERT_EQ(flow.size(), 1u);
    EXPECT_EQ(flow[0].kind, EndpointKind::vm);
    EXPECT_EQ(flow[0].selected_window, "w");
    ASSERT_EQ(flow[0].windows[0].items.size(), 4u);
    EXPECT_FALSE(std::get<Command>(flow[0].windows[0].items[0]).fail_fast);
    EXPECT_TRUE(std::get<Command>(flow[0].windows[0].items[1]).fail_fast);
    EXPECT_EQ(std::get<Split>(flow[0].windows[0].items[2]).direction, SplitDirection::vertical);

    EXPECT_THROW(parse_flow("networks: []\n"), ParseFailure);
    try {
        parse_flow("flow:\n  - container:\n    - name: x\n    - window:\n      - name: w\n      - commands:\n"
                   "        - run: ls\n");
        FAIL();
    } catch (const ParseFailure& e) {
        EXPECT_EQ(e.code(), "unknown-step");
    }
}

TEST(Serializer, ListingsRoundTrip) {
    for (const auto& s : {t::expected_listing1(), t::expected_listing2(), t::merged_listing12()}) {
        const auto text = serialize_scenario(s);
        EXPECT_EQ(parse_scenario(text), s) << text;
        EXPECT_EQ(serialize_scenario(parse_scenario(text)), text);
    }
    const auto flow = t::expected_listing3();
    EXPECT_EQ(parse_flow(serialize_flow(flow)), flow);
}

TEST(Serializer, EmptyScenario) {
    EXPECT_EQ(parse_scenario(serialize_scenario(Scenario{})), Scenario{});
}

TEST(Serializer, RandomScenariosRoundTrip) {
    std::mt19937 rng(77);
    for (int i = 0; i < 100; ++i) {
        const auto s = t::random_scenario(rng);
        const auto text = serialize_scenario(s);
        Scenario back;
        ASSERT_NO_THROW(back = parse_scenario(text)) << text;
        ASSERT_EQ(back, s) << text;
        ASSERT_EQ(parse_flow(serialize_flow(s.flows)), s.flows);
    }
}

TEST(YamlScalar, QuotesOnlyWhenNeeded) {
    EXPECT_EQ(yaml_scalar("process-network"), "process-network");
    EXPECT_EQ(yaml_scalar("12.0.0.0/24"), "12.0.0.0/24");
    for (const char* tricky : {"", "true", "null", "~", "123", "1.5", "0x1F", "a: b", "a #b", "- x", "[x]", " x",
                               "x ", "x:", "\"q\"", "'q'", "tab\there", "line\nbreak", "&anchor", "*ref", "!tag",
                               "%d", "@x", "`x", "{a}", "|", ">", "?x", "Yes", "off", ".inf"}) {
        const auto emitted = yaml_scalar(tricky);
        const auto node = load_document("k: " + emitted + "\n");
        ASSERT_TRUE(node.is_mapping()) << tricky;
        const auto* v = node.find("k");
        ASSERT_NE(v, nullptr);
        EXPECT_EQ(v->scalar, tricky) << emitted;
        const bool needs_quoting = v->quoted || v->is_null();
        EXPECT_TRUE(needs_quoting || std::string(tricky) == emitted) << tricky;
    }
}
