#pragma once

#include <string>
#include <string_view>

#include "alurity/model/flow_spec.hpp"
#include "alurity/model/scenario.hpp"
#include "alurity/parser/raw_node.hpp"

namespace alurity {

/// Reads the scenario dialect, where each record is written as a sequence of
/// single-key maps. Throws ParseFailure on malformed input; unknown keys inside
/// a record are kept as warnings in `Scenario::source`.
Scenario parse_scenario(std::string_view text);
Scenario parse_scenario(const RawNode& document);

/// Writes `scenario` back in the same dialect with two-space indentation.
std::string serialize_scenario(const Scenario& scenario);

/// Reads a document whose top level holds a `flow:` section.
Flow parse_flow(std::string_view text);
Flow parse_flow(const RawNode& document);

/// `flow:` section only.
std::string serialize_flow(const Flow& flow);

/// Reads a whole file; throws ParseFailure with code `unreadable-file` on I/O failure.
std::string read_text_file(const std::string& path);

} // namespace alurity
