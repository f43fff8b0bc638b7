#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace alurity::pipeline {

/// One flaw in the robot vulnerability taxonomy, with everything needed to
/// reproduce it.
struct FlawRecord {
    std::optional<long long> id;
    std::string title;
    std::string flaw_class;
    std::string description;
    /// Target module reference.
    std::string system;
    std::optional<std::string> vendor;
    std::string severity = "medium";
    /// Tool module reference.
    std::string detected_by;
    std::string scenario_yaml;
    std::string flow_yaml;
    /// Top-level keys this version does not know, kept as YAML text in document order.
    std::vector<std::pair<std::string, std::string>> extra;

    bool operator==(const FlawRecord&) const = default;
};

class RecordError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problems that make a record unfit to emit; empty when valid.
std::vector<std::string> record_problems(const FlawRecord& record);

std::string serialize_record(const FlawRecord& record);
/// Throws RecordError on malformed YAML or missing keys.
FlawRecord parse_record(std::string_view text);

/// 16 lowercase hex digits of the 64-bit FNV-1a hash of `text`.
std::string fnv1a_hex(std::string_view text);

} // namespace alurity::pipeline
