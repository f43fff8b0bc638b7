#include "alurity/pipeline/flaw_record.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>

#include <yaml-cpp/yaml.h>

namespace alurity::pipeline {

namespace {

const std::array<std::string_view, 5> kSeverities{"none", "low", "medium", "high", "critical"};
const std::array<std::string_view, 9> kKeys{"id",       "title",    "flaw-class",  "description", "system",
                                            "vendor",   "severity", "detected-by", "reproduction"};

void emit_text(YAML::Emitter& out, const std::string& text) {
    YAML::Emitter probe;
    probe << YAML::BeginMap << YAML::Key << "v" << YAML::Value << YAML::Literal << text << YAML::Key << "w"
          << YAML::Value << 0 << YAML::EndMap;
    bool literal_ok = probe.good() && !text.empty() && text.front() != ' ';
    if (literal_ok) {
        try {
            literal_ok = YAML::Load(probe.c_str())["v"].as<std::string>() == text;
        } catch (const YAML::Exception&) {
            literal_ok = false;
        }
    }
    if (literal_ok) {
        out << YAML::Literal << text;
    } else {
        out << YAML::DoubleQuoted << text;
    }
}

std::string text_at(const YAML::Node& map, const char* key, bool required) {
    const auto node = map[key];
    if (!node || node.IsNull()) {
        if (required) {
            throw RecordError(std::string("flaw record is missing '") + key + "'");
        }
        return {};
    }
    if (!node.IsScalar()) {
        throw RecordError(std::string("flaw record field '") + key + "' must be text");
    }
    return node.Scalar();
}

} // namespace

std::vector<std::string> record_problems(const FlawRecord& record) {
    std::vector<std::string> problems;
    const auto need = [&](const std::string& value, const char* key) {
        if (value.empty()) {
            problems.push_back(std::string(key) + " is empty");
        }
    };
    need(record.title, "title");
    need(record.flaw_class, "flaw-class");
    need(record.system, "system");
    need(record.detected_by, "detected-by");
    need(record.scenario_yaml, "reproduction.scenario");
    need(record.flow_yaml, "reproduction.flow");
    if (std::find(kSeverities.begin(), kSeverities.end(), record.severity) == kSeverities.end()) {
        problems.push_back("severity '" + record.severity + "' is not one of none, low, medium, high, critical");
    }
    if (record.id && *record.id <= 0) {
        problems.push_back("id must be positive");
    }
    return problems;
}

std::string serialize_record(const FlawRecord& record) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value;
    if (record.id) {
        out << *record.id;
    } else {
        out << YAML::Null;
    }
    out << YAML::Key << "title" << YAML::Value << YAML::DoubleQuoted << record.title;
    out << YAML::Key << "flaw-class" << YAML::Value << YAML::DoubleQuoted << record.flaw_class;
    out << YAML::Key << "description" << YAML::Value;
    emit_text(out, record.description);
    out << YAML::Key << "system" << YAML::Value << YAML::DoubleQuoted << record.system;
    out << YAML::Key << "vendor" << YAML::Value;
    if (record.vendor) {
        out << YAML::DoubleQuoted << *record.vendor;
    } else {
        out << YAML::Null;
    }
    out << YAML::Key << "severity" << YAML::Value << record.severity;
    out << YAML::Key << "detected-by" << YAML::Value << YAML::DoubleQuoted << record.detected_by;
    out << YAML::Key << "reproduction" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "scenario" << YAML::Value;
    emit_text(out, record.scenario_yaml);
    out << YAML::Key << "flow" << YAML::Value;
    emit_text(out, record.flow_yaml);
    out << YAML::EndMap;
    for (const auto& [key, yaml] : record.extra) {
        out << YAML::Key << key << YAML::Value << YAML::Load(yaml);
    }
    out << YAML::EndMap;
    if (!out.good()) {
        throw RecordError("cannot serialize flaw record: " + out.GetLastError());
    }
    return std::string(out.c_str()) + "\n";
}

FlawRecord parse_record(std::string_view text) {
    YAML::Node doc;
    try {
        doc = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw RecordError(std::string("flaw record is not valid YAML: ") + e.what());
    }
    if (!doc.IsMap()) {
        throw RecordError("flaw record must be a mapping");
    }
    FlawRecord record;
    try {
        if (const auto id = doc["id"]; id && !id.IsNull()) {
            record.id = id.as<long long>();
        }
    } catch (const YAML::Exception&) {
        throw RecordError("flaw record id must be an integer");
    }
    record.title = text_at(doc, "title", true);
    record.flaw_class = text_at(doc, "flaw-class", true);
    record.description = text_at(doc, "description", false);
    record.system = text_at(doc, "system", true);
    if (const auto vendor = doc["vendor"]; vendor && !vendor.IsNull()) {
        record.vendor = text_at(doc, "vendor", false);
    }
    record.severity = text_at(doc, "severity", true);
    record.detected_by = text_at(doc, "detected-by", true);
    const auto reproduction = doc["reproduction"];
    if (!reproduction || !reproduction.IsMap()) {
        throw RecordError("flaw record is missing 'reproduction'");
    }
    record.scenario_yaml = text_at(reproduction, "scenario", true);
    record.flow_yaml = text_at(reproduction, "flow", false);
    for (const auto& entry : doc) {
        const auto key = entry.first.as<std::string>();
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
            YAML::Emitter out;
            out << entry.second;
            record.extra.emplace_back(key, out.c_str());
        }
    }
    return record;
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t hash = 14695981039346656037ull;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

} // namespace alurity::pipeline
