#include "alurity/pipeline/pipeline.hpp"

#include <fstream>
#include <regex>
#include <sstream>
#include <system_error>

#include "alurity/flow/flow_plan.hpp"
#include "alurity/netplan/addressing.hpp"
#include "alurity/orchestrator/deployment.hpp"
#include "alurity/parser/scenario_parser.hpp"
#include "alurity/rvd/client.hpp"

namespace alurity::pipeline {

namespace {

bool pipeline_group(ModuleGroup group) {
    return group == ModuleGroup::reconnaissance || group == ModuleGroup::testing ||
           group == ModuleGroup::exploitation;
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
    for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
        text.replace(pos, from.size(), to);
    }
    return text;
}

std::string render(const std::string& tmpl, const std::map<std::string, std::string>& vars) {
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const auto open = tmpl.find('{', pos);
        const auto close = open == std::string::npos ? std::string::npos : tmpl.find('}', open);
        if (close == std::string::npos) {
            out.append(tmpl, pos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        const auto key = tmpl.substr(open + 1, close - open - 1);
        if (auto it = vars.find(key); it != vars.end()) {
            out += it->second;
        } else {
            out.append(tmpl, open, close - open + 1);
        }
        pos = close + 1;
    }
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

const toolreg::ExtractionRule& rule_of(const toolreg::ModuleManifest& manifest, const std::string& id) {
    for (const auto& rule : manifest.rules) {
        if (rule.id == id) {
            return rule;
        }
    }
    throw std::invalid_argument("no extraction rule '" + id + "'");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

} // namespace

Assembly assemble(const PipelineSpec& spec, const toolreg::RegistryIndex& registry) {
    if (spec.tools.empty()) {
        throw ValidationFailure("empty-toolchain", "a pipeline needs at least one tool");
    }
    registry.lookup(spec.target);
    std::vector<toolreg::ModuleManifest> manifests;
    for (const auto& tool : spec.tools) {
        manifests.push_back(registry.lookup(tool));
        if (!pipeline_group(manifests.back().group)) {
            throw ValidationFailure("tool-group", "tool '" + tool.to_string() + "' is in group '" +
                                                      std::string(to_string(manifests.back().group)) +
                                                      "', expected reconnaissance, testing or exploitation");
        }
    }

    Assembly assembly;
    auto& s = assembly.scenario;
    s.networks.push_back({.name = kNetworkName, .internal = true, .subnet = *Ipv4Cidr::parse("10.13.0.0/24")});
    s.containers.push_back({.name = kTargetName, .base = spec.target, .networks = {kNetworkName}});
    s.containers.push_back({.name = kScannerName,
                            .base = spec.tools.front(),
                            .volumes = {spec.tools.begin() + 1, spec.tools.end()},
                            .networks = {kNetworkName}});
    assembly.target_address = *netplan::allocate_addresses(s).address_of(kTargetName, kNetworkName);
    const auto address = assembly.target_address.to_string();

    WindowSpec window{.name = kWindowName};
    for (std::size_t i = 0; i < spec.tools.size(); ++i) {
        auto command = manifests[i].entrypoint.empty() ? toolreg::default_tool_name(spec.tools[i])
                                                       : manifests[i].entrypoint;
        if (command.find("{target}") != std::string::npos) {
            command = replace_all(command, "{target}", address);
        } else {
            command += " " + address;
        }
        window.items.emplace_back(Command{command, false});
        assembly.invocations.push_back({spec.tools[i], command});
    }
    assembly.flow.push_back({.endpoint = kScannerName,
                             .kind = EndpointKind::container,
                             .windows = {window},
                             .selected_window = kWindowName});
    return assembly;
}

std::vector<Finding> extract_findings(const Assembly& assembly, const flow::Transcript& transcript,
                                      const toolreg::RegistryIndex& registry) {
    std::vector<Finding> findings;
    std::size_t index = 0;
    for (const auto& event : transcript.events) {
        if (event.endpoint != kScannerName || event.window != kWindowName) {
            continue;
        }
        if (index >= assembly.invocations.size()) {
            break;
        }
        const auto& tool = assembly.invocations[index++].tool;
        const auto manifest = registry.lookup(tool);
        std::vector<std::regex> patterns;
        for (const auto& rule : manifest.rules) {
            patterns.emplace_back(rule.pattern);
        }
        for (const auto& line : lines_of(event.result.stdout_text)) {
            for (std::size_t r = 0; r < manifest.rules.size(); ++r) {
                std::smatch match;
                if (!std::regex_search(line, match, patterns[r])) {
                    continue;
                }
                Finding finding{tool, manifest.rules[r].id, line, {}};
                for (std::size_t f = 0; f < manifest.rules[r].fields.size(); ++f) {
                    finding.fields[manifest.rules[r].fields[f]] = match[f + 1].str();
                }
                findings.push_back(std::move(finding));
                break;
            }
        }
    }
    return findings;
}

FlawRecord make_record(const Assembly& assembly, const Finding& finding, const toolreg::RegistryIndex& registry) {
    const auto rule = rule_of(registry.lookup(finding.tool), finding.rule_id);
    auto vars = finding.fields;
    vars["line"] = finding.line;
    vars["tool"] = toolreg::default_tool_name(finding.tool);
    vars["target"] = assembly.target_address.to_string();

    FlawRecord record;
    record.title = render(rule.title, vars);
    record.flaw_class = rule.flaw_class;
    record.description = rule.description.empty() ? vars["tool"] + " reported: " + finding.line
                                                  : render(rule.description, vars);
    record.system = assembly.scenario.containers.front().base.to_string();
    if (rule.vendor) {
        record.vendor = render(*rule.vendor, vars);
    }
    record.severity = rule.severity;
    record.detected_by = finding.tool.to_string();
    record.scenario_yaml = serialize_scenario(assembly.scenario);
    record.flow_yaml = serialize_flow(assembly.flow);
    return record;
}

PipelineResult run_pipeline(const PipelineSpec& spec, orchestrator::Backend& backend,
                            const toolreg::RegistryIndex& registry) {
    PipelineResult result{assemble(spec, registry), {}, {}, {}};
    auto deployment = orchestrator::up(result.assembly.scenario, backend, registry);
    try {
        const auto plan = flow::compile_flow(result.assembly.flow, result.assembly.scenario);
        result.transcript = flow::run_flow(deployment, plan);
    } catch (const std::exception& e) {
        orchestrator::down(deployment);
        throw orchestrator::DeploymentFailure(std::string(kScannerName), e.what(), deployment.events());
    }
    orchestrator::down(deployment);
    result.findings = extract_findings(result.assembly, result.transcript, registry);
    for (const auto& finding : result.findings) {
        result.records.push_back(make_record(result.assembly, finding, registry));
    }
    return result;
}

std::string DirectorySink::emit(const FlawRecord& record) {
    if (const auto problems = record_problems(record); !problems.empty()) {
        throw RecordError("flaw record is not valid: " + problems.front());
    }
    std::error_code ec;
    std::filesystem::create_directories(directory_, ec);
    if (ec) {
        throw SinkUnavailable("cannot create " + directory_.string() + ": " + ec.message(), {record});
    }
    const auto stem = "rvd-" + fnv1a_hex(record.title);
    std::filesystem::path path;
    for (int n = 1;; ++n) {
        path = directory_ / (n == 1 ? stem + ".yaml" : stem + "-" + std::to_string(n) + ".yaml");
        if (!std::filesystem::exists(path, ec)) {
            break;
        }
        try {
            if (parse_record(read_file(path)) == record) {
                break;
            }
        } catch (const RecordError&) {
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << serialize_record(record);
    out.close();
    if (!out) {
        throw SinkUnavailable("cannot write " + path.string(), {record});
    }
    return path.string();
}

std::string TrackerSink::emit(const FlawRecord& record) {
    try {
        return std::to_string(rvd::push_issue(base_url_, record));
    } catch (const rvd::TransportError& e) {
        throw SinkUnavailable(e.what(), {record});
    } catch (const rvd::Rejected& e) {
        throw SinkUnavailable(e.what(), {record});
    }
}

std::vector<std::string> emit_all(const std::vector<FlawRecord>& records, Sink& sink) {
    std::vector<std::string> locations;
    for (std::size_t i = 0; i < records.size(); ++i) {
        try {
            locations.push_back(sink.emit(records[i]));
        } catch (const SinkUnavailable& e) {
            throw SinkUnavailable(e.what(), {records.begin() + static_cast<std::ptrdiff_t>(i), records.end()});
        }
    }
    return locations;
}

} // namespace alurity::pipeline
