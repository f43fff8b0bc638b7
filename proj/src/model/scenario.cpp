#include "alurity/model/scenario.hpp"

#include <algorithm>

namespace alurity {

std::string_view to_string(EndpointKind kind) {
    return kind == EndpointKind::container ? "container" : "vm";
}

std::optional<EndpointKind> parse_endpoint_kind(std::string_view text) {
    if (text == "container") {
        return EndpointKind::container;
    }
    if (text == "vm") {
        return EndpointKind::vm;
    }
    return std::nullopt;
}

std::string_view to_string(SplitDirection direction) {
    return direction == SplitDirection::horizontal ? "horizontal" : "vertical";
}

std::string_view to_string(Severity severity) {
    return severity == Severity::error ? "error" : "warning";
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::string format_diagnostic(const Diagnostic& d) {
    std::string out{to_string(d.severity)};
    out += ' ';
    out += d.code;
    out += ' ';
    out += d.location.empty() ? "-" : d.location;
    if (d.line) {
        out += ':' + std::to_string(*d.line);
    }
    out += ' ';
    out += d.message;
    return out;
}

std::optional<int> SourceInfo::line_of(const std::string& path) const {
    std::string key = path;
    while (!key.empty()) {
        if (auto it = lines.find(key); it != lines.end()) {
            return it->second;
        }
        const auto cut = key.find_last_of(".[");
        if (cut == std::string::npos) {
            break;
        }
        key.resize(cut);
    }
    return std::nullopt;
}

const NetworkSpec* Scenario::find_network(std::string_view name) const {
    auto it = std::find_if(networks.begin(), networks.end(), [&](const auto& n) { return n.name == name; });
    return it == networks.end() ? nullptr : &*it;
}

const ContainerSpec* Scenario::find_container(std::string_view name) const {
    auto it = std::find_if(containers.begin(), containers.end(), [&](const auto& c) { return c.name == name; });
    return it == containers.end() ? nullptr : &*it;
}

const VmSpec* Scenario::find_vm(std::string_view name) const {
    auto it = std::find_if(vms.begin(), vms.end(), [&](const auto& v) { return v.name == name; });
    return it == vms.end() ? nullptr : &*it;
}

const std::vector<std::string>* Scenario::networks_of(std::string_view endpoint) const {
    if (const auto* c = find_container(endpoint)) {
        return &c->networks;
    }
    if (const auto* v = find_vm(endpoint)) {
        return &v->networks;
    }
    return nullptr;
}

std::optional<Ipv4Address> Scenario::declared_ip(std::string_view endpoint) const {
    if (const auto* c = find_container(endpoint)) {
        return c->ip;
    }
    if (const auto* v = find_vm(endpoint)) {
        return v->ip;
    }
    return std::nullopt;
}

std::vector<EndpointRef> endpoints(const Scenario& scenario) {
    std::vector<EndpointRef> out;
    out.reserve(scenario.containers.size() + scenario.vms.size());
    for (const auto& c : scenario.containers) {
        out.push_back({c.name, EndpointKind::container});
    }
    for (const auto& v : scenario.vms) {
        out.push_back({v.name, EndpointKind::vm});
    }
    return out;
}

} // namespace alurity
