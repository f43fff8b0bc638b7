#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alurity/model/diagnostic.hpp"
#include "alurity/model/endpoint.hpp"
#include "alurity/model/flow_spec.hpp"
#include "alurity/model/ipv4.hpp"
#include "alurity/model/module_ref.hpp"

namespace alurity {

struct NetworkSpec {
    std::string name;
    std::string driver = "overlay";
    bool internal = false;
    bool encryption = false;
    Ipv4Cidr subnet;

    bool operator==(const NetworkSpec&) const = default;
};

struct ContainerSpec {
    std::string name;
    ModuleRef base;
    std::vector<ModuleRef> volumes;
    std::vector<std::string> networks;
    std::optional<Ipv4Address> ip;
    std::optional<long long> cpus;
    /// MiB.
    std::optional<long long> memory;
    /// Passed through to backends untouched.
    std::optional<std::string> extra_options;

    bool operator==(const ContainerSpec&) const = default;
};

struct VmSpec {
    std::string name;
    /// Image directory. `$(pwd)` is kept verbatim until orchestration.
    std::string path;
    std::vector<std::string> networks;
    std::optional<Ipv4Address> ip;
    std::optional<long long> cpus;
    std::optional<long long> memory;

    bool operator==(const VmSpec&) const = default;
};

/// Where parsed values came from. Never part of value equality.
struct SourceInfo {
    /// Document path (e.g. `containers[1].ip`) to 1-based source line.
    std::map<std::string, int> lines;
    /// Non-fatal findings raised while reading the document.
    std::vector<Diagnostic> warnings;

    std::optional<int> line_of(const std::string& path) const;

    friend bool operator==(const SourceInfo&, const SourceInfo&) { return true; }
};

struct Scenario {
    std::vector<NetworkSpec> networks;
    std::vector<ContainerSpec> containers;
    std::vector<VmSpec> vms;
    Flow flows;
    SourceInfo source;

    const NetworkSpec* find_network(std::string_view name) const;
    const ContainerSpec* find_container(std::string_view name) const;
    const VmSpec* find_vm(std::string_view name) const;
    /// Networks an endpoint attaches to, or nullptr for an unknown endpoint.
    const std::vector<std::string>* networks_of(std::string_view endpoint) const;
    std::optional<Ipv4Address> declared_ip(std::string_view endpoint) const;

    bool operator==(const Scenario&) const = default;
};

/// Containers in document order, then VMs in document order.
std::vector<EndpointRef> endpoints(const Scenario& scenario);

} // namespace alurity
