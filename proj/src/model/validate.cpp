#include "alurity/model/validate.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>
#include <span>
#include <string_view>
#include <unordered_map>

namespace alurity {

namespace {

constexpr std::array<std::string_view, 4> kSections{"networks", "containers", "vms", "flows"};

constexpr std::array<std::string_view, 16> kFieldOrder{
    "name", "driver",   "internal", "encryption",    "subnet",  "base",   "volumes", "path",
    "networks", "ip",   "cpus",     "memory", "extra-options", "windows", "select",  "commands"};

int rank_of(std::string_view token, std::span<const std::string_view> order, int fallback) {
    auto it = std::find(order.begin(), order.end(), token);
    return it == order.end() ? fallback : static_cast<int>(it - order.begin());
}

/// Sort key for a document path: section, index, field, index, field, ...
std::vector<int> position_key(std::string_view path) {
    std::vector<int> key;
    bool first = true;
    while (!path.empty()) {
        const auto cut = path.find_first_of(".[");
        auto token = path.substr(0, cut);
        if (!token.empty()) {
            key.push_back(first ? rank_of(token, kSections, 99) : rank_of(token, kFieldOrder, 99));
            first = false;
        }
        if (cut == std::string_view::npos) {
            break;
        }
        if (path[cut] == '[') {
            const auto close = path.find(']', cut);
            int index = 0;
            std::from_chars(path.data() + cut + 1, path.data() + close, index);
            key.push_back(index);
            path.remove_prefix(close == std::string_view::npos ? path.size() : close + 1);
        } else {
            path.remove_prefix(cut + 1);
        }
    }
    return key;
}

std::string indexed(std::string_view base, std::size_t index) {
    return std::string(base) + '[' + std::to_string(index) + ']';
}

class Collector {
public:
    void error(std::string code, std::string location, std::string message) {
        out_.push_back({Severity::error, std::move(code), std::move(message), std::move(location), std::nullopt});
    }
    void warning(std::string code, std::string location, std::string message) {
        out_.push_back({Severity::warning, std::move(code), std::move(message), std::move(location), std::nullopt});
    }
    std::vector<Diagnostic>& items() { return out_; }

private:
    std::vector<Diagnostic> out_;
};

void check_networks(const Scenario& s, Collector& out) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < s.networks.size(); ++i) {
        const auto& net = s.networks[i];
        const auto at = indexed("networks", i);
        if (!is_valid_identifier(net.name)) {
            out.error("invalid-name", at + ".name", "network name '" + net.name + "' is not a valid identifier");
        }
        if (!seen.insert(net.name).second) {
            out.error("duplicate-network", at + ".name", "network '" + net.name + "' is declared more than once");
        }
        if (net.driver != "overlay") {
            out.warning("unknown-driver", at + ".driver", "driver '" + net.driver + "' is not known; treated as overlay");
        }
        const int prefix = net.subnet.prefix();
        if (prefix < 8 || prefix > 30) {
            out.error("invalid-prefix", at + ".subnet",
                      "subnet " + net.subnet.to_string() + " prefix must be between /8 and /30");
        }
        if (net.subnet.has_host_bits()) {
            out.error("subnet-host-bits", at + ".subnet",
                      "subnet " + net.subnet.to_string() + " has host bits set (network is " +
                          net.subnet.network().to_string() + ")");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (s.networks[j].subnet.overlaps(net.subnet)) {
                out.error("overlapping-subnet", at + ".subnet",
                          "subnet " + net.subnet.to_string() + " overlaps " + s.networks[j].subnet.to_string() +
                              " of network '" + s.networks[j].name + "'");
                break;
            }
        }
    }
}

struct EndpointView {
    std::string at;
    const std::string* name;
    const std::vector<std::string>* networks;
    const std::optional<Ipv4Address>* ip;
    const std::optional<long long>* cpus;
    const std::optional<long long>* memory;
};

void check_endpoint(const Scenario& s, const EndpointView& ep, std::set<std::string>& names,
                    std::unordered_map<std::uint32_t, std::string>& ips, Collector& out) {
    const auto& name = *ep.name;
    if (!is_valid_identifier(name)) {
        out.error("invalid-name", ep.at + ".name", "endpoint name '" + name + "' is not a valid identifier");
    }
    if (!names.insert(name).second) {
        out.error("duplicate-endpoint", ep.at + ".name", "endpoint '" + name + "' is declared more than once");
    }

    if (ep.networks->empty()) {
        out.warning("no-network", ep.at + ".networks", "endpoint '" + name + "' is not attached to any network");
    }
    std::set<std::string> attached;
    for (std::size_t k = 0; k < ep.networks->size(); ++k) {
        const auto& net = (*ep.networks)[k];
        const auto at = ep.at + '.' + indexed("networks", k);
        if (!attached.insert(net).second) {
            out.error("duplicate-attachment", at, "endpoint '" + name + "' attaches to '" + net + "' twice");
        } else if (s.find_network(net) == nullptr) {
            out.error("network-not-found", at, "network '" + net + "' is not declared");
        }
    }

    if (ep.ip->has_value()) {
        const auto addr = **ep.ip;
        const auto at = ep.at + ".ip";
        const NetworkSpec* home = nullptr;
        for (const auto& net_name : *ep.networks) {
            const auto* net = s.find_network(net_name);
            if (net != nullptr && net->subnet.contains(addr)) {
                home = net;
                break;
            }
        }
        if (home == nullptr) {
            out.error("ip-outside-subnet", at,
                      addr.to_string() + " is not inside the subnet of any network '" + name + "' attaches to");
        } else if (addr == home->subnet.network() || addr == home->subnet.broadcast()) {
            out.error("ip-reserved", at,
                      addr.to_string() + " is the network or broadcast address of " + home->subnet.to_string());
        } else if (addr == home->subnet.first_host()) {
            out.error("ip-reserved", at, addr.to_string() + " is reserved as the gateway of '" + home->name + "'");
        }
        if (auto [it, fresh] = ips.emplace(addr.value(), name); !fresh) {
            out.error("duplicate-ip", at, addr.to_string() + " is already assigned to '" + it->second + "'");
        }
    }
    if (ep.cpus->has_value() && **ep.cpus <= 0) {
        out.error("invalid-cpus", ep.at + ".cpus", "cpus must be a positive integer");
    }
    if (ep.memory->has_value() && **ep.memory <= 0) {
        out.error("invalid-memory", ep.at + ".memory", "memory must be a positive number of MiB");
    }
}

void check_flows(const Scenario& s, Collector& out) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < s.flows.size(); ++i) {
        const auto& flow = s.flows[i];
        const auto at = indexed("flows", i);
        if (!seen.insert(flow.endpoint).second) {
            out.error("duplicate-flow-endpoint", at + ".name",
                      "flow for endpoint '" + flow.endpoint + "' is declared more than once");
        }
        if (s.networks_of(flow.endpoint) == nullptr) {
            out.error("flow-unknown-endpoint", at + ".name", "flow targets unknown endpoint '" + flow.endpoint + "'");
        } else if ((flow.kind == EndpointKind::vm) != (s.find_vm(flow.endpoint) != nullptr)) {
            out.warning("flow-kind-mismatch", at + ".name",
                        "flow declares '" + flow.endpoint + "' as " + std::string(to_string(flow.kind)));
        }
        std::set<std::string> windows;
        for (std::size_t j = 0; j < flow.windows.size(); ++j) {
            const auto& window = flow.windows[j];
            if (!windows.insert(window.name).second) {
                out.error("duplicate-window", at + '.' + indexed("windows", j) + ".name",
                          "window '" + window.name + "' is declared more than once");
            }
        }
        if (flow.selected_window && !windows.contains(*flow.selected_window)) {
            out.error("unknown-selected-window", at + ".select",
                      "selected window '" + *flow.selected_window + "' is not declared");
        }
    }
}

} // namespace

bool is_valid_identifier(std::string_view name) {
    if (name.empty() || name.size() > 63) {
        return false;
    }
    const auto alnum = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    };
    if (!alnum(name.front())) {
        return false;
    }
    return std::all_of(name.begin(), name.end(),
                       [&](char c) { return alnum(c) || c == '-' || c == '_' || c == '.'; });
}

std::vector<Diagnostic> validate(const Scenario& scenario) {
    Collector out;
    check_networks(scenario, out);

    std::set<std::string> names;
    std::unordered_map<std::uint32_t, std::string> ips;
    for (std::size_t i = 0; i < scenario.containers.size(); ++i) {
        const auto& c = scenario.containers[i];
        EndpointView view{indexed("containers", i), &c.name, &c.networks, &c.ip, &c.cpus, &c.memory};
        if (c.base.path.empty()) {
            out.error("missing-base", view.at + ".base", "container '" + c.name + "' has no base module");
        }
        check_endpoint(scenario, view, names, ips, out);
    }
    for (std::size_t i = 0; i < scenario.vms.size(); ++i) {
        const auto& v = scenario.vms[i];
        EndpointView view{indexed("vms", i), &v.name, &v.networks, &v.ip, &v.cpus, &v.memory};
        if (v.path.empty()) {
            out.error("missing-path", view.at + ".path", "vm '" + v.name + "' has no image path");
        }
        check_endpoint(scenario, view, names, ips, out);
    }
    check_flows(scenario, out);

    auto& items = out.items();
    items.insert(items.end(), scenario.source.warnings.begin(), scenario.source.warnings.end());
    for (auto& d : items) {
        if (!d.line) {
            d.line = scenario.source.line_of(d.location);
        }
    }
    std::stable_sort(items.begin(), items.end(), [](const Diagnostic& a, const Diagnostic& b) {
        const auto ka = position_key(a.location);
        const auto kb = position_key(b.location);
        if (ka != kb) {
            return ka < kb;
        }
        return a.code < b.code;
    });
    return items;
}

} // namespace alurity
