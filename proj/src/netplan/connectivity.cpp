#include "alurity/netplan/connectivity.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "alurity/model/errors.hpp"
#include "alurity/parser/raw_node.hpp"

namespace alurity::netplan {

std::string_view to_string(FilterAction action) {
    return action == FilterAction::masquerade ? "masquerade" : "drop-external";
}

std::string bridge_name(std::string_view network) {
    return "br-" + std::string(network);
}

ConnectivityPlan build_connectivity_plan(const Scenario& scenario, const AddressAssignment& assignment) {
    for (const auto& ep : endpoints(scenario)) {
        for (const auto& net : *scenario.networks_of(ep.name)) {
            if (!assignment.address_of(ep.name, net)) {
                throw PreconditionError("assignment has no address for '" + ep.name + "' on '" + net + "'");
            }
        }
    }

    std::map<std::string, std::size_t> containers_on;
    std::map<std::string, std::size_t> vms_on;
    for (const auto& c : scenario.containers) {
        for (const auto& n : c.networks) {
            ++containers_on[n];
        }
    }
    for (const auto& v : scenario.vms) {
        for (const auto& n : v.networks) {
            ++vms_on[n];
        }
    }
    const auto used = [&](const std::string& n) { return containers_on[n] + vms_on[n] > 0; };

    ConnectivityPlan plan;
    for (const auto& net : scenario.networks) {
        if (used(net.name)) {
            plan.entries.emplace_back(BridgeEntry{bridge_name(net.name), net.name});
        }
    }
    for (const auto& c : scenario.containers) {
        for (const auto& n : c.networks) {
            plan.entries.emplace_back(VethPairEntry{c.name, bridge_name(n)});
        }
    }
    for (const auto& v : scenario.vms) {
        for (const auto& n : v.networks) {
            plan.entries.emplace_back(TapAttachEntry{v.name, bridge_name(n)});
        }
    }
    for (const auto& net : scenario.networks) {
        if (containers_on[net.name] > 0 && vms_on[net.name] > 0) {
            plan.entries.emplace_back(RouteEntry{Ipv4Cidr{net.subnet.network(), net.subnet.prefix()},
                                                 *assignment.gateway_of(net.name)});
        }
    }
    for (const auto& net : scenario.networks) {
        if (used(net.name)) {
            plan.entries.emplace_back(
                FilterRuleEntry{net.internal ? FilterAction::drop_external : FilterAction::masquerade, net.name});
        }
    }
    for (const auto& net : scenario.networks) {
        if (used(net.name) && net.encryption) {
            plan.entries.emplace_back(MetadataEntry{net.name, true});
        }
    }
    return plan;
}

std::string serialize_plan(const ConnectivityPlan& plan) {
    YAML::Emitter out;
    out << YAML::BeginMap << YAML::Key << "entries" << YAML::Value << YAML::BeginSeq;
    for (const auto& entry : plan.entries) {
        out << YAML::BeginMap;
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, BridgeEntry>) {
                    out << YAML::Key << "kind" << YAML::Value << "bridge";
                    out << YAML::Key << "name" << YAML::Value << e.name;
                    out << YAML::Key << "network" << YAML::Value << e.network;
                } else if constexpr (std::is_same_v<T, VethPairEntry>) {
                    out << YAML::Key << "kind" << YAML::Value << "veth-pair";
                    out << YAML::Key << "endpoint" << YAML::Value << e.endpoint;
                    out << YAML::Key << "bridge" << YAML::Value << e.bridge;
                } else if constexpr (std::is_same_v<T, TapAttachEntry>) {
                    out << YAML::Key << "kind" << YAML::Value << "tap-attach";
                    out << YAML::Key << "endpoint" << YAML::Value << e.endpoint;
                    out << YAML::Key << "bridge" << YAML::Value << e.bridge;
                } else if constexpr (std::is_same_v<T, RouteEntry>) {
                    out << YAML::Key << "kind" << YAML::Value << "route";
                    out << YAML::Key << "subnet" << YAML::Value << e.subnet.to_string();
                    out << YAML::Key << "via" << YAML::Value << e.via.to_string();
                } else if constexpr (std::is_same_v<T, FilterRuleEntry>) {
                    out << YAML::Key << "kind" << YAML::Value << "filter-rule";
                    out << YAML::Key << "action" << YAML::Value << std::string(to_string(e.action));
                    out << YAML::Key << "network" << YAML::Value << e.network;
                } else {
                    out << YAML::Key << "kind" << YAML::Value << "metadata";
                    out << YAML::Key << "network" << YAML::Value << e.network;
                    out << YAML::Key << "encryption" << YAML::Value << e.encryption;
                }
            },
            entry);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

namespace {

const std::string& field(const RawNode& node, std::string_view key) {
    const auto* value = node.find(key);
    if (value == nullptr || !value->is_scalar()) {
        throw ParseFailure("missing-key", "plan entry is missing '" + std::string(key) + "'", node.mark);
    }
    return value->scalar;
}

} // namespace

ConnectivityPlan parse_plan(std::string_view text) {
    const auto doc = load_document(text);
    const auto* entries = doc.find("entries");
    if (entries == nullptr || !entries->is_sequence()) {
        throw ParseFailure("malformed-plan", "plan must hold an 'entries' list", doc.mark);
    }
    ConnectivityPlan plan;
    for (const auto& item : entries->items) {
        const auto& kind = field(item, "kind");
        if (kind == "bridge") {
            plan.entries.emplace_back(BridgeEntry{field(item, "name"), field(item, "network")});
        } else if (kind == "veth-pair") {
            plan.entries.emplace_back(VethPairEntry{field(item, "endpoint"), field(item, "bridge")});
        } else if (kind == "tap-attach") {
            plan.entries.emplace_back(TapAttachEntry{field(item, "endpoint"), field(item, "bridge")});
        } else if (kind == "route") {
            auto subnet = Ipv4Cidr::parse(field(item, "subnet"));
            auto via = Ipv4Address::parse(field(item, "via"));
            if (!subnet || !via) {
                throw ParseFailure("malformed-plan", "route entry has an invalid subnet or gateway", item.mark);
            }
            plan.entries.emplace_back(RouteEntry{*subnet, *via});
        } else if (kind == "filter-rule") {
            const auto& action = field(item, "action");
            if (action != "masquerade" && action != "drop-external") {
                throw ParseFailure("malformed-plan", "unknown filter action '" + action + "'", item.mark);
            }
            plan.entries.emplace_back(FilterRuleEntry{
                action == "masquerade" ? FilterAction::masquerade : FilterAction::drop_external, field(item, "network")});
        } else if (kind == "metadata") {
            plan.entries.emplace_back(MetadataEntry{field(item, "network"), field(item, "encryption") == "true"});
        } else {
            throw ParseFailure("malformed-plan", "unknown plan entry kind '" + kind + "'", item.mark);
        }
    }
    return plan;
}

bool reachable(const ConnectivityPlan& plan, const AddressAssignment& assignment, std::string_view a,
               std::string_view b) {
    for (auto name : {a, b}) {
        if (!assignment.has_endpoint(name)) {
            throw UnknownEndpoint(std::string(name));
        }
    }
    if (a == b) {
        return true;
    }
    std::set<std::string> bridges_of_a;
    const auto bridge_of = [](const PlanEntry& e, std::string_view endpoint) -> const std::string* {
        if (const auto* veth = std::get_if<VethPairEntry>(&e); veth && veth->endpoint == endpoint) {
            return &veth->bridge;
        }
        if (const auto* tap = std::get_if<TapAttachEntry>(&e); tap && tap->endpoint == endpoint) {
            return &tap->bridge;
        }
        return nullptr;
    };
    for (const auto& e : plan.entries) {
        if (const auto* br = bridge_of(e, a)) {
            bridges_of_a.insert(*br);
        }
    }
    return std::any_of(plan.entries.begin(), plan.entries.end(), [&](const PlanEntry& e) {
        const auto* br = bridge_of(e, b);
        return br != nullptr && bridges_of_a.contains(*br);
    });
}

GraphFormat parse_graph_format(std::string_view text) {
    if (text == "dot") {
        return GraphFormat::dot;
    }
    throw UnsupportedFormat(std::string(text));
}

namespace {

std::string dot_id(std::string_view text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + '"';
}

} // namespace

std::string export_graph(const ConnectivityPlan& plan, const AddressAssignment& assignment, GraphFormat format) {
    if (format != GraphFormat::dot) {
        throw UnsupportedFormat("?");
    }
    std::set<std::string> bridged;
    for (const auto& bridge : plan.all<BridgeEntry>()) {
        bridged.insert(bridge.network);
    }

    std::ostringstream out;
    out << "digraph scenario {\n";
    out << "  rankdir=LR;\n";
    for (const auto& ep : assignment.endpoints) {
        std::string label = ep.name;
        for (const auto& a : assignment.attachments_of(ep.name)) {
            label += "\\n" + a.address.to_string();
        }
        out << "  " << dot_id("ep:" + ep.name) << " [shape=" << (ep.kind == EndpointKind::vm ? "box3d" : "box")
            << ", label=\"" << label << "\"];\n";
    }
    for (const auto& gw : assignment.gateways) {
        out << "  " << dot_id("net:" + gw.network) << " [shape=ellipse, label=\"" << gw.network << "\\n"
            << gw.subnet.to_string() << "\"" << (bridged.contains(gw.network) ? "" : ", style=dashed") << "];\n";
    }
    for (const auto& a : assignment.attachments) {
        out << "  " << dot_id("ep:" + a.endpoint) << " -> " << dot_id("net:" + a.network) << " [label=\""
            << a.address.to_string() << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace alurity::netplan
