#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "alurity/netplan/addressing.hpp"

namespace alurity::netplan {

enum class FilterAction { masquerade, drop_external };

std::string_view to_string(FilterAction action);

struct BridgeEntry {
    std::string name;
    std::string network;
    bool operator==(const BridgeEntry&) const = default;
};

/// Container interface pair plugged into a bridge.
struct VethPairEntry {
    std::string endpoint;
    std::string bridge;
    bool operator==(const VethPairEntry&) const = default;
};

/// VM tap device enslaved to a bridge.
struct TapAttachEntry {
    std::string endpoint;
    std::string bridge;
    bool operator==(const TapAttachEntry&) const = default;
};

struct RouteEntry {
    Ipv4Cidr subnet;
    Ipv4Address via;
    bool operator==(const RouteEntry&) const = default;
};

struct FilterRuleEntry {
    FilterAction action = FilterAction::masquerade;
    std::string network;
    bool operator==(const FilterRuleEntry&) const = default;
};

/// Carries flags the plan does not realize itself, such as overlay encryption.
struct MetadataEntry {
    std::string network;
    bool encryption = false;
    bool operator==(const MetadataEntry&) const = default;
};

using PlanEntry = std::variant<BridgeEntry, VethPairEntry, TapAttachEntry, RouteEntry, FilterRuleEntry, MetadataEntry>;

struct ConnectivityPlan {
    std::vector<PlanEntry> entries;

    template <typename Entry>
    std::vector<Entry> all() const {
        std::vector<Entry> out;
        for (const auto& e : entries) {
            if (const auto* typed = std::get_if<Entry>(&e)) {
                out.push_back(*typed);
            }
        }
        return out;
    }

    bool empty() const { return entries.empty(); }
    bool operator==(const ConnectivityPlan&) const = default;
};

std::string bridge_name(std::string_view network);

/// Entries come out as bridges, attachments, routes, filter rules, then metadata.
/// Throws PreconditionError if `assignment` does not cover the scenario.
ConnectivityPlan build_connectivity_plan(const Scenario& scenario, const AddressAssignment& assignment);

/// Canonical YAML entry list handed to backends.
std::string serialize_plan(const ConnectivityPlan& plan);
ConnectivityPlan parse_plan(std::string_view text);

/// True when both endpoints plug into at least one common bridge. Endpoints
/// attached to several networks do not forward between them.
bool reachable(const ConnectivityPlan& plan, const AddressAssignment& assignment, std::string_view a,
               std::string_view b);

enum class GraphFormat { dot };

class UnsupportedFormat : public std::runtime_error {
public:
    explicit UnsupportedFormat(const std::string& format)
        : std::runtime_error("unsupported graph format '" + format + "'") {}
};

/// Throws UnsupportedFormat for anything but `dot`.
GraphFormat parse_graph_format(std::string_view text);

std::string export_graph(const ConnectivityPlan& plan, const AddressAssignment& assignment, GraphFormat format);

} // namespace alurity::netplan
