#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "alurity/model/endpoint.hpp"

namespace alurity {

struct Command {
    std::string text;
    /// When set, a non-zero exit aborts the flow instead of continuing the pane.
    bool fail_fast = false;

    bool operator==(const Command&) const = default;
};

enum class SplitDirection { horizontal, vertical };

std::string_view to_string(SplitDirection direction);

struct Split {
    SplitDirection direction = SplitDirection::horizontal;

    bool operator==(const Split&) const = default;
};

using WindowItem = std::variant<Command, Split>;

struct WindowSpec {
    std::string name;
    std::vector<WindowItem> items;

    bool operator==(const WindowSpec&) const = default;
};

/// The scripted windows for one endpoint of a flow.
struct FlowSpec {
    std::string endpoint;
    EndpointKind kind = EndpointKind::container;
    std::vector<WindowSpec> windows;
    std::optional<std::string> selected_window;

    bool operator==(const FlowSpec&) const = default;
};

/// A complete flow document: one entry per scripted endpoint.
using Flow = std::vector<FlowSpec>;

} // namespace alurity
