#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alurity/model/flow_spec.hpp"
#include "alurity/model/scenario.hpp"

namespace alurity::flow {

struct Pane {
    std::vector<Command> commands;
    bool operator==(const Pane&) const = default;
};

struct WindowPlan {
    std::string name;
    std::vector<Pane> panes;
    bool operator==(const WindowPlan&) const = default;
};

struct EndpointPlan {
    std::string endpoint;
    EndpointKind kind = EndpointKind::container;
    std::vector<WindowPlan> windows;
    std::optional<std::string> focus;
    bool operator==(const EndpointPlan&) const = default;
};

struct FlowPlan {
    std::vector<EndpointPlan> endpoints;

    std::size_t command_count() const;
    std::size_t pane_count() const;
    const EndpointPlan* find(std::string_view endpoint) const;

    bool operator==(const FlowPlan&) const = default;
};

class UnknownEndpointInFlow : public std::runtime_error {
public:
    explicit UnknownEndpointInFlow(const std::string& name)
        : std::runtime_error("flow targets unknown endpoint '" + name + "'") {}
};

class UnknownSelectedWindow : public std::runtime_error {
public:
    UnknownSelectedWindow(const std::string& endpoint, const std::string& window)
        : std::runtime_error("flow for '" + endpoint + "' selects undeclared window '" + window + "'") {}
};

/// Every window starts with pane 0; each split opens a new pane and later
/// commands go to the newest pane.
FlowPlan compile_flow(const Flow& flow);

/// As above, additionally requiring every flow endpoint to exist in `scenario`.
FlowPlan compile_flow(const Flow& flow, const Scenario& scenario);

} // namespace alurity::flow
