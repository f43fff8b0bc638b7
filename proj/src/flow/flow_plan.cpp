#include "alurity/flow/flow_plan.hpp"

#include <algorithm>

namespace alurity::flow {

std::size_t FlowPlan::command_count() const {
    std::size_t n = 0;
    for (const auto& ep : endpoints) {
        for (const auto& w : ep.windows) {
            for (const auto& p : w.panes) {
                n += p.commands.size();
            }
        }
    }
    return n;
}

std::size_t FlowPlan::pane_count() const {
    std::size_t n = 0;
    for (const auto& ep : endpoints) {
        for (const auto& w : ep.windows) {
            n += w.panes.size();
        }
    }
    return n;
}

const EndpointPlan* FlowPlan::find(std::string_view endpoint) const {
    auto it = std::find_if(endpoints.begin(), endpoints.end(),
                           [&](const EndpointPlan& ep) { return ep.endpoint == endpoint; });
    return it == endpoints.end() ? nullptr : &*it;
}

FlowPlan compile_flow(const Flow& flow) {
    FlowPlan plan;
    for (const auto& spec : flow) {
        EndpointPlan ep{spec.endpoint, spec.kind, {}, spec.selected_window};
        for (const auto& window : spec.windows) {
            WindowPlan wp{window.name, {Pane{}}};
            for (const auto& item : window.items) {
                if (const auto* cmd = std::get_if<Command>(&item)) {
                    wp.panes.back().commands.push_back(*cmd);
                } else {
                    wp.panes.emplace_back();
                }
            }
            ep.windows.push_back(std::move(wp));
        }
        if (ep.focus) {
            const auto& windows = ep.windows;
            if (std::none_of(windows.begin(), windows.end(),
                             [&](const WindowPlan& w) { return w.name == *ep.focus; })) {
                throw UnknownSelectedWindow(ep.endpoint, *ep.focus);
            }
        }
        plan.endpoints.push_back(std::move(ep));
    }
    return plan;
}

FlowPlan compile_flow(const Flow& flow, const Scenario& scenario) {
    for (const auto& spec : flow) {
        if (scenario.networks_of(spec.endpoint) == nullptr) {
            throw UnknownEndpointInFlow(spec.endpoint);
        }
    }
    return compile_flow(flow);
}

} // namespace alurity::flow
