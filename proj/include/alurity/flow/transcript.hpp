#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "alurity/flow/flow_plan.hpp"
#include "alurity/orchestrator/deployment.hpp"

namespace alurity::flow {

struct TranscriptEvent {
    std::uint64_t seq = 0;
    std::string endpoint;
    std::string window;
    std::size_t pane = 0;
    std::string command;
    orchestrator::CommandResult result;

    bool operator==(const TranscriptEvent&) const = default;
};

/// Ordered execution record of a flow run.
struct Transcript {
    std::vector<TranscriptEvent> events;

    bool operator==(const Transcript&) const = default;
};

struct RunOptions {
    /// Run pane sessions on their own threads. Sessions still start in plan order.
    bool concurrent = true;
    /// Treat every command as fail-fast.
    bool fail_fast = false;
};

/// A fail-fast command exited non-zero, or a session could not continue.
class FlowAborted : public std::runtime_error {
public:
    FlowAborted(std::size_t event_index, std::string reason, Transcript partial)
        : std::runtime_error("flow aborted at event " + std::to_string(event_index) + ": " + reason),
          event_index_(event_index), partial_(std::move(partial)) {}

    std::size_t event_index() const { return event_index_; }
    const Transcript& partial() const { return partial_; }

private:
    std::size_t event_index_;
    Transcript partial_;
};

/// Runs each pane as a sequential session on `deployment`. A failing command
/// does not stop its pane unless it is fail-fast.
///
/// Throws UnknownEndpoint or EndpointNotRunning before anything runs if the
/// plan names an endpoint the deployment cannot serve.
Transcript run_flow(orchestrator::Deployment& deployment, const FlowPlan& plan, const RunOptions& options = {});

/// True iff sequence numbers strictly increase and, for every pane of `plan`,
/// the transcript's commands for that pane equal the pane's command list.
bool verify_transcript(const FlowPlan& plan, const Transcript& transcript);

/// Commands per pane, keyed `endpoint/window/pane`, in transcript order.
std::vector<std::pair<std::string, std::vector<std::string>>> pane_projection(const Transcript& transcript);

std::string serialize_transcript(const Transcript& transcript);
Transcript parse_transcript(std::string_view text);

} // namespace alurity::flow
