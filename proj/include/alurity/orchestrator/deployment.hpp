#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alurity/model/scenario.hpp"
#include "alurity/netplan/addressing.hpp"
#include "alurity/netplan/connectivity.hpp"
#include "alurity/orchestrator/backend.hpp"
#include "alurity/toolreg/registry.hpp"

namespace alurity::orchestrator {

enum class EndpointState { created, running, stopped, failed };

std::string_view to_string(EndpointState state);

struct Event {
    std::uint64_t seq = 0;
    /// create, create-failed, apply-plan, apply-plan-failed, run, exec, destroy, destroy-failed
    std::string kind;
    std::string endpoint;
    std::string detail;

    bool operator==(const Event&) const = default;
};

class DeploymentFailure : public std::runtime_error {
public:
    DeploymentFailure(std::optional<std::string> endpoint, std::string cause, std::vector<Event> events);

    const std::optional<std::string>& failed_endpoint() const { return endpoint_; }
    const std::string& cause() const { return cause_; }
    const std::vector<Event>& events() const { return events_; }

private:
    std::optional<std::string> endpoint_;
    std::string cause_;
    std::vector<Event> events_;
};

class EndpointNotRunning : public std::runtime_error {
public:
    EndpointNotRunning(const std::string& name, EndpointState state)
        : std::runtime_error("endpoint '" + name + "' is " + std::string(to_string(state))) {}
};

/// A scenario brought up on a backend. The backend must outlive the deployment.
class Deployment {
public:
    const Scenario& scenario() const { return scenario_; }
    const netplan::AddressAssignment& assignment() const { return assignment_; }
    const netplan::ConnectivityPlan& plan() const { return plan_; }
    Backend& backend() const { return *backend_; }

    std::optional<EndpointState> state(std::string_view endpoint) const;
    /// Endpoints in creation order with their current state.
    std::vector<std::pair<std::string, EndpointState>> states() const;
    std::vector<Event> events() const;

private:
    friend Deployment up(const Scenario&, Backend&, const toolreg::RegistryIndex&, const struct UpOptions&);
    friend CommandResult exec(Deployment&, std::string_view, const std::string&, const Environment&);
    friend void down(Deployment&);

    struct Slot {
        std::string name;
        EndpointHandle handle;
        EndpointState state = EndpointState::created;
        bool torn_down = false;
    };

    Deployment(Scenario scenario, Backend& backend) : scenario_(std::move(scenario)), backend_(&backend) {}

    void log(std::string kind, std::string endpoint, std::string detail);
    Slot* slot(std::string_view name);

    Scenario scenario_;
    Backend* backend_;
    netplan::AddressAssignment assignment_;
    netplan::ConnectivityPlan plan_;
    std::vector<Slot> slots_;
    std::vector<Event> events_;
    std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

struct UpOptions {
    /// Replaces `$(pwd)` in VM paths.
    std::filesystem::path working_dir = std::filesystem::current_path();
};

/// Creates every endpoint, then applies the connectivity plan, then marks
/// endpoints running. All-or-nothing: on failure every endpoint created so far
/// is destroyed again and DeploymentFailure carries the event log.
Deployment up(const Scenario& scenario, Backend& backend, const toolreg::RegistryIndex& registry,
              const UpOptions& options = {});

/// Runs `command` on a running endpoint and returns the backend's result as is.
/// Throws UnknownEndpoint or EndpointNotRunning.
CommandResult exec(Deployment& deployment, std::string_view endpoint, const std::string& command,
                   const Environment& env = {});

/// Destroys endpoints in reverse creation order. Idempotent; a failed destroy
/// is logged and teardown carries on.
void down(Deployment& deployment);

std::string expand_working_dir(std::string_view path, const std::filesystem::path& working_dir);

} // namespace alurity::orchestrator
