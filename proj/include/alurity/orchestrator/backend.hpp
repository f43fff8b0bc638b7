#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alurity/model/endpoint.hpp"
#include "alurity/netplan/addressing.hpp"
#include "alurity/netplan/connectivity.hpp"
#include "alurity/toolreg/registry.hpp"

namespace alurity::orchestrator {

struct CommandResult {
    int exit_code = 0;
    std::string stdout_text;
    std::string stderr_text;
    /// Logical timestamps; `ended_at >= started_at`.
    std::uint64_t started_at = 0;
    std::uint64_t ended_at = 0;

    bool operator==(const CommandResult&) const = default;
};

using Environment = std::map<std::string, std::string>;

/// Environment key naming the pane session a command belongs to.
inline constexpr const char* kSessionVariable = "ALURITY_SESSION";

/// Everything a backend needs to bring one endpoint to life.
struct EndpointRequest {
    std::string name;
    EndpointKind kind = EndpointKind::container;
    /// Set for containers.
    std::optional<toolreg::ComposedImage> image;
    /// Set for VMs, with `$(pwd)` already expanded.
    std::string vm_path;
    std::vector<netplan::Attachment> addresses;
    std::optional<long long> cpus;
    std::optional<long long> memory;
    std::optional<std::string> extra_options;
};

struct EndpointHandle {
    std::string name;
    std::uint64_t id = 0;

    bool operator==(const EndpointHandle&) const = default;
};

/// exec on an endpoint that has been destroyed.
class EndpointGone : public std::runtime_error {
public:
    explicit EndpointGone(const std::string& name) : std::runtime_error("endpoint '" + name + "' is gone") {}
};

/// Any backend-side failure, including refusing an endpoint kind.
class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lifecycle and command execution for one runtime.
///
/// `create_endpoint` and `destroy` are idempotent per endpoint name. Backends
/// serialize state changes per endpoint but must accept concurrent `exec`
/// calls on distinct endpoints.
class Backend {
public:
    virtual ~Backend() = default;

    virtual std::string name() const = 0;
    virtual EndpointHandle create_endpoint(const EndpointRequest& request) = 0;
    virtual void destroy(const EndpointHandle& handle) = 0;
    virtual CommandResult exec(const EndpointHandle& handle, const std::string& command, const Environment& env) = 0;
    virtual void apply_plan(const netplan::ConnectivityPlan& plan) = 0;
};

} // namespace alurity::orchestrator
