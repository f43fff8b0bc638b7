#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "alurity/orchestrator/backend.hpp"

namespace alurity::orchestrator {

/// Canned answer for commands matching a glob (`*` and `?`).
struct ScriptedResponse {
    std::string pattern;
    CommandResult result;

    bool operator==(const ScriptedResponse&) const = default;
};

/// Scripted responses for every endpoint (`global`) and per endpoint name.
/// Endpoint-specific responses are consulted first; the first match wins.
struct MockScript {
    std::vector<ScriptedResponse> global;
    std::map<std::string, std::vector<ScriptedResponse>> per_endpoint;

    bool operator==(const MockScript&) const = default;
};

/// Reads the fixture format:
///
///     responses:                     # any endpoint
///       "aztarna *": {exit: 0, stdout: "..."}
///     endpoints:
///       scanner:
///         "python3 *": {exit: 1, stderr: "..."}
MockScript parse_mock_script(std::string_view text);
MockScript load_mock_script(const std::string& path);

bool glob_match(std::string_view pattern, std::string_view text);

struct JournalEntry {
    enum class Kind { create, create_failed, destroy, destroy_failed, exec, apply_plan };

    Kind kind = Kind::exec;
    std::string endpoint;
    std::string detail;

    bool operator==(const JournalEntry&) const = default;
};

std::string_view to_string(JournalEntry::Kind kind);

/// Deterministic in-memory backend. Commands answer from a script, `sleep N`
/// advances a per-session logical clock by N seconds without waiting, and
/// every call lands in a journal.
class MockBackend final : public Backend {
public:
    MockBackend();
    explicit MockBackend(MockScript script);
    ~MockBackend() override;

    std::string name() const override { return "mock"; }
    EndpointHandle create_endpoint(const EndpointRequest& request) override;
    void destroy(const EndpointHandle& handle) override;
    CommandResult exec(const EndpointHandle& handle, const std::string& command, const Environment& env) override;
    void apply_plan(const netplan::ConnectivityPlan& plan) override;

    void add_response(std::string endpoint, ScriptedResponse response);
    void add_global_response(ScriptedResponse response);

    /// The `index`-th creation attempt (0-based, counting only attempts that
    /// reach the backend) fails.
    void fail_create_at(std::size_t index);
    void fail_destroy(std::string endpoint);
    void fail_apply_plan(bool fail = true);
    /// Refuse to host endpoints of `kind`.
    void refuse(EndpointKind kind);

    std::vector<JournalEntry> journal() const;
    /// Commands executed on `endpoint`, in arrival order.
    std::vector<std::string> exec_journal(std::string_view endpoint) const;
    std::vector<netplan::ConnectivityPlan> applied_plans() const;
    std::vector<EndpointRequest> requests() const;
    bool is_alive(std::string_view endpoint) const;

private:
    struct Endpoint;

    void record(JournalEntry entry);
    std::shared_ptr<Endpoint> lookup(const EndpointHandle& handle) const;
    CommandResult scripted(std::string_view endpoint, const std::string& command) const;

    mutable std::mutex mutex_;
    MockScript script_;
    std::map<std::string, std::shared_ptr<Endpoint>> endpoints_;
    std::vector<JournalEntry> journal_;
    std::vector<netplan::ConnectivityPlan> plans_;
    std::vector<EndpointRequest> requests_;
    std::set<std::size_t> failing_creates_;
    std::set<std::string> failing_destroys_;
    std::set<EndpointKind> refused_;
    bool fail_apply_plan_ = false;
    std::size_t create_attempts_ = 0;
    std::uint64_t next_id_ = 1;
};

/// Splits endpoints across two backends by kind, so containers and VMs can
/// live on different runtimes within one deployment.
class RoutingBackend final : public Backend {
public:
    RoutingBackend(Backend& containers, Backend& vms) : containers_(containers), vms_(vms) {}

    std::string name() const override { return containers_.name() + "+" + vms_.name(); }
    EndpointHandle create_endpoint(const EndpointRequest& request) override;
    void destroy(const EndpointHandle& handle) override;
    CommandResult exec(const EndpointHandle& handle, const std::string& command, const Environment& env) override;
    void apply_plan(const netplan::ConnectivityPlan& plan) override;

private:
    Backend& route(const EndpointHandle& handle);

    Backend& containers_;
    Backend& vms_;
    std::mutex mutex_;
    std::map<std::string, EndpointKind> kinds_;
};

} // namespace alurity::orchestrator
