#include "alurity/orchestrator/mock_backend.hpp"

#include <charconv>
#include <cmath>
#include <regex>

#include "alurity/parser/raw_node.hpp"
#include "alurity/parser/scenario_parser.hpp"

namespace alurity::orchestrator {

struct MockBackend::Endpoint {
    EndpointHandle handle;
    bool alive = true;
    std::mutex mutex;
    std::vector<std::string> commands;
    /// Logical milliseconds per session.
    std::map<std::string, std::uint64_t> clocks;
};

namespace {

std::vector<ScriptedResponse> read_responses(const RawNode& node) {
    std::vector<ScriptedResponse> out;
    if (node.is_null()) {
        return out;
    }
    if (!node.is_mapping()) {
        throw ParseFailure("malformed-script", "responses must map command patterns to results", node.mark);
    }
    for (const auto& [pattern, body] : node.entries) {
        ScriptedResponse response;
        response.pattern = pattern.scalar;
        if (!body.is_null() && !body.is_mapping()) {
            throw ParseFailure("malformed-script", "response for '" + pattern.scalar + "' must be a mapping",
                               body.mark);
        }
        if (const auto* exit = body.find("exit")) {
            int code = 0;
            auto [next, ec] = std::from_chars(exit->scalar.data(), exit->scalar.data() + exit->scalar.size(), code);
            if (!exit->is_scalar() || ec != std::errc{} || next != exit->scalar.data() + exit->scalar.size()) {
                throw ParseFailure("malformed-script", "exit must be an integer", exit->mark);
            }
            response.result.exit_code = code;
        }
        if (const auto* text = body.find("stdout"); text != nullptr && text->is_scalar()) {
            response.result.stdout_text = text->scalar;
        }
        if (const auto* text = body.find("stderr"); text != nullptr && text->is_scalar()) {
            response.result.stderr_text = text->scalar;
        }
        out.push_back(std::move(response));
    }
    return out;
}

/// Logical duration of `sleep N` in milliseconds, if `command` is one.
std::optional<std::uint64_t> sleep_duration(const std::string& command) {
    static const std::regex sleep_re{R"(^\s*sleep\s+([0-9]+(\.[0-9]+)?)\s*$)"};
    std::smatch m;
    if (!std::regex_match(command, m, sleep_re)) {
        return std::nullopt;
    }
    return static_cast<std::uint64_t>(std::llround(std::stod(m[1].str()) * 1000.0));
}

} // namespace

MockScript parse_mock_script(std::string_view text) {
    const auto doc = load_document(text);
    MockScript script;
    if (doc.is_null()) {
        return script;
    }
    if (!doc.is_mapping()) {
        throw ParseFailure("malformed-script", "mock script must be a mapping", doc.mark);
    }
    for (const auto& [key, value] : doc.entries) {
        if (key.scalar == "responses") {
            script.global = read_responses(value);
        } else if (key.scalar == "endpoints") {
            if (!value.is_mapping()) {
                throw ParseFailure("malformed-script", "endpoints must map names to responses", value.mark);
            }
            for (const auto& [name, responses] : value.entries) {
                script.per_endpoint[name.scalar] = read_responses(responses);
            }
        } else {
            throw ParseFailure("malformed-script", "unknown key '" + key.scalar + "'", key.mark);
        }
    }
    return script;
}

MockScript load_mock_script(const std::string& path) {
    return parse_mock_script(read_text_file(path));
}

bool glob_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0;
    std::size_t t = 0;
    std::size_t star = std::string_view::npos;
    std::size_t mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') {
        ++p;
    }
    return p == pattern.size();
}

std::string_view to_string(JournalEntry::Kind kind) {
    switch (kind) {
    case JournalEntry::Kind::create: return "create";
    case JournalEntry::Kind::create_failed: return "create-failed";
    case JournalEntry::Kind::destroy: return "destroy";
    case JournalEntry::Kind::destroy_failed: return "destroy-failed";
    case JournalEntry::Kind::exec: return "exec";
    case JournalEntry::Kind::apply_plan: return "apply-plan";
    }
    return "?";
}

MockBackend::MockBackend() = default;
MockBackend::MockBackend(MockScript script) : script_(std::move(script)) {}
MockBackend::~MockBackend() = default;

void MockBackend::record(JournalEntry entry) {
    journal_.push_back(std::move(entry));
}

EndpointHandle MockBackend::create_endpoint(const EndpointRequest& request) {
    std::lock_guard lock(mutex_);
    if (auto it = endpoints_.find(request.name); it != endpoints_.end() && it->second->alive) {
        return it->second->handle;
    }
    if (refused_.contains(request.kind)) {
        record({JournalEntry::Kind::create_failed, request.name, "refused"});
        throw BackendError("mock backend does not host " + std::string(to_string(request.kind)) + " endpoints");
    }
    const auto attempt = create_attempts_++;
    if (failing_creates_.contains(attempt)) {
        record({JournalEntry::Kind::create_failed, request.name, "injected"});
        throw BackendError("injected failure creating '" + request.name + "'");
    }
    auto endpoint = std::make_shared<Endpoint>();
    endpoint->handle = {request.name, next_id_++};
    endpoints_[request.name] = endpoint;
    requests_.push_back(request);
    record({JournalEntry::Kind::create, request.name, std::string(to_string(request.kind))});
    return endpoint->handle;
}

void MockBackend::destroy(const EndpointHandle& handle) {
    std::lock_guard lock(mutex_);
    auto it = endpoints_.find(handle.name);
    if (it == endpoints_.end() || it->second->handle != handle || !it->second->alive) {
        return;
    }
    if (failing_destroys_.contains(handle.name)) {
        record({JournalEntry::Kind::destroy_failed, handle.name, "injected"});
        throw BackendError("injected failure destroying '" + handle.name + "'");
    }
    std::lock_guard endpoint_lock(it->second->mutex);
    it->second->alive = false;
    record({JournalEntry::Kind::destroy, handle.name, {}});
}

std::shared_ptr<MockBackend::Endpoint> MockBackend::lookup(const EndpointHandle& handle) const {
    std::lock_guard lock(mutex_);
    auto it = endpoints_.find(handle.name);
    if (it == endpoints_.end() || it->second->handle != handle) {
        return nullptr;
    }
    return it->second;
}

CommandResult MockBackend::scripted(std::string_view endpoint, const std::string& command) const {
    std::lock_guard lock(mutex_);
    if (auto it = script_.per_endpoint.find(std::string(endpoint)); it != script_.per_endpoint.end()) {
        for (const auto& r : it->second) {
            if (glob_match(r.pattern, command)) {
                return r.result;
            }
        }
    }
    for (const auto& r : script_.global) {
        if (glob_match(r.pattern, command)) {
            return r.result;
        }
    }
    return {};
}

CommandResult MockBackend::exec(const EndpointHandle& handle, const std::string& command, const Environment& env) {
    auto endpoint = lookup(handle);
    if (!endpoint) {
        throw EndpointGone(handle.name);
    }
    const auto sleep = sleep_duration(command);
    CommandResult result = sleep ? CommandResult{} : scripted(handle.name, command);
    {
        std::lock_guard endpoint_lock(endpoint->mutex);
        if (!endpoint->alive) {
            throw EndpointGone(handle.name);
        }
        const auto session = env.find(kSessionVariable);
        auto& clock = endpoint->clocks[session == env.end() ? std::string{} : session->second];
        result.started_at = clock;
        clock += sleep ? *sleep : 1;
        result.ended_at = clock;
        endpoint->commands.push_back(command);
    }
    std::lock_guard lock(mutex_);
    record({JournalEntry::Kind::exec, handle.name, command});
    return result;
}

void MockBackend::apply_plan(const netplan::ConnectivityPlan& plan) {
    std::lock_guard lock(mutex_);
    if (fail_apply_plan_) {
        throw BackendError("injected failure applying the connectivity plan");
    }
    plans_.push_back(plan);
    record({JournalEntry::Kind::apply_plan, {}, std::to_string(plan.entries.size()) + " entries"});
}

void MockBackend::add_response(std::string endpoint, ScriptedResponse response) {
    std::lock_guard lock(mutex_);
    script_.per_endpoint[std::move(endpoint)].push_back(std::move(response));
}

void MockBackend::add_global_response(ScriptedResponse response) {
    std::lock_guard lock(mutex_);
    script_.global.push_back(std::move(response));
}

void MockBackend::fail_create_at(std::size_t index) {
    std::lock_guard lock(mutex_);
    failing_creates_.insert(index);
}

void MockBackend::fail_destroy(std::string endpoint) {
    std::lock_guard lock(mutex_);
    failing_destroys_.insert(std::move(endpoint));
}

void MockBackend::fail_apply_plan(bool fail) {
    std::lock_guard lock(mutex_);
    fail_apply_plan_ = fail;
}

void MockBackend::refuse(EndpointKind kind) {
    std::lock_guard lock(mutex_);
    refused_.insert(kind);
}

std::vector<JournalEntry> MockBackend::journal() const {
    std::lock_guard lock(mutex_);
    return journal_;
}

std::vector<std::string> MockBackend::exec_journal(std::string_view name) const {
    std::shared_ptr<Endpoint> endpoint;
    {
        std::lock_guard lock(mutex_);
        auto it = endpoints_.find(std::string(name));
        if (it == endpoints_.end()) {
            return {};
        }
        endpoint = it->second;
    }
    std::lock_guard endpoint_lock(endpoint->mutex);
    return endpoint->commands;
}

std::vector<netplan::ConnectivityPlan> MockBackend::applied_plans() const {
    std::lock_guard lock(mutex_);
    return plans_;
}

std::vector<EndpointRequest> MockBackend::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

bool MockBackend::is_alive(std::string_view name) const {
    std::lock_guard lock(mutex_);
    auto it = endpoints_.find(std::string(name));
    return it != endpoints_.end() && it->second->alive;
}

EndpointHandle RoutingBackend::create_endpoint(const EndpointRequest& request) {
    auto& target = request.kind == EndpointKind::vm ? vms_ : containers_;
    auto handle = target.create_endpoint(request);
    std::lock_guard lock(mutex_);
    kinds_[request.name] = request.kind;
    return handle;
}

Backend& RoutingBackend::route(const EndpointHandle& handle) {
    std::lock_guard lock(mutex_);
    auto it = kinds_.find(handle.name);
    if (it == kinds_.end()) {
        throw EndpointGone(handle.name);
    }
    return it->second == EndpointKind::vm ? vms_ : containers_;
}

void RoutingBackend::destroy(const EndpointHandle& handle) {
    route(handle).destroy(handle);
}

CommandResult RoutingBackend::exec(const EndpointHandle& handle, const std::string& command, const Environment& env) {
    return route(handle).exec(handle, command, env);
}

void RoutingBackend::apply_plan(const netplan::ConnectivityPlan& plan) {
    containers_.apply_plan(plan);
    if (&vms_ != &containers_) {
        vms_.apply_plan(plan);
    }
}

} // namespace alurity::orchestrator
