#include "alurity/orchestrator/deployment.hpp"

#include <algorithm>
#include <functional>

#include "alurity/model/errors.hpp"
#include "alurity/model/validate.hpp"

namespace alurity::orchestrator {

std::string_view to_string(EndpointState state) {
    switch (state) {
    case EndpointState::created: return "created";
    case EndpointState::running: return "running";
    case EndpointState::stopped: return "stopped";
    case EndpointState::failed: return "failed";
    }
    return "?";
}

DeploymentFailure::DeploymentFailure(std::optional<std::string> endpoint, std::string cause, std::vector<Event> events)
    : std::runtime_error(endpoint ? "deployment failed at '" + *endpoint + "': " + cause
                                  : "deployment failed: " + cause),
      endpoint_(std::move(endpoint)), cause_(std::move(cause)), events_(std::move(events)) {}

std::string expand_working_dir(std::string_view path, const std::filesystem::path& working_dir) {
    static constexpr std::string_view token = "$(pwd)";
    std::string out;
    std::size_t pos = 0;
    while (true) {
        auto hit = path.find(token, pos);
        out.append(path.substr(pos, hit == std::string_view::npos ? std::string_view::npos : hit - pos));
        if (hit == std::string_view::npos) {
            break;
        }
        out += working_dir.string();
        pos = hit + token.size();
    }
    return out;
}

void Deployment::log(std::string kind, std::string endpoint, std::string detail) {
    std::lock_guard lock(*mutex_);
    events_.push_back({events_.size(), std::move(kind), std::move(endpoint), std::move(detail)});
}

Deployment::Slot* Deployment::slot(std::string_view name) {
    auto it = std::find_if(slots_.begin(), slots_.end(), [&](const Slot& s) { return s.name == name; });
    return it == slots_.end() ? nullptr : &*it;
}

std::optional<EndpointState> Deployment::state(std::string_view endpoint) const {
    std::lock_guard lock(*mutex_);
    for (const auto& s : slots_) {
        if (s.name == endpoint) {
            return s.state;
        }
    }
    return std::nullopt;
}

std::vector<std::pair<std::string, EndpointState>> Deployment::states() const {
    std::lock_guard lock(*mutex_);
    std::vector<std::pair<std::string, EndpointState>> out;
    for (const auto& s : slots_) {
        out.emplace_back(s.name, s.state);
    }
    return out;
}

std::vector<Event> Deployment::events() const {
    std::lock_guard lock(*mutex_);
    return events_;
}

namespace {

using EventSink = std::function<void(std::string, std::string, std::string)>;

void rollback(Backend& backend, const std::vector<EndpointHandle>& created, const EventSink& log) {
    for (auto it = created.rbegin(); it != created.rend(); ++it) {
        try {
            backend.destroy(*it);
            log("destroy", it->name, "rollback");
        } catch (const std::exception& e) {
            log("destroy-failed", it->name, e.what());
        }
    }
}

} // namespace

Deployment up(const Scenario& scenario, Backend& backend, const toolreg::RegistryIndex& registry,
              const UpOptions& options) {
    Deployment d(scenario, backend);
    const auto logger = [&d](std::string kind, std::string endpoint, std::string detail) {
        d.log(std::move(kind), std::move(endpoint), std::move(detail));
    };

    const auto diagnostics = validate(scenario);
    if (has_errors(diagnostics)) {
        const auto first = std::find_if(diagnostics.begin(), diagnostics.end(),
                                        [](const Diagnostic& x) { return x.severity == Severity::error; });
        throw DeploymentFailure(std::nullopt, "scenario does not validate: " + format_diagnostic(*first), d.events());
    }

    std::vector<EndpointRequest> requests;
    for (const auto& c : scenario.containers) {
        EndpointRequest r{c.name, EndpointKind::container, std::nullopt, {}, {}, c.cpus, c.memory, c.extra_options};
        try {
            r.image = toolreg::resolve(c, registry);
        } catch (const toolreg::UnknownModule& e) {
            throw DeploymentFailure(c.name, e.what(), d.events());
        }
        requests.push_back(std::move(r));
    }
    for (const auto& v : scenario.vms) {
        requests.push_back({v.name, EndpointKind::vm, std::nullopt, expand_working_dir(v.path, options.working_dir),
                            {}, v.cpus, v.memory, std::nullopt});
    }

    try {
        d.assignment_ = netplan::allocate_addresses(scenario);
    } catch (const netplan::AllocationFailure& e) {
        throw DeploymentFailure(std::nullopt, e.what(), d.events());
    }
    d.plan_ = netplan::build_connectivity_plan(scenario, d.assignment_);
    for (auto& r : requests) {
        r.addresses = d.assignment_.attachments_of(r.name);
    }

    std::vector<EndpointHandle> created;
    for (const auto& r : requests) {
        try {
            auto handle = backend.create_endpoint(r);
            created.push_back(handle);
            d.slots_.push_back({r.name, handle, EndpointState::created, false});
            d.log("create", r.name, std::string(to_string(r.kind)));
        } catch (const std::exception& e) {
            d.log("create-failed", r.name, e.what());
            rollback(backend, created, logger);
            throw DeploymentFailure(r.name, e.what(), d.events());
        }
    }

    try {
        backend.apply_plan(d.plan_);
        d.log("apply-plan", {}, std::to_string(d.plan_.entries.size()) + " entries");
    } catch (const std::exception& e) {
        d.log("apply-plan-failed", {}, e.what());
        rollback(backend, created, logger);
        throw DeploymentFailure(std::nullopt, e.what(), d.events());
    }

    for (auto& s : d.slots_) {
        s.state = EndpointState::running;
        d.log("run", s.name, {});
    }
    return d;
}

CommandResult exec(Deployment& d, std::string_view endpoint, const std::string& command, const Environment& env) {
    EndpointHandle handle;
    {
        std::lock_guard lock(*d.mutex_);
        auto* s = d.slot(endpoint);
        if (s == nullptr) {
            throw UnknownEndpoint(std::string(endpoint));
        }
        if (s->state != EndpointState::running) {
            throw EndpointNotRunning(s->name, s->state);
        }
        handle = s->handle;
    }
    try {
        auto result = d.backend_->exec(handle, command, env);
        d.log("exec", std::string(endpoint), command);
        return result;
    } catch (const EndpointGone&) {
        {
            std::lock_guard lock(*d.mutex_);
            d.slot(endpoint)->state = EndpointState::failed;
        }
        d.log("fail", std::string(endpoint), "endpoint gone");
        throw;
    }
}

void down(Deployment& d) {
    for (auto it = d.slots_.rbegin(); it != d.slots_.rend(); ++it) {
        if (it->torn_down) {
            continue;
        }
        it->torn_down = true;
        try {
            d.backend_->destroy(it->handle);
            {
                std::lock_guard lock(*d.mutex_);
                if (it->state != EndpointState::failed) {
                    it->state = EndpointState::stopped;
                }
            }
            d.log("destroy", it->name, {});
        } catch (const std::exception& e) {
            {
                std::lock_guard lock(*d.mutex_);
                it->state = EndpointState::failed;
            }
            d.log("destroy-failed", it->name, e.what());
        }
    }
}

} // namespace alurity::orchestrator
