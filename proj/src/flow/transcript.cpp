#include "alurity/flow/transcript.hpp"

#include <atomic>
#include <charconv>
#include <condition_variable>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "alurity/model/errors.hpp"
#include "alurity/parser/raw_node.hpp"

namespace alurity::flow {

namespace {

struct PaneJob {
    const EndpointPlan* endpoint;
    const WindowPlan* window;
    std::size_t index;
};

std::string pane_key(std::string_view endpoint, std::string_view window, std::size_t pane) {
    return std::string(endpoint) + '/' + std::string(window) + '/' + std::to_string(pane);
}

/// Serializes transcript appends behind one global sequence counter.
class Collector {
public:
    /// Returns the index of the appended event.
    std::size_t append(TranscriptEvent event) {
        std::lock_guard lock(mutex_);
        event.seq = transcript_.events.size();
        transcript_.events.push_back(std::move(event));
        return transcript_.events.size() - 1;
    }

    void abort(std::size_t index, std::string reason) {
        std::lock_guard lock(mutex_);
        if (!abort_index_) {
            abort_index_ = index;
            abort_reason_ = std::move(reason);
        }
        aborted_ = true;
    }

    void fail(std::exception_ptr error) {
        std::lock_guard lock(mutex_);
        if (!error_) {
            error_ = error;
        }
        aborted_ = true;
    }

    bool aborted() const { return aborted_; }

    Transcript finish() {
        std::lock_guard lock(mutex_);
        if (error_) {
            std::rethrow_exception(error_);
        }
        if (abort_index_) {
            throw FlowAborted(*abort_index_, abort_reason_, transcript_);
        }
        return std::move(transcript_);
    }

private:
    std::mutex mutex_;
    Transcript transcript_;
    std::atomic<bool> aborted_{false};
    std::optional<std::size_t> abort_index_;
    std::string abort_reason_;
    std::exception_ptr error_;
};

void run_pane(orchestrator::Deployment& deployment, const PaneJob& job, bool fail_fast_all, Collector& collector) {
    const auto& name = job.endpoint->endpoint;
    const orchestrator::Environment env{
        {orchestrator::kSessionVariable, pane_key(name, job.window->name, job.index)},
        {"ALURITY_WINDOW", job.window->name},
        {"ALURITY_PANE", std::to_string(job.index)},
    };
    for (const auto& cmd : job.window->panes[job.index].commands) {
        if (collector.aborted()) {
            return;
        }
        auto result = orchestrator::exec(deployment, name, cmd.text, env);
        const bool failed = result.exit_code != 0;
        const auto index = collector.append({0, name, job.window->name, job.index, cmd.text, std::move(result)});
        if (failed && (cmd.fail_fast || fail_fast_all)) {
            collector.abort(index, "'" + cmd.text + "' on " + name + " exited non-zero");
            return;
        }
    }
}

} // namespace

Transcript run_flow(orchestrator::Deployment& deployment, const FlowPlan& plan, const RunOptions& options) {
    std::vector<PaneJob> jobs;
    for (const auto& ep : plan.endpoints) {
        const auto state = deployment.state(ep.endpoint);
        if (!state) {
            throw UnknownEndpoint(ep.endpoint);
        }
        if (*state != orchestrator::EndpointState::running) {
            throw orchestrator::EndpointNotRunning(ep.endpoint, *state);
        }
        for (const auto& w : ep.windows) {
            for (std::size_t i = 0; i < w.panes.size(); ++i) {
                jobs.push_back({&ep, &w, i});
            }
        }
    }

    Collector collector;
    if (!options.concurrent) {
        for (const auto& job : jobs) {
            try {
                run_pane(deployment, job, options.fail_fast, collector);
            } catch (...) {
                collector.fail(std::current_exception());
                break;
            }
        }
        return collector.finish();
    }

    // Sessions start strictly in plan order; after that they run freely.
    std::mutex start_mutex;
    std::condition_variable start_cv;
    std::size_t started = 0;
    std::vector<std::jthread> sessions;
    sessions.reserve(jobs.size());
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        sessions.emplace_back([&, k] {
            {
                std::unique_lock lock(start_mutex);
                start_cv.wait(lock, [&] { return started == k; });
                ++started;
            }
            start_cv.notify_all();
            try {
                run_pane(deployment, jobs[k], options.fail_fast, collector);
            } catch (...) {
                collector.fail(std::current_exception());
            }
        });
    }
    sessions.clear();
    return collector.finish();
}

std::vector<std::pair<std::string, std::vector<std::string>>> pane_projection(const Transcript& transcript) {
    std::map<std::string, std::vector<std::string>> panes;
    for (const auto& e : transcript.events) {
        panes[pane_key(e.endpoint, e.window, e.pane)].push_back(e.command);
    }
    return {panes.begin(), panes.end()};
}

bool verify_transcript(const FlowPlan& plan, const Transcript& transcript) {
    for (std::size_t i = 1; i < transcript.events.size(); ++i) {
        if (transcript.events[i].seq <= transcript.events[i - 1].seq) {
            return false;
        }
    }
    std::map<std::string, std::vector<std::string>> expected;
    for (const auto& ep : plan.endpoints) {
        for (const auto& w : ep.windows) {
            for (std::size_t i = 0; i < w.panes.size(); ++i) {
                auto& list = expected[pane_key(ep.endpoint, w.name, i)];
                for (const auto& c : w.panes[i].commands) {
                    list.push_back(c.text);
                }
            }
        }
    }
    std::map<std::string, std::vector<std::string>> actual;
    for (const auto& e : transcript.events) {
        const auto key = pane_key(e.endpoint, e.window, e.pane);
        if (!expected.contains(key)) {
            return false;
        }
        actual[key].push_back(e.command);
    }
    for (const auto& [key, commands] : expected) {
        const auto it = actual.find(key);
        const auto& seen = it == actual.end() ? std::vector<std::string>{} : it->second;
        if (seen != commands) {
            return false;
        }
    }
    return true;
}

std::string serialize_transcript(const Transcript& transcript) {
    YAML::Emitter out;
    out << YAML::BeginMap << YAML::Key << "events" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : transcript.events) {
        out << YAML::BeginMap;
        out << YAML::Key << "seq" << YAML::Value << e.seq;
        out << YAML::Key << "endpoint" << YAML::Value << e.endpoint;
        out << YAML::Key << "window" << YAML::Value << e.window;
        out << YAML::Key << "pane" << YAML::Value << e.pane;
        out << YAML::Key << "command" << YAML::Value << YAML::DoubleQuoted << e.command;
        out << YAML::Key << "exit" << YAML::Value << e.result.exit_code;
        out << YAML::Key << "stdout" << YAML::Value << YAML::DoubleQuoted << e.result.stdout_text;
        out << YAML::Key << "stderr" << YAML::Value << YAML::DoubleQuoted << e.result.stderr_text;
        out << YAML::Key << "started-at" << YAML::Value << e.result.started_at;
        out << YAML::Key << "ended-at" << YAML::Value << e.result.ended_at;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

namespace {

template <typename T>
T number_at(const RawNode& node, std::string_view key) {
    const auto* value = node.find(key);
    T out{};
    if (value == nullptr || !value->is_scalar()) {
        throw ParseFailure("missing-key", "transcript event is missing '" + std::string(key) + "'", node.mark);
    }
    auto [next, ec] = std::from_chars(value->scalar.data(), value->scalar.data() + value->scalar.size(), out);
    if (ec != std::errc{} || next != value->scalar.data() + value->scalar.size()) {
        throw ParseFailure("expected-integer", "'" + std::string(key) + "' must be an integer", value->mark);
    }
    return out;
}

std::string text_at(const RawNode& node, std::string_view key) {
    const auto* value = node.find(key);
    if (value == nullptr || value->is_null()) {
        return {};
    }
    if (!value->is_scalar()) {
        throw ParseFailure("expected-scalar", "'" + std::string(key) + "' must be text", value->mark);
    }
    return value->scalar;
}

} // namespace

Transcript parse_transcript(std::string_view text) {
    const auto doc = load_document(text);
    const auto* events = doc.find("events");
    if (events == nullptr || !(events->is_sequence() || events->is_null())) {
        throw ParseFailure("malformed-transcript", "transcript must hold an 'events' list", doc.mark);
    }
    Transcript t;
    for (const auto& item : events->items) {
        TranscriptEvent e;
        e.seq = number_at<std::uint64_t>(item, "seq");
        e.endpoint = text_at(item, "endpoint");
        e.window = text_at(item, "window");
        e.pane = number_at<std::size_t>(item, "pane");
        e.command = text_at(item, "command");
        e.result.exit_code = number_at<int>(item, "exit");
        e.result.stdout_text = text_at(item, "stdout");
        e.result.stderr_text = text_at(item, "stderr");
        e.result.started_at = number_at<std::uint64_t>(item, "started-at");
        e.result.ended_at = number_at<std::uint64_t>(item, "ended-at");
        t.events.push_back(std::move(e));
    }
    return t;
}

} // namespace alurity::flow
