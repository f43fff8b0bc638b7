#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "alurity/model/scenario.hpp"
#include "alurity/pipeline/flaw_record.hpp"

namespace alurity::rvd {

inline constexpr const char* kTokenVariable = "ALURITY_TRACKER_TOKEN";

struct Ticket {
    long long id = 0;
    std::string title;
    /// Markdown, byte-exact as served.
    std::string body;
    std::vector<std::string> labels;

    bool operator==(const Ticket&) const = default;
};

/// Connection failure, timeout, or a response that is not the expected JSON.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFound : public std::runtime_error {
public:
    explicit NotFound(long long id) : std::runtime_error("ticket " + std::to_string(id) + " not found"), id_(id) {}
    long long id() const { return id_; }

private:
    long long id_;
};

/// The tracker answered with a 4xx status.
class Rejected : public std::runtime_error {
public:
    Rejected(int status, const std::string& message)
        : std::runtime_error("tracker rejected the request (" + std::to_string(status) + "): " + message),
          status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

class NoReproductionFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Client for the `GET/POST <base>/issues` subset. Only `http://` base URLs are
/// supported. The bearer token defaults to `ALURITY_TRACKER_TOKEN`.
class TrackerClient {
public:
    explicit TrackerClient(std::string base_url, std::optional<std::string> token = std::nullopt);

    Ticket fetch_ticket(long long id) const;
    /// Returns the id the tracker assigned.
    long long push_issue(const pipeline::FlawRecord& record) const;

    const std::string& base_url() const { return base_url_; }

private:
    std::string base_url_;
    std::string host_;
    std::string prefix_;
    std::optional<std::string> token_;
};

Ticket fetch_ticket(const std::string& base_url, long long id);
long long push_issue(const std::string& base_url, const pipeline::FlawRecord& record);

struct FencedBlock {
    std::string info;
    std::string content;
};

/// Fenced code blocks of a markdown text, in order. Unterminated fences run to the end.
std::vector<FencedBlock> fenced_blocks(std::string_view markdown);

/// The record inside a single `yaml` fenced block.
std::string issue_body(const pipeline::FlawRecord& record);

struct Reproduction {
    Scenario scenario;
    std::optional<Flow> flow;
};

/// Scans `yaml` blocks in order. The first block holding a scenario section, or
/// a flaw record, supplies the scenario; the first later block holding a
/// `flow:` section supplies the flow. A record supplies both. Never executes
/// anything.
Reproduction extract_reproduction(const Ticket& ticket);

} // namespace alurity::rvd
