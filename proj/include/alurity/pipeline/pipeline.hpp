#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "alurity/flow/transcript.hpp"
#include "alurity/model/scenario.hpp"
#include "alurity/orchestrator/backend.hpp"
#include "alurity/pipeline/flaw_record.hpp"
#include "alurity/toolreg/registry.hpp"

namespace alurity::pipeline {

inline constexpr const char* kNetworkName = "pipeline-network";
inline constexpr const char* kTargetName = "target";
inline constexpr const char* kScannerName = "scanner";
inline constexpr const char* kWindowName = "pipeline";

struct PipelineSpec {
    ModuleRef target;
    /// Reconnaissance, testing or exploitation modules, run in this order.
    std::vector<ModuleRef> tools;
};

/// `empty-toolchain` or `tool-group`.
class ValidationFailure : public std::runtime_error {
public:
    ValidationFailure(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct Invocation {
    ModuleRef tool;
    std::string command;
};

struct Assembly {
    /// `target` and `scanner` on one /24 network; no embedded flow.
    Scenario scenario;
    /// One scanner window, one command per tool.
    Flow flow;
    Ipv4Address target_address;
    std::vector<Invocation> invocations;
};

/// Throws ValidationFailure, or UnknownModule for refs missing from `registry`.
Assembly assemble(const PipelineSpec& spec, const toolreg::RegistryIndex& registry);

struct Finding {
    ModuleRef tool;
    std::string rule_id;
    /// Output line that matched.
    std::string line;
    std::map<std::string, std::string> fields;

    bool operator==(const Finding&) const = default;
};

/// Applies each tool's rules to the stdout of its own commands. A line yields
/// at most one finding, from the first rule that matches it.
std::vector<Finding> extract_findings(const Assembly& assembly, const flow::Transcript& transcript,
                                      const toolreg::RegistryIndex& registry);

FlawRecord make_record(const Assembly& assembly, const Finding& finding, const toolreg::RegistryIndex& registry);

struct PipelineResult {
    Assembly assembly;
    flow::Transcript transcript;
    std::vector<Finding> findings;
    std::vector<FlawRecord> records;
};

/// Up, run, extract, down. The deployment is torn down on every path; failures
/// after up surface as orchestrator::DeploymentFailure.
PipelineResult run_pipeline(const PipelineSpec& spec, orchestrator::Backend& backend,
                            const toolreg::RegistryIndex& registry);

/// Records that could not be delivered travel with the error.
class SinkUnavailable : public std::runtime_error {
public:
    SinkUnavailable(const std::string& message, std::vector<FlawRecord> outbox)
        : std::runtime_error(message), outbox_(std::move(outbox)) {}
    const std::vector<FlawRecord>& outbox() const { return outbox_; }

private:
    std::vector<FlawRecord> outbox_;
};

class Sink {
public:
    virtual ~Sink() = default;
    /// Returns where the record went: a file path or an issue id.
    virtual std::string emit(const FlawRecord& record) = 0;
};

/// Writes `rvd-<fnv1a64(title)>.yaml`. An existing file holding an equal record
/// is overwritten; a different record gets a `-2`, `-3`, ... suffix.
class DirectorySink final : public Sink {
public:
    explicit DirectorySink(std::filesystem::path directory) : directory_(std::move(directory)) {}
    std::string emit(const FlawRecord& record) override;

private:
    std::filesystem::path directory_;
};

class TrackerSink final : public Sink {
public:
    explicit TrackerSink(std::string base_url) : base_url_(std::move(base_url)) {}
    std::string emit(const FlawRecord& record) override;

private:
    std::string base_url_;
};

/// Emits in order. On the first failure throws SinkUnavailable carrying that
/// record and every one after it.
std::vector<std::string> emit_all(const std::vector<FlawRecord>& records, Sink& sink);

} // namespace alurity::pipeline
