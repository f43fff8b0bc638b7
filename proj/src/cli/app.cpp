#include "alurity/cli/app.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "alurity/flow/flow_plan.hpp"
#include "alurity/flow/transcript.hpp"
#include "alurity/model/validate.hpp"
#include "alurity/netplan/addressing.hpp"
#include "alurity/netplan/connectivity.hpp"
#include "alurity/orchestrator/deployment.hpp"
#include "alurity/orchestrator/mock_backend.hpp"
#include "alurity/parser/raw_node.hpp"
#include "alurity/parser/scenario_parser.hpp"
#include "alurity/pipeline/pipeline.hpp"
#include "alurity/rvd/client.hpp"
#include "alurity/toolreg/registry.hpp"

namespace alurity::cli {

namespace {

namespace fs = std::filesystem;

/// Thrown inside a command to leave with a given exit code.
struct Exit {
    int code;
};

std::string env_or(const char* name, const std::string& fallback = {}) {
    const char* value = std::getenv(name);
    return value != nullptr && *value != '\0' ? std::string(value) : fallback;
}

void report(std::ostream& err, const std::string& where, const ParseFailure& e) {
    err << where;
    if (e.mark().line > 0) {
        err << ":" << e.mark().line << ":" << e.mark().column;
    }
    err << ": " << e.code() << ": " << e.detail() << "\n";
}

Scenario load_scenario(const std::string& path, std::ostream& err) {
    try {
        return parse_scenario(read_text_file(path));
    } catch (const ParseFailure& e) {
        report(err, path, e);
        throw Exit{kParseFailure};
    }
}

void require_valid(const Scenario& scenario, std::ostream& err) {
    const auto diagnostics = validate(scenario);
    for (const auto& d : diagnostics) {
        err << format_diagnostic(d) << "\n";
    }
    if (has_errors(diagnostics)) {
        throw Exit{kValidationErrors};
    }
}

toolreg::RegistryIndex load_registry(const std::string& flag, std::ostream& err) {
    const auto path = flag.empty() ? env_or(kRegistryVariable) : flag;
    if (path.empty()) {
        return toolreg::RegistryIndex::permissive();
    }
    try {
        return toolreg::RegistryIndex::load_file(path);
    } catch (const toolreg::RegistryError& e) {
        err << path << ": " << e.what() << "\n";
        throw Exit{kParseFailure};
    }
}

std::unique_ptr<orchestrator::MockBackend> make_backend(const std::string& name, const std::string& script,
                                                        std::ostream& err) {
    if (name != "mock") {
        err << "unknown backend '" << name << "' (available: mock)\n";
        throw Exit{kUsage};
    }
    if (script.empty()) {
        return std::make_unique<orchestrator::MockBackend>();
    }
    try {
        return std::make_unique<orchestrator::MockBackend>(orchestrator::load_mock_script(script));
    } catch (const ParseFailure& e) {
        report(err, script, e);
        throw Exit{kParseFailure};
    }
}

std::string tracker_url(const std::string& flag, std::ostream& err) {
    auto url = flag.empty() ? env_or(kTrackerUrlVariable) : flag;
    if (url.empty()) {
        err << "no tracker URL: pass --tracker-url or set " << kTrackerUrlVariable << "\n";
        throw Exit{kUsage};
    }
    return url;
}

Flow load_named_flow(const std::string& name, const fs::path& scenario_dir, std::ostream& err) {
    const std::vector<fs::path> candidates{fs::path(name), scenario_dir / (name + ".yaml"),
                                           scenario_dir / "flows" / (name + ".yaml")};
    for (const auto& candidate : candidates) {
        std::error_code ec;
        if (!fs::is_regular_file(candidate, ec)) {
            continue;
        }
        try {
            return parse_flow(read_text_file(candidate.string()));
        } catch (const ParseFailure& e) {
            report(err, candidate.string(), e);
            throw Exit{kParseFailure};
        }
    }
    err << "flow '" << name << "' not found (tried " << candidates[0].string() << ", " << candidates[1].string()
        << ", " << candidates[2].string() << ")\n";
    throw Exit{kParseFailure};
}

fs::path transcript_path(const fs::path& dir) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &utc);
    for (int n = 1;; ++n) {
        auto path = dir / (n == 1 ? std::string(stamp) + ".yaml" : std::string(stamp) + "-" + std::to_string(n) + ".yaml");
        if (!fs::exists(path)) {
            return path;
        }
    }
}

void write_transcript(const flow::Transcript& transcript, const fs::path& dir, std::ostream& err) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    const auto path = transcript_path(dir);
    std::ofstream file(path, std::ios::binary);
    file << flow::serialize_transcript(transcript);
    file.close();
    if (ec || !file) {
        err << "cannot write transcript to " << path.string() << "\n";
        throw Exit{kRuntimeFailure};
    }
    err << "transcript: " << path.string() << "\n";
}

/// One line per command in plan order: endpoint, window, pane, exit code, command.
void print_results(const flow::FlowPlan& plan, const flow::Transcript& transcript, std::ostream& out) {
    std::map<std::string, std::vector<const flow::TranscriptEvent*>> by_pane;
    for (const auto& event : transcript.events) {
        by_pane[event.endpoint + "\n" + event.window + "\n" + std::to_string(event.pane)].push_back(&event);
    }
    for (const auto& ep : plan.endpoints) {
        for (const auto& window : ep.windows) {
            for (std::size_t pane = 0; pane < window.panes.size(); ++pane) {
                for (const auto* event : by_pane[ep.endpoint + "\n" + window.name + "\n" + std::to_string(pane)]) {
                    out << ep.endpoint << "\t" << window.name << "\t" << pane << "\t" << event->result.exit_code
                        << "\t" << event->command << "\n";
                }
            }
        }
    }
}

struct RunOptions {
    std::string file;
    std::string backend = "mock";
    std::string mock_script;
    std::string registry;
    std::string flow;
    std::optional<long long> rvd;
    std::string tracker_url;
    std::string transcripts_dir = "transcripts";
    bool fail_fast = false;
};

int cmd_validate(const std::string& file, std::ostream& out, std::ostream& err) {
    const auto scenario = load_scenario(file, err);
    const auto diagnostics = validate(scenario);
    for (const auto& d : diagnostics) {
        out << format_diagnostic(d) << "\n";
    }
    return has_errors(diagnostics) ? kValidationErrors : kSuccess;
}

int cmd_graph(const std::string& file, const std::string& format, std::ostream& out, std::ostream& err) {
    netplan::GraphFormat parsed{};
    try {
        parsed = netplan::parse_graph_format(format);
    } catch (const netplan::UnsupportedFormat& e) {
        err << e.what() << " (available: dot)\n";
        return kUsage;
    }
    const auto scenario = load_scenario(file, err);
    require_valid(scenario, err);
    try {
        const auto assignment = netplan::allocate_addresses(scenario);
        out << netplan::export_graph(netplan::build_connectivity_plan(scenario, assignment), assignment, parsed);
    } catch (const netplan::AllocationFailure& e) {
        err << "network '" << e.network() << "': " << e.what() << "\n";
        return kValidationErrors;
    }
    return kSuccess;
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
    if (opts.file.empty() == !opts.rvd.has_value()) {
        err << "run needs exactly one of a scenario file or --rvd <ticket-id>\n";
        return kUsage;
    }
    auto backend = make_backend(opts.backend, opts.mock_script, err);
    const auto registry = load_registry(opts.registry, err);

    Scenario scenario;
    std::optional<Flow> flow;
    fs::path base_dir = fs::current_path();
    if (opts.rvd) {
        const auto url = tracker_url(opts.tracker_url, err);
        try {
            const auto reproduction = rvd::extract_reproduction(rvd::fetch_ticket(url, *opts.rvd));
            scenario = reproduction.scenario;
            flow = reproduction.flow;
        } catch (const rvd::NoReproductionFound& e) {
            err << e.what() << "\n";
            return kParseFailure;
        } catch (const rvd::NotFound& e) {
            err << e.what() << "\n";
            return kTransportFailure;
        } catch (const rvd::TransportError& e) {
            err << e.what() << "\n";
            return kTransportFailure;
        } catch (const rvd::Rejected& e) {
            err << e.what() << "\n";
            return kTransportFailure;
        }
    } else {
        scenario = load_scenario(opts.file, err);
        base_dir = fs::absolute(opts.file).parent_path();
        if (!scenario.flows.empty()) {
            flow = scenario.flows;
        }
    }
    if (!opts.flow.empty()) {
        flow = load_named_flow(opts.flow, base_dir, err);
    }
    require_valid(scenario, err);

    std::optional<flow::FlowPlan> plan;
    if (flow) {
        try {
            plan = flow::compile_flow(*flow, scenario);
        } catch (const std::runtime_error& e) {
            err << e.what() << "\n";
            return kValidationErrors;
        }
    }

    std::optional<orchestrator::Deployment> deployment;
    try {
        deployment.emplace(orchestrator::up(scenario, *backend, registry));
    } catch (const orchestrator::DeploymentFailure& e) {
        err << "deployment failed: " << e.what() << "\n";
        return kRuntimeFailure;
    }
    err << "up: " << deployment->states().size() << " endpoints running on " << backend->name() << "\n";

    int code = kSuccess;
    if (plan) {
        flow::Transcript transcript;
        try {
            transcript = flow::run_flow(*deployment, *plan, {.concurrent = true, .fail_fast = opts.fail_fast});
            if (!flow::verify_transcript(*plan, transcript)) {
                err << "transcript does not match the flow plan\n";
                code = kRuntimeFailure;
            }
        } catch (const flow::FlowAborted& e) {
            err << e.what() << "\n";
            transcript = e.partial();
            code = kRuntimeFailure;
        } catch (const std::exception& e) {
            err << "flow failed: " << e.what() << "\n";
            code = kRuntimeFailure;
        }
        print_results(*plan, transcript, out);
        try {
            write_transcript(transcript, opts.transcripts_dir, err);
        } catch (const Exit& e) {
            code = e.code;
        }
    }
    orchestrator::down(*deployment);
    return code;
}

struct PipelineOptions {
    std::string target;
    std::vector<std::string> tools;
    std::string sink = "dir";
    std::string out_dir = "flaws";
    std::string tracker_url;
    std::string registry;
    std::string backend = "mock";
    std::string mock_script;
};

ModuleRef parse_ref_arg(const std::string& text, std::ostream& err) {
    auto ref = ModuleRef::parse(text);
    if (!ref) {
        err << "'" << text << "' is not a module reference\n";
        throw Exit{kUsage};
    }
    return *ref;
}

int cmd_pipeline(const PipelineOptions& opts, std::ostream& out, std::ostream& err) {
    pipeline::PipelineSpec spec{parse_ref_arg(opts.target, err), {}};
    for (const auto& tool : opts.tools) {
        spec.tools.push_back(parse_ref_arg(tool, err));
    }
    std::unique_ptr<pipeline::Sink> sink;
    if (opts.sink == "tracker") {
        sink = std::make_unique<pipeline::TrackerSink>(tracker_url(opts.tracker_url, err));
    } else {
        sink = std::make_unique<pipeline::DirectorySink>(opts.out_dir);
    }
    auto backend = make_backend(opts.backend, opts.mock_script, err);
    const auto registry = load_registry(opts.registry, err);

    pipeline::PipelineResult result;
    try {
        result = pipeline::run_pipeline(spec, *backend, registry);
    } catch (const pipeline::ValidationFailure& e) {
        err << e.code() << ": " << e.what() << "\n";
        return kValidationErrors;
    } catch (const toolreg::UnknownModule& e) {
        err << e.what() << "\n";
        return kValidationErrors;
    } catch (const orchestrator::DeploymentFailure& e) {
        err << "deployment failed: " << e.what() << "\n";
        return kRuntimeFailure;
    }
    err << result.findings.size() << " finding(s)\n";
    try {
        for (const auto& location : pipeline::emit_all(result.records, *sink)) {
            out << location << "\n";
        }
    } catch (const pipeline::SinkUnavailable& e) {
        err << e.what() << "; " << e.outbox().size() << " record(s) not delivered\n";
        return kTransportFailure;
    }
    return kSuccess;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robot security scenarios: validate, run, graph and pipeline.", "alurity"};
    app.require_subcommand(1);

    std::string validate_file;
    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario and print its diagnostics");
    validate_cmd->add_option("file", validate_file, "Scenario YAML")->required();

    std::string graph_file;
    std::string graph_format = "dot";
    auto* graph_cmd = app.add_subcommand("graph", "Print the scenario network graph");
    graph_cmd->add_option("file", graph_file, "Scenario YAML")->required();
    graph_cmd->add_option("--format", graph_format, "Output format (dot)");

    RunOptions run;
    long long rvd_id = 0;
    auto* run_cmd = app.add_subcommand("run", "Bring a scenario up, run a flow, tear it down");
    run_cmd->add_option("file", run.file, "Scenario YAML");
    run_cmd->add_option("--backend", run.backend, "Execution backend (mock)");
    run_cmd->add_option("--mock-script", run.mock_script, "Scripted responses for the mock backend");
    run_cmd->add_option("--registry", run.registry, "Module registry index");
    run_cmd->add_option("--flow", run.flow, "Flow file or name");
    auto* rvd_opt = run_cmd->add_option("--rvd", rvd_id, "Reproduce the scenario attached to a tracker ticket");
    run_cmd->add_option("--tracker-url", run.tracker_url, "Tracker base URL");
    run_cmd->add_option("--transcripts-dir", run.transcripts_dir, "Where transcripts are written");
    run_cmd->add_flag("--fail-fast", run.fail_fast, "Abort the flow on the first failing command");

    PipelineOptions pipe;
    auto* pipeline_cmd = app.add_subcommand("pipeline", "Run security tools against a target module");
    pipeline_cmd->add_option("--target", pipe.target, "Target module reference")->required();
    pipeline_cmd->add_option("--tools", pipe.tools, "Tool module references")->required()->delimiter(',');
    pipeline_cmd->add_option("--sink", pipe.sink, "dir or tracker")->check(CLI::IsMember({"dir", "tracker"}));
    pipeline_cmd->add_option("--out", pipe.out_dir, "Directory for flaw files");
    pipeline_cmd->add_option("--tracker-url", pipe.tracker_url, "Tracker base URL");
    pipeline_cmd->add_option("--registry", pipe.registry, "Module registry index");
    pipeline_cmd->add_option("--backend", pipe.backend, "Execution backend (mock)");
    pipeline_cmd->add_option("--mock-script", pipe.mock_script, "Scripted responses for the mock backend");

    std::vector<std::string> argv_storage{"alurity"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kUsage;
    }

    try {
        if (validate_cmd->parsed()) {
            return cmd_validate(validate_file, out, err);
        }
        if (graph_cmd->parsed()) {
            return cmd_graph(graph_file, graph_format, out, err);
        }
        if (run_cmd->parsed()) {
            if (rvd_opt->count() > 0) {
                run.rvd = rvd_id;
            }
            return cmd_run(run, out, err);
        }
        return cmd_pipeline(pipe, out, err);
    } catch (const Exit& e) {
        return e.code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
}

} // namespace alurity::cli
