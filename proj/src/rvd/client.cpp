#include "alurity/rvd/client.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "alurity/parser/raw_node.hpp"
#include "alurity/parser/scenario_parser.hpp"

namespace alurity::rvd {

namespace {

using json = nlohmann::json;

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r");
    return std::string(text.substr(first, last - first + 1));
}

std::size_t backtick_run(std::string_view line) {
    std::size_t n = 0;
    while (n < line.size() && line[n] == '`') {
        ++n;
    }
    return n;
}

std::string describe(const httplib::Result& result) { return httplib::to_string(result.error()); }

void check_status(const httplib::Response& response, long long id) {
    if (response.status >= 200 && response.status < 300) {
        return;
    }
    if (response.status == 404 && id > 0) {
        throw NotFound(id);
    }
    if (response.status >= 400 && response.status < 500) {
        std::string message = response.body;
        try {
            const auto body = json::parse(response.body);
            if (body.is_object() && body.contains("message") && body["message"].is_string()) {
                message = body["message"].get<std::string>();
            }
        } catch (const json::exception&) {
        }
        throw Rejected(response.status, message);
    }
    throw TransportError("tracker answered with status " + std::to_string(response.status));
}

bool has_scenario_section(const RawNode& doc) {
    return doc.find("networks") != nullptr || doc.find("containers") != nullptr || doc.find("vms") != nullptr;
}

} // namespace

TrackerClient::TrackerClient(std::string base_url, std::optional<std::string> token)
    : base_url_(std::move(base_url)), token_(std::move(token)) {
    constexpr std::string_view scheme = "http://";
    if (!base_url_.starts_with(scheme)) {
        throw TransportError("unsupported tracker URL '" + base_url_ + "': only http:// is supported");
    }
    const auto rest = std::string_view(base_url_).substr(scheme.size());
    const auto slash = rest.find('/');
    host_ = std::string(scheme) + std::string(rest.substr(0, slash));
    if (slash != std::string_view::npos) {
        prefix_ = std::string(rest.substr(slash));
        while (!prefix_.empty() && prefix_.back() == '/') {
            prefix_.pop_back();
        }
    }
    if (rest.substr(0, slash).empty()) {
        throw TransportError("tracker URL '" + base_url_ + "' has no host");
    }
    if (!token_) {
        if (const char* env = std::getenv(kTokenVariable); env != nullptr && *env != '\0') {
            token_ = env;
        }
    }
}

Ticket TrackerClient::fetch_ticket(long long id) const {
    httplib::Client client(host_);
    client.set_connection_timeout(5);
    client.set_read_timeout(10);
    httplib::Headers headers;
    if (token_) {
        headers.emplace("Authorization", "Bearer " + *token_);
    }
    const auto result = client.Get(prefix_ + "/issues/" + std::to_string(id), headers);
    if (!result) {
        throw TransportError("cannot reach tracker at " + base_url_ + ": " + describe(result));
    }
    check_status(*result, id);
    try {
        const auto body = json::parse(result->body);
        Ticket ticket;
        ticket.id = body.at("id").get<long long>();
        ticket.title = body.value("title", "");
        ticket.body = body.value("body", "");
        if (body.contains("labels")) {
            for (const auto& label : body["labels"]) {
                ticket.labels.push_back(label.is_string() ? label.get<std::string>()
                                                          : label.value("name", std::string{}));
            }
        }
        return ticket;
    } catch (const json::exception& e) {
        throw TransportError(std::string("malformed ticket response: ") + e.what());
    }
}

long long TrackerClient::push_issue(const pipeline::FlawRecord& record) const {
    if (const auto problems = pipeline::record_problems(record); !problems.empty()) {
        throw pipeline::RecordError("flaw record is not valid: " + problems.front());
    }
    const json payload{{"title", record.title},
                       {"body", issue_body(record)},
                       {"labels", json::array({record.flaw_class, record.severity})}};
    httplib::Client client(host_);
    client.set_connection_timeout(5);
    client.set_read_timeout(10);
    httplib::Headers headers;
    if (token_) {
        headers.emplace("Authorization", "Bearer " + *token_);
    }
    const auto result = client.Post(prefix_ + "/issues", headers, payload.dump(), "application/json");
    if (!result) {
        throw TransportError("cannot reach tracker at " + base_url_ + ": " + describe(result));
    }
    check_status(*result, 0);
    try {
        return json::parse(result->body).at("id").get<long long>();
    } catch (const json::exception& e) {
        throw TransportError(std::string("malformed issue response: ") + e.what());
    }
}

Ticket fetch_ticket(const std::string& base_url, long long id) { return TrackerClient(base_url).fetch_ticket(id); }

long long push_issue(const std::string& base_url, const pipeline::FlawRecord& record) {
    return TrackerClient(base_url).push_issue(record);
}

std::vector<FencedBlock> fenced_blocks(std::string_view markdown) {
    std::vector<FencedBlock> blocks;
    std::optional<FencedBlock> open;
    std::size_t fence = 0;
    std::size_t pos = 0;
    while (pos <= markdown.size()) {
        const auto end = markdown.find('\n', pos);
        const auto line = markdown.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        const auto stripped = trim(line);
        const auto run = backtick_run(stripped);
        if (!open) {
            if (run >= 3) {
                open = FencedBlock{trim(std::string_view(stripped).substr(run)), {}};
                fence = run;
            }
        } else if (run >= fence && run == stripped.size()) {
            blocks.push_back(std::move(*open));
            open.reset();
        } else {
            open->content.append(line).append("\n");
        }
        if (end == std::string_view::npos) {
            break;
        }
        pos = end + 1;
    }
    if (open) {
        blocks.push_back(std::move(*open));
    }
    return blocks;
}

std::string issue_body(const pipeline::FlawRecord& record) {
    const auto text = pipeline::serialize_record(record);
    std::size_t longest = 0;
    for (std::size_t i = 0; i < text.size();) {
        const auto run = backtick_run(std::string_view(text).substr(i));
        longest = std::max(longest, run);
        i += run == 0 ? 1 : run;
    }
    const std::string fence(std::max<std::size_t>(3, longest + 1), '`');
    return fence + "yaml\n" + text + fence + "\n";
}

Reproduction extract_reproduction(const Ticket& ticket) {
    std::optional<Reproduction> found;
    for (const auto& block : fenced_blocks(ticket.body)) {
        if (block.info != "yaml") {
            continue;
        }
        RawNode doc;
        try {
            doc = load_document(block.content);
        } catch (const ParseFailure&) {
            continue;
        }
        if (!doc.is_mapping()) {
            continue;
        }
        if (!found) {
            try {
                if (doc.find("reproduction") != nullptr) {
                    const auto record = pipeline::parse_record(block.content);
                    Reproduction r{parse_scenario(record.scenario_yaml), std::nullopt};
                    if (!record.flow_yaml.empty()) {
                        r.flow = parse_flow(record.flow_yaml);
                    }
                    return r;
                }
                if (has_scenario_section(doc)) {
                    found = Reproduction{parse_scenario(doc), std::nullopt};
                }
            } catch (const ParseFailure&) {
            } catch (const pipeline::RecordError&) {
            }
            continue;
        }
        try {
            found->flow = parse_flow(doc);
            return *found;
        } catch (const ParseFailure&) {
        }
    }
    if (!found) {
        throw NoReproductionFound("ticket " + std::to_string(ticket.id) + " holds no yaml block with a scenario");
    }
    if (!found->scenario.flows.empty()) {
        found->flow = found->scenario.flows;
    }
    return *found;
}

} // namespace alurity::rvd
