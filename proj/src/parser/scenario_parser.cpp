#include "alurity/parser/scenario_parser.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace alurity {

namespace {

struct Field {
    std::string key;
    const RawNode* value;
    SourceMark mark;
};

std::string indexed(std::string_view base, std::size_t index) {
    return std::string(base) + '[' + std::to_string(index) + ']';
}

/// Folds either a sequence of single-key maps or a plain mapping into an
/// ordered field list.
std::vector<Field> fold_pairs(const RawNode& body, std::string_view what) {
    std::vector<Field> fields;
    if (body.is_null()) {
        return fields;
    }
    if (body.is_mapping()) {
        for (const auto& [k, v] : body.entries) {
            fields.push_back({k.scalar, &v, k.mark});
        }
        return fields;
    }
    if (!body.is_sequence()) {
        throw ParseFailure("malformed-record", std::string(what) + " must be a list of 'key: value' entries", body.mark);
    }
    for (const auto& item : body.items) {
        if (!item.is_mapping() || item.entries.size() != 1) {
            throw ParseFailure("malformed-record", std::string(what) + " entries must each hold exactly one key",
                               item.mark);
        }
        const auto& [k, v] = item.entries.front();
        fields.push_back({k.scalar, &v, k.mark});
    }
    return fields;
}

class Record {
public:
    Record(const RawNode& body, std::string what, std::string path, SourceMark mark, SourceInfo* source,
           std::set<std::string_view> known, std::set<std::string_view> repeatable = {})
        : fields_(fold_pairs(body, what)), what_(std::move(what)), path_(std::move(path)), mark_(mark) {
        if (source != nullptr) {
            source->lines.emplace(path_, mark_.line);
        }
        std::set<std::string> seen;
        for (const auto& f : fields_) {
            if (!known.contains(f.key)) {
                if (source != nullptr) {
                    source->warnings.push_back({Severity::warning, "unknown-key",
                                                "unknown key '" + f.key + "' in " + what_ + " is ignored",
                                                path_ + '.' + f.key, f.mark.line});
                }
                continue;
            }
            if (!repeatable.contains(f.key) && !seen.insert(f.key).second) {
                throw ParseFailure("repeated-key", "'" + f.key + "' may appear only once in a " + what_, f.mark);
            }
        }
    }

    const Field* get(std::string_view key) const {
        for (const auto& f : fields_) {
            if (f.key == key) {
                return &f;
            }
        }
        return nullptr;
    }

    std::vector<const Field*> all(std::string_view key) const {
        std::vector<const Field*> out;
        for (const auto& f : fields_) {
            if (f.key == key) {
                out.push_back(&f);
            }
        }
        return out;
    }

    const Field& require(std::string_view key) const {
        if (const auto* f = get(key)) {
            return *f;
        }
        throw ParseFailure("missing-key", what_ + " is missing mandatory key '" + std::string(key) + "'", mark_);
    }

    const std::string& path() const { return path_; }

private:
    std::vector<Field> fields_;
    std::string what_;
    std::string path_;
    SourceMark mark_;
};

const std::string& as_string(const Field& f) {
    if (!f.value->is_scalar()) {
        throw ParseFailure("expected-scalar", "'" + f.key + "' must be a single value", f.mark);
    }
    return f.value->scalar;
}

bool as_bool(const Field& f) {
    const auto& text = as_string(f);
    if (!f.value->quoted) {
        if (text == "true" || text == "True" || text == "TRUE") {
            return true;
        }
        if (text == "false" || text == "False" || text == "FALSE") {
            return false;
        }
    }
    throw ParseFailure("expected-boolean", "'" + f.key + "' must be true or false", f.value->mark);
}

long long as_integer(const Field& f) {
    const auto& text = as_string(f);
    long long value = 0;
    const char* begin = text.data() + (text.starts_with('+') ? 1 : 0);
    auto [next, ec] = std::from_chars(begin, text.data() + text.size(), value);
    if (f.value->quoted || text.empty() || ec != std::errc{} || next != text.data() + text.size()) {
        throw ParseFailure("expected-integer", "'" + f.key + "' must be an integer", f.value->mark);
    }
    return value;
}

Ipv4Address as_address(const Field& f) {
    if (auto addr = Ipv4Address::parse(as_string(f))) {
        return *addr;
    }
    throw ParseFailure("invalid-address", "'" + f.value->scalar + "' is not an IPv4 address", f.value->mark);
}

ModuleRef as_module(const std::string& text, SourceMark mark) {
    if (auto ref = ModuleRef::parse(text)) {
        return *ref;
    }
    throw ParseFailure("invalid-module-ref", "'" + text + "' is not a module reference (registry/path:tag)", mark);
}

/// Appends network names from a scalar or a sequence of scalars.
void collect_networks(const Field& f, const std::string& path, std::vector<std::string>& out, SourceInfo& source) {
    const auto push = [&](const RawNode& node) {
        if (!node.is_scalar()) {
            throw ParseFailure("expected-scalar", "network attachments must be names", node.mark);
        }
        source.lines.emplace(path + '.' + indexed("networks", out.size()), node.mark.line);
        out.push_back(node.scalar);
    };
    if (f.value->is_sequence()) {
        for (const auto& item : f.value->items) {
            push(item);
        }
    } else if (!f.value->is_null()) {
        push(*f.value);
    }
}

/// The single key of a section entry such as `- network:`.
std::pair<std::string, const RawNode*> section_entry(const RawNode& item, std::string_view section) {
    if (!item.is_mapping() || item.entries.size() != 1) {
        throw ParseFailure("malformed-record", "entries under '" + std::string(section) + "' must be single-key maps",
                           item.mark);
    }
    const auto& [k, v] = item.entries.front();
    return {k.scalar, &v};
}

const std::vector<RawNode>& section_items(const RawNode& node, std::string_view section) {
    static const std::vector<RawNode> empty;
    if (node.is_null()) {
        return empty;
    }
    if (!node.is_sequence()) {
        throw ParseFailure("malformed-section", "'" + std::string(section) + "' must be a list", node.mark);
    }
    return node.items;
}

NetworkSpec read_network(const RawNode& body, const std::string& path, SourceMark mark, SourceInfo& source) {
    Record rec(body, "network", path, mark, &source, {"name", "driver", "internal", "encryption", "subnet"});
    NetworkSpec net;
    const auto& name = rec.require("name");
    net.name = as_string(name);
    const auto& subnet = rec.require("subnet");
    if (auto cidr = Ipv4Cidr::parse(as_string(subnet))) {
        net.subnet = *cidr;
    } else {
        throw ParseFailure("invalid-subnet", "'" + subnet.value->scalar + "' is not an IPv4 CIDR block",
                           subnet.value->mark);
    }
    if (const auto* f = rec.get("driver")) {
        net.driver = as_string(*f);
    }
    if (const auto* f = rec.get("internal")) {
        net.internal = as_bool(*f);
    }
    if (const auto* f = rec.get("encryption")) {
        net.encryption = as_bool(*f);
    }
    for (const auto* key : {"name", "driver", "internal", "encryption", "subnet"}) {
        if (const auto* f = rec.get(key)) {
            source.lines.emplace(path + '.' + key, f->mark.line);
        }
    }
    return net;
}

void read_sizing(const Record& rec, std::optional<Ipv4Address>& ip, std::optional<long long>& cpus,
                 std::optional<long long>& memory, SourceInfo& source) {
    if (const auto* f = rec.get("ip")) {
        ip = as_address(*f);
        source.lines.emplace(rec.path() + ".ip", f->mark.line);
    }
    if (const auto* f = rec.get("cpus")) {
        cpus = as_integer(*f);
        source.lines.emplace(rec.path() + ".cpus", f->mark.line);
    }
    if (const auto* f = rec.get("memory")) {
        memory = as_integer(*f);
        source.lines.emplace(rec.path() + ".memory", f->mark.line);
    }
}

ContainerSpec read_container(const RawNode& body, const std::string& path, SourceMark mark, SourceInfo& source) {
    Record rec(body, "container", path, mark, &source, {"name", "modules", "ip", "cpus", "memory", "extra-options"});
    ContainerSpec c;
    const auto& name = rec.require("name");
    c.name = as_string(name);
    source.lines.emplace(path + ".name", name.mark.line);

    const auto& modules_field = rec.require("modules");
    Record modules(*modules_field.value, "modules list", path + ".modules", modules_field.mark, &source,
                   {"base", "volume", "network"}, {"volume", "network"});
    const auto& base = modules.require("base");
    c.base = as_module(as_string(base), base.value->mark);
    source.lines.emplace(path + ".base", base.mark.line);
    for (const auto* vol : modules.all("volume")) {
        source.lines.emplace(path + '.' + indexed("volumes", c.volumes.size()), vol->mark.line);
        c.volumes.push_back(as_module(as_string(*vol), vol->value->mark));
    }
    for (const auto* net : modules.all("network")) {
        source.lines.emplace(path + ".networks", net->mark.line);
        collect_networks(*net, path, c.networks, source);
    }

    read_sizing(rec, c.ip, c.cpus, c.memory, source);
    if (const auto* f = rec.get("extra-options")) {
        c.extra_options = as_string(*f);
        source.lines.emplace(path + ".extra-options", f->mark.line);
    }
    return c;
}

VmSpec read_vm(const RawNode& body, const std::string& path, SourceMark mark, SourceInfo& source) {
    Record rec(body, "vm", path, mark, &source, {"name", "path", "network", "ip", "cpus", "memory"}, {"network"});
    VmSpec v;
    const auto& name = rec.require("name");
    v.name = as_string(name);
    source.lines.emplace(path + ".name", name.mark.line);
    const auto& image = rec.require("path");
    v.path = as_string(image);
    source.lines.emplace(path + ".path", image.mark.line);
    for (const auto* net : rec.all("network")) {
        source.lines.emplace(path + ".networks", net->mark.line);
        collect_networks(*net, path, v.networks, source);
    }
    read_sizing(rec, v.ip, v.cpus, v.memory, source);
    return v;
}

std::optional<SplitDirection> normalize_split(std::string text) {
    while (!text.empty() && (std::ispunct(static_cast<unsigned char>(text.back())) ||
                             std::isspace(static_cast<unsigned char>(text.back())))) {
        text.pop_back();
    }
    if (text == "horizontal") {
        return SplitDirection::horizontal;
    }
    if (text == "vertical") {
        return SplitDirection::vertical;
    }
    return std::nullopt;
}

WindowSpec read_window(const RawNode& body, const std::string& path, SourceMark mark, SourceInfo* source) {
    Record rec(body, "window", path, mark, source, {"name", "commands"}, {"commands"});
    WindowSpec w;
    const auto& name = rec.require("name");
    w.name = as_string(name);
    if (source != nullptr) {
        source->lines.emplace(path + ".name", name.mark.line);
    }
    for (const auto* commands : rec.all("commands")) {
        if (commands->value->is_null()) {
            continue;
        }
        if (!commands->value->is_sequence()) {
            throw ParseFailure("malformed-record", "'commands' must be a list", commands->value->mark);
        }
        for (const auto& item : commands->value->items) {
            if (!item.is_mapping() || item.entries.size() != 1 || !item.entries.front().second.is_scalar()) {
                throw ParseFailure("malformed-step", "each step must be 'command: ...' or 'split: ...'", item.mark);
            }
            const auto& [key, value] = item.entries.front();
            if (source != nullptr) {
                source->lines.emplace(path + '.' + indexed("commands", w.items.size()), key.mark.line);
            }
            if (key.scalar == "command" || key.scalar == "command-fail-fast") {
                w.items.emplace_back(Command{value.scalar, key.scalar == "command-fail-fast"});
            } else if (key.scalar == "split") {
                auto direction = normalize_split(value.scalar);
                if (!direction) {
                    throw ParseFailure("unknown-split", "split must be horizontal or vertical, got '" + value.scalar + "'",
                                       value.mark);
                }
                w.items.emplace_back(Split{*direction});
            } else {
                throw ParseFailure("unknown-step", "unknown step '" + key.scalar + "'", key.mark);
            }
        }
    }
    return w;
}

Flow read_flow_section(const RawNode& node, SourceInfo* source) {
    Flow flow;
    const auto& items = section_items(node, "flow");
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto [key, body] = section_entry(items[i], "flow");
        auto kind = parse_endpoint_kind(key);
        if (!kind) {
            throw ParseFailure("unexpected-entry", "flow entries must be 'container:' or 'vm:', got '" + key + "'",
                               items[i].mark);
        }
        const auto path = indexed("flows", i);
        Record rec(*body, "flow entry", path, items[i].mark, source, {"name", "window", "select"}, {"window"});
        FlowSpec spec;
        spec.kind = *kind;
        const auto& name = rec.require("name");
        spec.endpoint = as_string(name);
        if (source != nullptr) {
            source->lines.emplace(path + ".name", name.mark.line);
        }
        std::set<std::string> window_names;
        for (const auto* window : rec.all("window")) {
            const auto wpath = path + '.' + indexed("windows", spec.windows.size());
            spec.windows.push_back(read_window(*window->value, wpath, window->mark, source));
            if (!window_names.insert(spec.windows.back().name).second) {
                throw ParseFailure("duplicate-window",
                                   "window '" + spec.windows.back().name + "' is declared twice for '" +
                                       spec.endpoint + "'",
                                   window->mark);
            }
        }
        if (const auto* select = rec.get("select")) {
            spec.selected_window = as_string(*select);
            if (!window_names.contains(*spec.selected_window)) {
                throw ParseFailure("unknown-selected-window",
                                   "select names '" + *spec.selected_window + "', which is not a window of '" +
                                       spec.endpoint + "'",
                                   select->value->mark);
            }
            if (source != nullptr) {
                source->lines.emplace(path + ".select", select->mark.line);
            }
        }
        flow.push_back(std::move(spec));
    }
    return flow;
}

void check_top_level(const RawNode& document) {
    if (!document.is_null() && !document.is_mapping()) {
        throw ParseFailure("malformed-document", "top level must be a mapping of sections", document.mark);
    }
    static const std::set<std::string_view> sections{"networks", "containers", "vms", "flow"};
    for (const auto& [k, v] : document.entries) {
        if (!sections.contains(k.scalar)) {
            throw ParseFailure("unknown-section", "unknown top-level section '" + k.scalar + "'", k.mark);
        }
    }
}

// --- writer -----------------------------------------------------------------

void write_networks_list(std::ostringstream& out, const std::vector<std::string>& networks, const std::string& indent) {
    out << indent << "- network:\n";
    for (const auto& n : networks) {
        out << indent << "  - " << yaml_scalar(n) << '\n';
    }
}

void write_sizing(std::ostringstream& out, const std::optional<Ipv4Address>& ip, const std::optional<long long>& cpus,
                  const std::optional<long long>& memory) {
    if (ip) {
        out << "    - ip: " << ip->to_string() << '\n';
    }
    if (cpus) {
        out << "    - cpus: " << *cpus << '\n';
    }
    if (memory) {
        out << "    - memory: " << *memory << '\n';
    }
}

void write_flow_section(std::ostringstream& out, const Flow& flow) {
    out << "flow:\n";
    for (const auto& spec : flow) {
        out << "  - " << to_string(spec.kind) << ":\n";
        out << "    - name: " << yaml_scalar(spec.endpoint) << '\n';
        for (const auto& window : spec.windows) {
            out << "    - window:\n";
            out << "      - name: " << yaml_scalar(window.name) << '\n';
            if (window.items.empty()) {
                continue;
            }
            out << "      - commands:\n";
            for (const auto& item : window.items) {
                if (const auto* cmd = std::get_if<Command>(&item)) {
                    out << "        - " << (cmd->fail_fast ? "command-fail-fast" : "command") << ": "
                        << yaml_quoted(cmd->text) << '\n';
                } else {
                    out << "        - split: " << to_string(std::get<Split>(item).direction) << '\n';
                }
            }
        }
        if (spec.selected_window) {
            out << "    - select: " << yaml_scalar(*spec.selected_window) << '\n';
        }
    }
}

} // namespace

Scenario parse_scenario(const RawNode& document) {
    check_top_level(document);
    Scenario s;
    if (const auto* node = document.find("networks")) {
        const auto& items = section_items(*node, "networks");
        for (std::size_t i = 0; i < items.size(); ++i) {
            auto [key, body] = section_entry(items[i], "networks");
            if (key != "network") {
                throw ParseFailure("unexpected-entry", "expected 'network:' entry, got '" + key + "'", items[i].mark);
            }
            s.networks.push_back(read_network(*body, indexed("networks", i), items[i].mark, s.source));
        }
    }
    if (const auto* node = document.find("containers")) {
        const auto& items = section_items(*node, "containers");
        for (std::size_t i = 0; i < items.size(); ++i) {
            auto [key, body] = section_entry(items[i], "containers");
            if (key != "container") {
                throw ParseFailure("unexpected-entry", "expected 'container:' entry, got '" + key + "'", items[i].mark);
            }
            s.containers.push_back(read_container(*body, indexed("containers", i), items[i].mark, s.source));
        }
    }
    if (const auto* node = document.find("vms")) {
        const auto& items = section_items(*node, "vms");
        for (std::size_t i = 0; i < items.size(); ++i) {
            auto [key, body] = section_entry(items[i], "vms");
            if (key != "vm") {
                throw ParseFailure("unexpected-entry", "expected 'vm:' entry, got '" + key + "'", items[i].mark);
            }
            s.vms.push_back(read_vm(*body, indexed("vms", i), items[i].mark, s.source));
        }
    }
    if (const auto* node = document.find("flow")) {
        s.flows = read_flow_section(*node, &s.source);
    }
    return s;
}

Scenario parse_scenario(std::string_view text) {
    return parse_scenario(load_document(text));
}

Flow parse_flow(const RawNode& document) {
    check_top_level(document);
    const auto* node = document.find("flow");
    if (node == nullptr) {
        throw ParseFailure("missing-flow", "document has no 'flow:' section", document.mark);
    }
    return read_flow_section(*node, nullptr);
}

Flow parse_flow(std::string_view text) {
    return parse_flow(load_document(text));
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "networks:\n";
    for (const auto& net : s.networks) {
        out << "  - network:\n";
        out << "    - name: " << yaml_scalar(net.name) << '\n';
        out << "    - driver: " << yaml_scalar(net.driver) << '\n';
        out << "    - internal: " << (net.internal ? "true" : "false") << '\n';
        out << "    - encryption: " << (net.encryption ? "true" : "false") << '\n';
        out << "    - subnet: " << net.subnet.to_string() << '\n';
    }
    out << "containers:\n";
    for (const auto& c : s.containers) {
        out << "  - container:\n";
        out << "    - name: " << yaml_scalar(c.name) << '\n';
        out << "    - modules:\n";
        out << "      - base: " << yaml_scalar(c.base.to_string()) << '\n';
        for (const auto& v : c.volumes) {
            out << "      - volume: " << yaml_scalar(v.to_string()) << '\n';
        }
        if (!c.networks.empty()) {
            write_networks_list(out, c.networks, "      ");
        }
        write_sizing(out, c.ip, c.cpus, c.memory);
        if (c.extra_options) {
            out << "    - extra-options: " << yaml_scalar(*c.extra_options) << '\n';
        }
    }
    if (!s.vms.empty()) {
        out << "vms:\n";
        for (const auto& v : s.vms) {
            out << "  - vm:\n";
            out << "    - name: " << yaml_scalar(v.name) << '\n';
            out << "    - path: " << yaml_scalar(v.path) << '\n';
            for (const auto& n : v.networks) {
                out << "    - network: " << yaml_scalar(n) << '\n';
            }
            write_sizing(out, v.ip, v.cpus, v.memory);
        }
    }
    if (!s.flows.empty()) {
        write_flow_section(out, s.flows);
    }
    return out.str();
}

std::string serialize_flow(const Flow& flow) {
    std::ostringstream out;
    write_flow_section(out, flow);
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseFailure("unreadable-file", "cannot open '" + path + "'", {});
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw ParseFailure("unreadable-file", "cannot read '" + path + "'", {});
    }
    return buf.str();
}

} // namespace alurity
