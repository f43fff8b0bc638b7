#include "alurity/toolreg/registry.hpp"

#include <filesystem>
#include <set>
#include <regex>

#include "alurity/parser/raw_node.hpp"
#include "alurity/parser/scenario_parser.hpp"

namespace alurity::toolreg {

namespace {

const std::vector<std::string_view> kSeverities{"none", "low", "medium", "high", "critical"};

std::string scalar_at(const RawNode& node, std::string_view key, const std::string& fallback = {}) {
    const auto* value = node.find(key);
    if (value == nullptr || value->is_null()) {
        return fallback;
    }
    if (!value->is_scalar()) {
        throw RegistryError("line " + std::to_string(value->mark.line) + ": '" + std::string(key) +
                            "' must be a single value");
    }
    return value->scalar;
}

std::vector<std::string> list_at(const RawNode& node, std::string_view key) {
    std::vector<std::string> out;
    const auto* value = node.find(key);
    if (value == nullptr || value->is_null()) {
        return out;
    }
    if (value->is_scalar()) {
        out.push_back(value->scalar);
        return out;
    }
    for (const auto& item : value->items) {
        if (!item.is_scalar()) {
            throw RegistryError("line " + std::to_string(item.mark.line) + ": '" + std::string(key) +
                                "' must list plain values");
        }
        out.push_back(item.scalar);
    }
    return out;
}

ExtractionRule read_rule(const RawNode& node) {
    if (!node.is_mapping()) {
        throw RegistryError("line " + std::to_string(node.mark.line) + ": extraction rule must be a mapping");
    }
    ExtractionRule rule;
    rule.id = scalar_at(node, "id");
    rule.pattern = scalar_at(node, "pattern");
    rule.fields = list_at(node, "fields");
    rule.title = scalar_at(node, "title");
    rule.flaw_class = scalar_at(node, "flaw-class");
    rule.severity = scalar_at(node, "severity", "medium");
    rule.description = scalar_at(node, "description");
    if (const auto* vendor = node.find("vendor"); vendor != nullptr && vendor->is_scalar()) {
        rule.vendor = vendor->scalar;
    }
    const auto where = "line " + std::to_string(node.mark.line) + ": rule '" + rule.id + "'";
    if (rule.id.empty() || rule.pattern.empty() || rule.title.empty() || rule.flaw_class.empty()) {
        throw RegistryError(where + " needs id, pattern, title and flaw-class");
    }
    if (std::find(kSeverities.begin(), kSeverities.end(), rule.severity) == kSeverities.end()) {
        throw RegistryError(where + " has unknown severity '" + rule.severity + "'");
    }
    try {
        std::regex compiled(rule.pattern);
        if (compiled.mark_count() < rule.fields.size()) {
            throw RegistryError(where + " names more fields than its pattern captures");
        }
    } catch (const std::regex_error& e) {
        throw RegistryError(where + " has an invalid pattern: " + e.what());
    }
    return rule;
}

std::vector<ExtractionRule> read_rules(const RawNode& node) {
    std::vector<ExtractionRule> rules;
    if (node.is_null()) {
        return rules;
    }
    if (!node.is_sequence()) {
        throw RegistryError("line " + std::to_string(node.mark.line) + ": rules must be a list");
    }
    for (const auto& item : node.items) {
        rules.push_back(read_rule(item));
    }
    return rules;
}

} // namespace

std::string default_tool_name(const ModuleRef& ref) {
    std::string leaf{ref.leaf()};
    for (const auto& [prefix, group] : GroupPrefixTable::builtin().entries()) {
        if (leaf.starts_with(prefix) && leaf.size() > prefix.size()) {
            return leaf.substr(prefix.size());
        }
    }
    return leaf;
}

RegistryIndex RegistryIndex::load_file(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const ParseFailure& e) {
        throw RegistryError(e.detail());
    }
    const auto dir = std::filesystem::path(path).parent_path();
    return parse(text, dir.empty() ? "." : dir.string());
}

RegistryIndex RegistryIndex::parse(std::string_view text, const std::string& base_dir) {
    RawNode doc;
    try {
        doc = load_document(text);
    } catch (const ParseFailure& e) {
        throw RegistryError(std::string("registry index: ") + e.what());
    }
    RegistryIndex index;
    if (doc.is_null()) {
        return index;
    }
    if (!doc.is_mapping()) {
        throw RegistryError("registry index must map module references to manifests");
    }
    for (const auto& [key, body] : doc.entries) {
        auto ref = ModuleRef::parse(key.scalar);
        if (!ref || ref->to_string() != key.scalar) {
            throw RegistryError("line " + std::to_string(key.mark.line) + ": '" + key.scalar +
                                "' is not a canonical module reference");
        }
        ModuleManifest manifest;
        manifest.group = classify(*ref);
        if (!body.is_null() && !body.is_mapping()) {
            throw RegistryError("line " + std::to_string(body.mark.line) + ": manifest must be a mapping");
        }
        for (const auto& [field, value] : body.entries) {
            static const std::set<std::string> known{"group", "tools", "entrypoint", "rules", "rules-file"};
            if (!known.contains(field.scalar)) {
                throw RegistryError("line " + std::to_string(field.mark.line) + ": unknown manifest key '" +
                                    field.scalar + "'");
            }
        }
        if (auto group = scalar_at(body, "group"); !group.empty()) {
            auto parsed = parse_module_group(group);
            if (!parsed) {
                throw RegistryError("line " + std::to_string(body.mark.line) + ": unknown group '" + group + "'");
            }
            manifest.group = *parsed;
        }
        manifest.tools = list_at(body, "tools");
        manifest.entrypoint = scalar_at(body, "entrypoint");
        if (const auto* rules = body.find("rules")) {
            manifest.rules = read_rules(*rules);
        }
        if (auto file = scalar_at(body, "rules-file"); !file.empty()) {
            auto path = std::filesystem::path(base_dir) / file;
            std::string text;
            try {
                text = read_text_file(path.string());
                auto extra = read_rules(load_document(text));
                manifest.rules.insert(manifest.rules.end(), extra.begin(), extra.end());
            } catch (const ParseFailure& e) {
                throw RegistryError("rules file '" + path.string() + "': " + e.what());
            }
        }
        index.add(*ref, std::move(manifest));
    }
    return index;
}

RegistryIndex RegistryIndex::permissive() {
    RegistryIndex index;
    index.permissive_ = true;
    return index;
}

void RegistryIndex::add(const ModuleRef& ref, ModuleManifest manifest) {
    manifests_[ref.to_string()] = std::move(manifest);
}

const ModuleManifest* RegistryIndex::find(const ModuleRef& ref) const {
    auto it = manifests_.find(ref.to_string());
    return it == manifests_.end() ? nullptr : &it->second;
}

ModuleManifest RegistryIndex::lookup(const ModuleRef& ref) const {
    if (const auto* manifest = find(ref)) {
        return *manifest;
    }
    if (!permissive_) {
        throw UnknownModule(ref.to_string());
    }
    ModuleManifest synthesized;
    synthesized.group = classify(ref);
    synthesized.tools = {default_tool_name(ref)};
    synthesized.entrypoint = default_tool_name(ref);
    return synthesized;
}

ModuleGroup classify(const ModuleRef& ref, const GroupPrefixTable& table) {
    return ref.group(table);
}

ComposedImage resolve(const ContainerSpec& container, const RegistryIndex& index) {
    ComposedImage image;
    image.base = container.base;
    image.overlays = container.volumes;

    std::vector<const ModuleRef*> layers{&container.base};
    for (const auto& v : container.volumes) {
        layers.push_back(&v);
    }
    for (const auto* layer : layers) {
        const auto manifest = index.lookup(*layer);
        for (const auto& tool : manifest.tools) {
            image.provides.insert_or_assign(tool, *layer);
        }
        if (!manifest.entrypoint.empty()) {
            image.entrypoint = manifest.entrypoint;
        }
    }
    return image;
}

} // namespace alurity::toolreg
