#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "alurity/model/module_ref.hpp"
#include "alurity/model/scenario.hpp"

namespace alurity::toolreg {

/// Turns one line of tool output into a finding. `pattern` is an ECMAScript
/// regex searched per output line; capture groups are bound, in order, to the
/// names in `fields`. Text templates may reference `{name}` for any bound
/// field, plus `{line}`, `{tool}` and `{target}`.
struct ExtractionRule {
    std::string id;
    std::string pattern;
    std::vector<std::string> fields;
    std::string title;
    std::string flaw_class;
    std::string severity = "medium";
    std::string description;
    std::optional<std::string> vendor;

    bool operator==(const ExtractionRule&) const = default;
};

struct ModuleManifest {
    ModuleGroup group = ModuleGroup::unknown;
    std::vector<std::string> tools;
    /// Command line; `{target}` is replaced by the target address when run by a pipeline.
    std::string entrypoint;
    std::vector<ExtractionRule> rules;

    bool operator==(const ModuleManifest&) const = default;
};

class UnknownModule : public std::runtime_error {
public:
    explicit UnknownModule(std::string ref)
        : std::runtime_error("module '" + ref + "' is not in the registry index"), ref_(std::move(ref)) {}

    const std::string& ref() const { return ref_; }

private:
    std::string ref_;
};

class RegistryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Local stand-in for a module registry, keyed by canonical `registry/path:tag` text.
class RegistryIndex {
public:
    RegistryIndex() = default;

    /// Reads an index file. `rules-file` entries are resolved relative to it.
    static RegistryIndex load_file(const std::string& path);
    static RegistryIndex parse(std::string_view text, const std::string& base_dir = ".");

    /// An index that answers every lookup, synthesizing a manifest for refs it
    /// does not hold from the ref's name and group prefix.
    static RegistryIndex permissive();

    void add(const ModuleRef& ref, ModuleManifest manifest);

    const ModuleManifest* find(const ModuleRef& ref) const;
    /// Throws UnknownModule unless the index holds `ref` or is permissive.
    ModuleManifest lookup(const ModuleRef& ref) const;

    bool is_permissive() const { return permissive_; }
    std::size_t size() const { return manifests_.size(); }

private:
    std::map<std::string, ModuleManifest> manifests_;
    bool permissive_ = false;
};

/// A base module with overlays applied in declaration order.
struct ComposedImage {
    ModuleRef base;
    std::vector<ModuleRef> overlays;
    /// Entrypoint of the topmost layer that declares one.
    std::string entrypoint;
    /// Tool name to the layer providing it; later layers shadow earlier ones.
    std::map<std::string, ModuleRef> provides;

    bool provides_tool(std::string_view tool) const { return provides.find(std::string(tool)) != provides.end(); }

    bool operator==(const ComposedImage&) const = default;
};

ModuleGroup classify(const ModuleRef& ref, const GroupPrefixTable& table = GroupPrefixTable::builtin());

/// Throws UnknownModule naming the first missing reference.
ComposedImage resolve(const ContainerSpec& container, const RegistryIndex& index);

/// Name a tool is known by when a manifest does not say, e.g. `aztarna` for `reco_aztarna`.
std::string default_tool_name(const ModuleRef& ref);

} // namespace alurity::toolreg
