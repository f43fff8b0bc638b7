#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace alurity {

/// Tool groups a module can belong to, plus `unknown` for unmapped prefixes.
enum class ModuleGroup {
    robots,
    robot_components,
    forensics,
    exploitation,
    testing,
    reconnaissance,
    ide_ui,
    unknown,
};

std::string_view to_string(ModuleGroup group);
std::optional<ModuleGroup> parse_module_group(std::string_view text);

/// Ordered (prefix, group) pairs. The first matching prefix wins.
class GroupPrefixTable {
public:
    GroupPrefixTable() = default;
    explicit GroupPrefixTable(std::vector<std::pair<std::string, ModuleGroup>> entries)
        : entries_(std::move(entries)) {}

    /// The embedded default table.
    static const GroupPrefixTable& builtin();

    ModuleGroup lookup(std::string_view component) const;
    const std::vector<std::pair<std::string, ModuleGroup>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, ModuleGroup>> entries_;
};

/// A tool module reference of the form `registry/path:tag`.
///
/// The registry is the text before the first `/` and may be empty when the
/// reference has no `/`. The tag follows the last `:` of the final path
/// component and may be absent. Printing a parsed reference reproduces its
/// input exactly.
struct ModuleRef {
    std::string registry;
    std::string path;
    std::string tag;

    static std::optional<ModuleRef> parse(std::string_view text);

    std::string to_string() const;
    /// Final path component, e.g. `reco_aztarna`.
    std::string_view leaf() const;
    ModuleGroup group(const GroupPrefixTable& table = GroupPrefixTable::builtin()) const;

    bool operator==(const ModuleRef&) const = default;
};

} // namespace alurity
