#include "alurity/model/module_ref.hpp"

#include <algorithm>
#include <array>

namespace alurity {

namespace {

constexpr std::array<std::pair<ModuleGroup, std::string_view>, 8> kGroupNames{{
    {ModuleGroup::robots, "robots"},
    {ModuleGroup::robot_components, "robot-components"},
    {ModuleGroup::forensics, "forensics"},
    {ModuleGroup::exploitation, "exploitation"},
    {ModuleGroup::testing, "testing"},
    {ModuleGroup::reconnaissance, "reconnaissance"},
    {ModuleGroup::ide_ui, "ide-ui"},
    {ModuleGroup::unknown, "unknown"},
}};

bool has_forbidden_char(std::string_view text) {
    return std::any_of(text.begin(), text.end(), [](unsigned char c) { return c <= ' ' || c == 0x7f; });
}

} // namespace

std::string_view to_string(ModuleGroup group) {
    for (const auto& [g, name] : kGroupNames) {
        if (g == group) {
            return name;
        }
    }
    return "unknown";
}

std::optional<ModuleGroup> parse_module_group(std::string_view text) {
    for (const auto& [g, name] : kGroupNames) {
        if (name == text) {
            return g;
        }
    }
    return std::nullopt;
}

const GroupPrefixTable& GroupPrefixTable::builtin() {
    // forensics, testing and ide-ui prefixes are provisional.
    static const GroupPrefixTable table{{
        {"robo_", ModuleGroup::robots},
        {"comp_", ModuleGroup::robot_components},
        {"fore_", ModuleGroup::forensics},
        {"expl_", ModuleGroup::exploitation},
        {"test_", ModuleGroup::testing},
        {"reco_", ModuleGroup::reconnaissance},
        {"deve_", ModuleGroup::ide_ui},
        {"ide_", ModuleGroup::ide_ui},
    }};
    return table;
}

ModuleGroup GroupPrefixTable::lookup(std::string_view component) const {
    for (const auto& [prefix, group] : entries_) {
        if (component.starts_with(prefix)) {
            return group;
        }
    }
    return ModuleGroup::unknown;
}

std::optional<ModuleRef> ModuleRef::parse(std::string_view text) {
    if (text.empty() || has_forbidden_char(text)) {
        return std::nullopt;
    }
    ModuleRef ref;
    auto rest = text;
    if (auto slash = rest.find('/'); slash != std::string_view::npos) {
        ref.registry = std::string(rest.substr(0, slash));
        rest.remove_prefix(slash + 1);
        if (ref.registry.empty()) {
            return std::nullopt;
        }
    }
    const auto last_slash = rest.rfind('/');
    const auto colon = rest.rfind(':');
    if (colon != std::string_view::npos && (last_slash == std::string_view::npos || colon > last_slash)) {
        ref.tag = std::string(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
        if (ref.tag.empty()) {
            return std::nullopt;
        }
    }
    if (rest.empty() || rest.front() == '/' || rest.back() == '/' || rest.find("//") != std::string_view::npos) {
        return std::nullopt;
    }
    ref.path = std::string(rest);
    return ref;
}

std::string ModuleRef::to_string() const {
    std::string out;
    if (!registry.empty()) {
        out += registry;
        out += '/';
    }
    out += path;
    if (!tag.empty()) {
        out += ':';
        out += tag;
    }
    return out;
}

std::string_view ModuleRef::leaf() const {
    std::string_view p = path;
    auto slash = p.rfind('/');
    return slash == std::string_view::npos ? p : p.substr(slash + 1);
}

ModuleGroup ModuleRef::group(const GroupPrefixTable& table) const {
    return table.lookup(leaf());
}

} // namespace alurity
