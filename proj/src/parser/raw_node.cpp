#include "alurity/parser/raw_node.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <regex>
#include <set>

namespace alurity {

namespace {

SourceMark to_mark(const YAML::Mark& mark) {
    if (mark.is_null()) {
        return {};
    }
    return {mark.line + 1, mark.column + 1};
}

RawNode convert(const YAML::Node& node) {
    RawNode out;
    out.mark = to_mark(node.Mark());
    switch (node.Type()) {
    case YAML::NodeType::Scalar:
        out.kind = RawNode::Kind::scalar;
        out.scalar = node.Scalar();
        out.quoted = node.Tag() == "!";
        break;
    case YAML::NodeType::Sequence:
        out.kind = RawNode::Kind::sequence;
        for (const auto& child : node) {
            out.items.push_back(convert(child));
        }
        break;
    case YAML::NodeType::Map: {
        out.kind = RawNode::Kind::mapping;
        std::set<std::string> keys;
        for (const auto& kv : node) {
            RawNode key = convert(kv.first);
            if (!key.is_scalar()) {
                throw ParseFailure("malformed-yaml", "mapping keys must be scalars", key.mark);
            }
            if (!keys.insert(key.scalar).second) {
                throw ParseFailure("repeated-key", "key '" + key.scalar + "' appears twice in one mapping", key.mark);
            }
            out.entries.emplace_back(std::move(key), convert(kv.second));
        }
        break;
    }
    default:
        out.kind = RawNode::Kind::null;
        break;
    }
    return out;
}

} // namespace

ParseFailure::ParseFailure(std::string code, std::string message, SourceMark mark)
    : std::runtime_error(std::to_string(mark.line) + ":" + std::to_string(mark.column) + ": " + code + ": " + message),
      code_(std::move(code)), detail_(std::move(message)), mark_(mark) {}

const RawNode* RawNode::find(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k.scalar == key) {
            return &v;
        }
    }
    return nullptr;
}

RawNode load_document(std::string_view text) {
    std::vector<YAML::Node> docs;
    try {
        docs = YAML::LoadAll(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ParseFailure("malformed-yaml", e.msg, to_mark(e.mark));
    }
    if (docs.size() > 1) {
        throw ParseFailure("multi-document", "only single-document files are supported", to_mark(docs[1].Mark()));
    }
    if (docs.empty()) {
        return RawNode{};
    }
    return convert(docs.front());
}

std::string yaml_quoted(std::string_view text) {
    std::string out = "\"";
    for (unsigned char c : text) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (c < 0x20 || c == 0x7f) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\x%02x", c);
                out += buf;
            } else {
                out += static_cast<char>(c);
            }
        }
    }
    out += '"';
    return out;
}

std::string yaml_scalar(std::string_view text) {
    static const std::regex reserved{
        R"(^(~|null|Null|NULL|true|True|TRUE|false|False|FALSE|yes|Yes|YES|no|No|NO|on|On|ON|off|Off|OFF|y|Y|n|N)$)"};
    static const std::regex numeric{
        R"(^[-+]?(\.[0-9]+|[0-9][0-9_]*(\.[0-9_]*)?)([eE][-+]?[0-9]+)?$|^[-+]?\.(inf|Inf|INF)$|^\.(nan|NaN|NAN)$)"
        R"(|^0x[0-9a-fA-F]+$|^0o[0-7]+$|^[-+]?[0-9][0-9_]*(:[0-5]?[0-9])+(\.[0-9_]*)?$)"};
    if (text.empty() || text.front() == ' ' || text.back() == ' ' || text.back() == ':') {
        return yaml_quoted(text);
    }
    if (std::string_view{"-?:,[]{}#&*!|>'\"%@`"}.find(text.front()) != std::string_view::npos) {
        return yaml_quoted(text);
    }
    for (unsigned char c : text) {
        if (c < 0x20 || c == 0x7f) {
            return yaml_quoted(text);
        }
    }
    if (text.find(": ") != std::string_view::npos || text.find(" #") != std::string_view::npos ||
        text.find(":\t") != std::string_view::npos) {
        return yaml_quoted(text);
    }
    const std::string s{text};
    if (std::regex_search(s, reserved) || std::regex_search(s, numeric)) {
        return yaml_quoted(text);
    }
    return s;
}

} // namespace alurity
