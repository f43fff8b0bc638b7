#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace alurity {

/// 1-based position in a source document.
struct SourceMark {
    int line = 0;
    int column = 0;

    bool operator==(const SourceMark&) const = default;
};

/// Raised for any document that cannot be read into the model.
class ParseFailure : public std::runtime_error {
public:
    ParseFailure(std::string code, std::string message, SourceMark mark);

    const std::string& code() const { return code_; }
    const std::string& detail() const { return detail_; }
    const SourceMark& mark() const { return mark_; }

private:
    std::string code_;
    std::string detail_;
    SourceMark mark_;
};

/// Generic located document tree. Mapping entries keep document order.
struct RawNode {
    enum class Kind { null, scalar, sequence, mapping };

    Kind kind = Kind::null;
    std::string scalar;
    /// Scalar was written with quotes, so it is always a string.
    bool quoted = false;
    SourceMark mark;
    std::vector<RawNode> items;
    std::vector<std::pair<RawNode, RawNode>> entries;

    bool is_null() const { return kind == Kind::null; }
    bool is_scalar() const { return kind == Kind::scalar; }
    bool is_sequence() const { return kind == Kind::sequence; }
    bool is_mapping() const { return kind == Kind::mapping; }

    /// First value under `key` in a mapping, or nullptr.
    const RawNode* find(std::string_view key) const;
};

/// Reads one YAML document. Multi-document streams are rejected.
RawNode load_document(std::string_view text);

/// Emits a scalar plainly when YAML would read it back as the same string,
/// double-quoted otherwise.
std::string yaml_scalar(std::string_view text);
std::string yaml_quoted(std::string_view text);

} // namespace alurity
