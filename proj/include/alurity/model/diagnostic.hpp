#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace alurity {

enum class Severity { error, warning };

std::string_view to_string(Severity severity);

struct Diagnostic {
    Severity severity = Severity::error;
    /// Stable short identifier such as `duplicate-ip`.
    std::string code;
    std::string message;
    /// Document path, e.g. `containers[1].ip`.
    std::string location;
    std::optional<int> line;

    bool operator==(const Diagnostic&) const = default;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// `severity code location[:line] message`
std::string format_diagnostic(const Diagnostic& diagnostic);

} // namespace alurity
