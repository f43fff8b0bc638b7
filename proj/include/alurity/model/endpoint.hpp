#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace alurity {

/// Containers are simulated endpoints, VMs emulated ones.
enum class EndpointKind { container, vm };

std::string_view to_string(EndpointKind kind);
std::optional<EndpointKind> parse_endpoint_kind(std::string_view text);

struct EndpointRef {
    std::string name;
    EndpointKind kind = EndpointKind::container;

    bool operator==(const EndpointRef&) const = default;
};

} // namespace alurity
