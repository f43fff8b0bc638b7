#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alurity/model/scenario.hpp"

namespace alurity::netplan {

struct Attachment {
    std::string endpoint;
    std::string network;
    Ipv4Address address;

    bool operator==(const Attachment&) const = default;
};

struct Gateway {
    std::string network;
    Ipv4Cidr subnet;
    Ipv4Address address;

    bool operator==(const Gateway&) const = default;
};

/// Address of every (endpoint, network) attachment plus one gateway per network.
struct AddressAssignment {
    /// Every endpoint of the scenario in `endpoints()` order, attached or not.
    std::vector<EndpointRef> endpoints;
    /// Declaration order of the networks.
    std::vector<Gateway> gateways;
    /// Ordered by endpoint, then by the endpoint's attachment order.
    std::vector<Attachment> attachments;

    std::optional<Ipv4Address> address_of(std::string_view endpoint, std::string_view network) const;
    std::optional<Ipv4Address> gateway_of(std::string_view network) const;
    std::vector<Attachment> attachments_of(std::string_view endpoint) const;
    bool has_endpoint(std::string_view name) const;

    bool operator==(const AddressAssignment&) const = default;
};

class AllocationFailure : public std::runtime_error {
public:
    AllocationFailure(std::string network, const std::string& message)
        : std::runtime_error(message), network_(std::move(network)) {}

    const std::string& network() const { return network_; }

private:
    std::string network_;
};

/// Gateways take the lowest host address of each subnet. Declared addresses
/// are kept verbatim; every other attachment receives the lowest free host
/// address above the gateway, visiting endpoints in `endpoints()` order.
///
/// Throws PreconditionError when `scenario` does not validate, and
/// AllocationFailure when a subnet cannot hold its endpoints plus gateway.
AddressAssignment allocate_addresses(const Scenario& scenario);

} // namespace alurity::netplan
