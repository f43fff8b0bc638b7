#include "alurity/netplan/addressing.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "alurity/model/errors.hpp"
#include "alurity/model/validate.hpp"

namespace alurity::netplan {

std::optional<Ipv4Address> AddressAssignment::address_of(std::string_view endpoint, std::string_view network) const {
    for (const auto& a : attachments) {
        if (a.endpoint == endpoint && a.network == network) {
            return a.address;
        }
    }
    return std::nullopt;
}

std::optional<Ipv4Address> AddressAssignment::gateway_of(std::string_view network) const {
    for (const auto& g : gateways) {
        if (g.network == network) {
            return g.address;
        }
    }
    return std::nullopt;
}

std::vector<Attachment> AddressAssignment::attachments_of(std::string_view endpoint) const {
    std::vector<Attachment> out;
    std::copy_if(attachments.begin(), attachments.end(), std::back_inserter(out),
                 [&](const Attachment& a) { return a.endpoint == endpoint; });
    return out;
}

bool AddressAssignment::has_endpoint(std::string_view name) const {
    return std::any_of(endpoints.begin(), endpoints.end(), [&](const EndpointRef& e) { return e.name == name; });
}

AddressAssignment allocate_addresses(const Scenario& scenario) {
    if (has_errors(validate(scenario))) {
        throw PreconditionError("cannot allocate addresses for a scenario with validation errors");
    }

    AddressAssignment out;
    out.endpoints = endpoints(scenario);

    std::map<std::pair<std::string, std::string>, Ipv4Address> chosen;
    for (const auto& net : scenario.networks) {
        const auto gateway = net.subnet.first_host();
        out.gateways.push_back({net.name, net.subnet, gateway});

        std::vector<const EndpointRef*> members;
        std::set<std::uint32_t> taken{gateway.value()};
        for (const auto& ep : out.endpoints) {
            const auto& nets = *scenario.networks_of(ep.name);
            if (std::find(nets.begin(), nets.end(), net.name) == nets.end()) {
                continue;
            }
            members.push_back(&ep);
            if (auto ip = scenario.declared_ip(ep.name); ip && net.subnet.contains(*ip)) {
                taken.insert(ip->value());
            }
        }
        if (net.subnet.host_count() < members.size() + 1) {
            throw AllocationFailure(net.name, "subnet " + net.subnet.to_string() + " of '" + net.name + "' has " +
                                                  std::to_string(net.subnet.host_count()) +
                                                  " host addresses but needs " + std::to_string(members.size() + 1) +
                                                  " (endpoints plus gateway)");
        }

        std::uint32_t cursor = gateway.value() + 1;
        for (const auto* ep : members) {
            if (auto ip = scenario.declared_ip(ep->name); ip && net.subnet.contains(*ip)) {
                chosen[{ep->name, net.name}] = *ip;
                continue;
            }
            while (taken.contains(cursor)) {
                ++cursor;
            }
            taken.insert(cursor);
            chosen[{ep->name, net.name}] = Ipv4Address{cursor};
        }
    }

    for (const auto& ep : out.endpoints) {
        for (const auto& net : *scenario.networks_of(ep.name)) {
            out.attachments.push_back({ep.name, net, chosen.at({ep.name, net})});
        }
    }
    return out;
}

} // namespace alurity::netplan
