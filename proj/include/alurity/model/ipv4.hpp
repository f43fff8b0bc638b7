#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace alurity {

/// IPv4 address held in host byte order.
class Ipv4Address {
public:
    constexpr Ipv4Address() = default;
    constexpr explicit Ipv4Address(std::uint32_t value) : value_(value) {}

    /// Parses dotted-quad text. Leading zeros and out-of-range octets are rejected.
    static std::optional<Ipv4Address> parse(std::string_view text);

    constexpr std::uint32_t value() const { return value_; }
    std::string to_string() const;

    constexpr auto operator<=>(const Ipv4Address&) const = default;

private:
    std::uint32_t value_ = 0;
};

/// An address block in `a.b.c.d/n` form. The base address is kept as written,
/// so a block with host bits set can be represented and reported.
class Ipv4Cidr {
public:
    constexpr Ipv4Cidr() = default;
    constexpr Ipv4Cidr(Ipv4Address base, int prefix) : base_(base), prefix_(prefix) {}

    static std::optional<Ipv4Cidr> parse(std::string_view text);

    constexpr Ipv4Address base() const { return base_; }
    constexpr int prefix() const { return prefix_; }

    std::uint32_t mask() const;
    Ipv4Address network() const { return Ipv4Address{base_.value() & mask()}; }
    Ipv4Address broadcast() const { return Ipv4Address{network().value() | ~mask()}; }
    bool has_host_bits() const { return base_ != network(); }

    bool contains(Ipv4Address addr) const { return (addr.value() & mask()) == network().value(); }
    bool overlaps(const Ipv4Cidr& other) const;

    /// Usable host addresses: everything between network and broadcast.
    std::uint64_t host_count() const;
    Ipv4Address first_host() const { return Ipv4Address{network().value() + 1}; }
    Ipv4Address last_host() const { return Ipv4Address{broadcast().value() - 1}; }

    std::string to_string() const;

    constexpr auto operator<=>(const Ipv4Cidr&) const = default;

private:
    Ipv4Address base_{};
    int prefix_ = 0;
};

} // namespace alurity
