#include "alurity/model/ipv4.hpp"

#include <charconv>

namespace alurity {

std::optional<Ipv4Address> Ipv4Address::parse(std::string_view text) {
    std::uint32_t value = 0;
    const char* pos = text.data();
    const char* end = text.data() + text.size();
    for (int octet = 0; octet < 4; ++octet) {
        if (octet > 0) {
            if (pos == end || *pos != '.') {
                return std::nullopt;
            }
            ++pos;
        }
        const char* start = pos;
        unsigned part = 0;
        auto [next, ec] = std::from_chars(pos, end, part);
        if (ec != std::errc{} || next == start || part > 255) {
            return std::nullopt;
        }
        if (next - start > 1 && *start == '0') {
            return std::nullopt;
        }
        value = (value << 8) | part;
        pos = next;
    }
    if (pos != end) {
        return std::nullopt;
    }
    return Ipv4Address{value};
}

std::string Ipv4Address::to_string() const {
    return std::to_string((value_ >> 24) & 0xff) + '.' + std::to_string((value_ >> 16) & 0xff) + '.' +
           std::to_string((value_ >> 8) & 0xff) + '.' + std::to_string(value_ & 0xff);
}

std::optional<Ipv4Cidr> Ipv4Cidr::parse(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return std::nullopt;
    }
    auto addr = Ipv4Address::parse(text.substr(0, slash));
    if (!addr) {
        return std::nullopt;
    }
    auto digits = text.substr(slash + 1);
    int prefix = -1;
    auto [next, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), prefix);
    if (ec != std::errc{} || next != digits.data() + digits.size() || digits.empty() || prefix < 0 ||
        prefix > 32 || (digits.size() > 1 && digits.front() == '0')) {
        return std::nullopt;
    }
    return Ipv4Cidr{*addr, prefix};
}

std::uint32_t Ipv4Cidr::mask() const {
    return prefix_ == 0 ? 0u : ~std::uint32_t{0} << (32 - prefix_);
}

bool Ipv4Cidr::overlaps(const Ipv4Cidr& other) const {
    const auto shorter = prefix_ < other.prefix_ ? *this : other;
    const auto longer = prefix_ < other.prefix_ ? other : *this;
    return shorter.contains(longer.network());
}

std::uint64_t Ipv4Cidr::host_count() const {
    const std::uint64_t block = std::uint64_t{1} << (32 - prefix_);
    return block >= 2 ? block - 2 : 0;
}

std::string Ipv4Cidr::to_string() const {
    return base_.to_string() + '/' + std::to_string(prefix_);
}

} // namespace alurity
