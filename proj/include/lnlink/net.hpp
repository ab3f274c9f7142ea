#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lnlink/model.hpp"

namespace lnlink {

// 16-byte address; IPv4 is stored v4-mapped (::ffff:a.b.c.d).
using IpBytes = std::array<std::uint8_t, 16>;

std::optional<IpBytes> parse_ip(const std::string& host);

// Strips :port (and brackets for IPv6) and classifies the host.
NetAddress normalize_net_address(const std::string& raw);

// Loopback, private, link-local, CGN, multicast and other special-purpose
// ranges, which never identify a hosting operator.
bool is_reserved_ip(const std::string& host);

// Hosts usable as clustering/ASN evidence: public ipv4/ipv6 only.
std::vector<std::string> public_hosts(const NodeRecord& node);
std::vector<std::string> onion_hosts(const NodeRecord& node);

// Longest-prefix CIDR -> ASN table, loaded from "cidr_prefix,asn" CSV rows.
class AsnMap {
public:
    void add_prefix(const std::string& cidr, std::uint32_t asn);
    std::optional<std::uint32_t> lookup(const std::string& host) const;
    std::size_t size() const { return prefixes_.size(); }

private:
    struct Prefix {
        IpBytes bytes;
        int bits;  // prefix length in the 128-bit space
        std::uint32_t asn;
    };
    std::vector<Prefix> prefixes_;
};

}  // namespace lnlink
