#include "lnlink/net.hpp"

#include <algorithm>
#include <cstdlib>

#include "lnlink/error.hpp"
#include "lnlink/util.hpp"

namespace lnlink {

namespace {

std::optional<IpBytes> parse_ipv4(const std::string& host) {
    IpBytes out{};
    out[10] = 0xff;
    out[11] = 0xff;
    auto parts = split(host, '.');
    if (parts.size() != 4) return std::nullopt;
    for (std::size_t i = 0; i < 4; ++i) {
        if (parts[i].empty() || parts[i].size() > 3) return std::nullopt;
        long v = 0;
        for (char c : parts[i]) {
            if (c < '0' || c > '9') return std::nullopt;
            v = v * 10 + (c - '0');
        }
        if (v > 255) return std::nullopt;
        out[12 + i] = static_cast<std::uint8_t>(v);
    }
    return out;
}

std::optional<IpBytes> parse_ipv6(const std::string& host) {
    // Hex groups with at most one "::" elision.
    std::vector<std::uint16_t> head, tail;
    bool elided = false;
    std::string s = host;
    auto gap = s.find("::");
    std::string left = gap == std::string::npos ? s : s.substr(0, gap);
    std::string right = gap == std::string::npos ? "" : s.substr(gap + 2);
    if (gap != std::string::npos) elided = true;

    auto parse_groups = [](const std::string& part, std::vector<std::uint16_t>& out) -> bool {
        if (part.empty()) return true;
        for (const std::string& g : split(part, ':')) {
            if (g.empty() || g.size() > 4) return false;
            std::uint32_t v = 0;
            for (char c : g) {
                int d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else return false;
                v = v * 16 + static_cast<std::uint32_t>(d);
            }
            out.push_back(static_cast<std::uint16_t>(v));
        }
        return true;
    };
    if (!parse_groups(left, head) || !parse_groups(right, tail)) return std::nullopt;
    const std::size_t total = head.size() + tail.size();
    if (elided ? total > 7 : total != 8) return std::nullopt;

    std::vector<std::uint16_t> groups = head;
    groups.insert(groups.end(), 8 - total, 0);
    groups.insert(groups.end(), tail.begin(), tail.end());
    IpBytes out{};
    for (std::size_t i = 0; i < 8; ++i) {
        out[2 * i] = static_cast<std::uint8_t>(groups[i] >> 8);
        out[2 * i + 1] = static_cast<std::uint8_t>(groups[i] & 0xff);
    }
    return out;
}

bool prefix_matches(const IpBytes& addr, const IpBytes& prefix, int bits) {
    int full = bits / 8;
    for (int i = 0; i < full; ++i)
        if (addr[i] != prefix[i]) return false;
    const int rem = bits % 8;
    if (rem == 0) return true;
    const std::uint8_t mask = static_cast<std::uint8_t>(0xff << (8 - rem));
    return (addr[full] & mask) == (prefix[full] & mask);
}

bool in_cidr(const std::string& host, const char* cidr) {
    auto addr = parse_ip(host);
    if (!addr) return false;
    const std::string spec(cidr);
    const auto slash = spec.find('/');
    auto base = parse_ip(spec.substr(0, slash));
    if (!base) return false;
    int bits = std::atoi(spec.c_str() + slash + 1);
    if (spec.find(':') == std::string::npos) bits += 96;  // v4-mapped offset
    return prefix_matches(*addr, *base, bits);
}

}  // namespace

std::optional<IpBytes> parse_ip(const std::string& host) {
    if (host.find(':') != std::string::npos) return parse_ipv6(host);
    return parse_ipv4(host);
}

NetAddress normalize_net_address(const std::string& raw) {
    std::string host = raw;
    if (!host.empty() && host.front() == '[') {
        const auto close = host.find(']');
        host = close == std::string::npos ? host.substr(1) : host.substr(1, close - 1);
        return NetAddress{host, NetAddrKind::ipv6};
    }
    // host:port only when there is exactly one colon (IPv6 uses several).
    const auto first = host.find(':');
    const auto last = host.rfind(':');
    if (first != std::string::npos && first == last) host = host.substr(0, first);

    if (host.size() > 6 && host.compare(host.size() - 6, 6, ".onion") == 0)
        return NetAddress{host, NetAddrKind::onion};
    if (host.find(':') != std::string::npos) return NetAddress{host, NetAddrKind::ipv6};
    return NetAddress{host, NetAddrKind::ipv4};
}

bool is_reserved_ip(const std::string& host) {
    static const char* kRanges[] = {
        "0.0.0.0/8",      "10.0.0.0/8",     "100.64.0.0/10", "127.0.0.0/8",
        "169.254.0.0/16", "172.16.0.0/12",  "192.168.0.0/16", "198.18.0.0/15",
        "224.0.0.0/4",    "240.0.0.0/4",    "::1/128",        "fc00::/7",
        "fe80::/10",      "ff00::/8",
    };
    if (!parse_ip(host)) return true;  // unparsable hosts carry no evidence
    for (const char* r : kRanges)
        if (in_cidr(host, r)) return true;
    return false;
}

std::vector<std::string> public_hosts(const NodeRecord& node) {
    std::vector<std::string> out;
    for (const NetAddress& a : node.net_addresses) {
        if (a.kind == NetAddrKind::onion) continue;
        if (is_reserved_ip(a.host)) continue;
        if (std::find(out.begin(), out.end(), a.host) == out.end()) out.push_back(a.host);
    }
    return out;
}

std::vector<std::string> onion_hosts(const NodeRecord& node) {
    std::vector<std::string> out;
    for (const NetAddress& a : node.net_addresses) {
        if (a.kind != NetAddrKind::onion) continue;
        if (std::find(out.begin(), out.end(), a.host) == out.end()) out.push_back(a.host);
    }
    return out;
}

void AsnMap::add_prefix(const std::string& cidr, std::uint32_t asn) {
    const auto slash = cidr.find('/');
    if (slash == std::string::npos) throw Error("parse-error", "CIDR without prefix length: " + cidr);
    auto base = parse_ip(cidr.substr(0, slash));
    if (!base) throw Error("parse-error", "unparsable CIDR base: " + cidr);
    int bits = std::atoi(cidr.c_str() + slash + 1);
    if (bits < 0 || bits > 128) throw Error("parse-error", "bad prefix length: " + cidr);
    if (cidr.find(':') == std::string::npos) bits += 96;
    prefixes_.push_back(Prefix{*base, bits, asn});
    std::stable_sort(prefixes_.begin(), prefixes_.end(),
                     [](const Prefix& a, const Prefix& b) { return a.bits > b.bits; });
}

std::optional<std::uint32_t> AsnMap::lookup(const std::string& host) const {
    auto addr = parse_ip(host);
    if (!addr) return std::nullopt;
    for (const Prefix& p : prefixes_)  // sorted longest prefix first
        if (prefix_matches(*addr, p.bytes, p.bits)) return p.asn;
    return std::nullopt;
}

}  // namespace lnlink
