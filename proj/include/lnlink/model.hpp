#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lnlink/error.hpp"

namespace lnlink {

enum class ScriptKind { single_sig, multi_sig, other };

struct Address {
    std::string id;
    ScriptKind script_kind = ScriptKind::single_sig;
};

struct TxInput {
    std::string address;
    std::int64_t value_sat = 0;
};

struct TxOutput {
    std::string address;
    std::int64_t value_sat = 0;
    ScriptKind script = ScriptKind::single_sig;
};

// Ledger row. Output index is the position in `outputs`.
struct Transaction {
    std::string txid;
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;
    std::int64_t timestamp = 0;
    std::int64_t height = 0;
    bool is_coinjoin = false;
    bool is_punishment = false;
};

enum class ServiceCategory { exchange, mixer, hosted_wallet, other_service };

// A set of addresses attributed to one controller by co-spend closure.
struct Entity {
    std::int64_t entity_id = -1;
    std::set<std::string> addresses;
    std::optional<ServiceCategory> service_category;
};

enum class NetAddrKind { ipv4, ipv6, onion };

struct NetAddress {
    std::string host;  // port already stripped
    NetAddrKind kind = NetAddrKind::ipv4;

    bool operator==(const NetAddress&) const = default;
};

struct NodeRecord {
    std::string nid;
    std::vector<std::string> aliases;        // time-ordered history, may be empty
    std::vector<NetAddress> net_addresses;   // time-ordered history
    std::map<std::string, std::uint32_t> asn_per_ip;  // host -> ASN, non-onion only
};

struct ChannelPoint {
    std::string funding_txid;
    std::uint32_t output_index = 0;

    std::string str() const { return funding_txid + ":" + std::to_string(output_index); }
    auto operator<=>(const ChannelPoint&) const = default;
};

enum class SettlementKind { cooperative_2_output, multi_output, punishment, unknown };

struct FeePolicy {
    std::int64_t base_fee_msat = 0;
    std::int64_t rate_ppm = 0;  // parts-per-million of the payment amount
};

struct Channel {
    ChannelPoint chpoint;
    std::string node1;
    std::string node2;
    std::int64_t capacity_sat = 0;
    std::optional<std::int64_t> open_time;
    std::optional<std::int64_t> close_time;
    std::optional<std::string> settlement_txid;
    SettlementKind settlement_kind = SettlementKind::unknown;
    FeePolicy policy1;  // charged by node1 when forwarding node1 -> node2
    FeePolicy policy2;  // charged by node2 when forwarding node2 -> node1
};

struct ActivityPeriod {
    std::int64_t start = 0;
    std::int64_t end = 0;
};

// true iff the closed intervals share at least one instant. Timestamps are
// block-granular, so a shared boundary counts as overlap.
inline bool periods_overlap(const ActivityPeriod& a, const ActivityPeriod& b) {
    return std::max(a.start, b.start) <= std::min(a.end, b.end);
}

// Immutable dataset container. Build the vectors, then call reindex() once;
// afterwards all lookups are safe to share across threads.
struct Snapshot {
    std::vector<Transaction> transactions;  // sorted by (height, txid)
    std::vector<Entity> entities;           // entity_id == index
    std::vector<NodeRecord> nodes;          // sorted by nid
    std::vector<Channel> channels;          // sorted by chpoint
    std::int64_t snapshot_end_time = 0;

    void reindex();

    const Transaction* find_tx(const std::string& txid) const;
    const NodeRecord* find_node(const std::string& nid) const;
    // -1 when the address was never clustered.
    std::int64_t entity_of(const std::string& address) const;
    const std::vector<std::size_t>& channels_of(const std::string& nid) const;

private:
    std::map<std::string, std::size_t> tx_index_;
    std::map<std::string, std::size_t> node_index_;
    std::map<std::string, std::int64_t> entity_index_;
    std::map<std::string, std::vector<std::size_t>> node_channels_;
    std::vector<std::size_t> no_channels_;
};

// start = earliest funding timestamp over the node's channels; end = latest
// settlement timestamp, or snapshot end while any channel remains open.
// Throws Error("node-unknown") / Error("no-channels").
ActivityPeriod activity_period(const Snapshot& snap, const std::string& nid);

// Referential-integrity check: every chpoint resolves to a multisig output of
// a known transaction, settlements spend their chpoint, close_time mirrors
// settlement presence, and the entity table partitions the address space.
// Throws Error("integrity-error") listing every violation.
void verify_integrity(const Snapshot& snap);

std::string to_string(ScriptKind k);
std::string to_string(SettlementKind k);
std::string to_string(ServiceCategory c);
std::string to_string(NetAddrKind k);
std::optional<ServiceCategory> service_category_from_string(const std::string& s);

}  // namespace lnlink
