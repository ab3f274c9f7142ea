#include "lnlink/model.hpp"

#include <algorithm>
#include <sstream>

namespace lnlink {

void Snapshot::reindex() {
    std::sort(transactions.begin(), transactions.end(), [](const Transaction& a, const Transaction& b) {
        if (a.height != b.height) return a.height < b.height;
        return a.txid < b.txid;
    });
    std::sort(nodes.begin(), nodes.end(),
              [](const NodeRecord& a, const NodeRecord& b) { return a.nid < b.nid; });
    std::sort(channels.begin(), channels.end(),
              [](const Channel& a, const Channel& b) { return a.chpoint < b.chpoint; });

    tx_index_.clear();
    node_index_.clear();
    entity_index_.clear();
    node_channels_.clear();

    for (std::size_t i = 0; i < transactions.size(); ++i) tx_index_[transactions[i].txid] = i;
    for (std::size_t i = 0; i < nodes.size(); ++i) node_index_[nodes[i].nid] = i;
    for (const Entity& e : entities)
        for (const std::string& a : e.addresses) entity_index_[a] = e.entity_id;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        node_channels_[channels[i].node1].push_back(i);
        node_channels_[channels[i].node2].push_back(i);
    }
}

const Transaction* Snapshot::find_tx(const std::string& txid) const {
    auto it = tx_index_.find(txid);
    return it == tx_index_.end() ? nullptr : &transactions[it->second];
}

const NodeRecord* Snapshot::find_node(const std::string& nid) const {
    auto it = node_index_.find(nid);
    return it == node_index_.end() ? nullptr : &nodes[it->second];
}

std::int64_t Snapshot::entity_of(const std::string& address) const {
    auto it = entity_index_.find(address);
    return it == entity_index_.end() ? -1 : it->second;
}

const std::vector<std::size_t>& Snapshot::channels_of(const std::string& nid) const {
    auto it = node_channels_.find(nid);
    return it == node_channels_.end() ? no_channels_ : it->second;
}

ActivityPeriod activity_period(const Snapshot& snap, const std::string& nid) {
    if (snap.find_node(nid) == nullptr) throw Error("node-unknown", "no node record for " + nid);
    const auto& chans = snap.channels_of(nid);
    if (chans.empty()) throw Error("no-channels", "node " + nid + " has no channels");

    ActivityPeriod p{};
    bool first = true;
    bool any_open = false;
    std::int64_t last_settlement = 0;
    for (std::size_t idx : chans) {
        const Channel& c = snap.channels[idx];
        const Transaction* funding = snap.find_tx(c.chpoint.funding_txid);
        const std::int64_t opened =
            funding != nullptr ? funding->timestamp : c.open_time.value_or(0);
        if (first || opened < p.start) p.start = opened;
        first = false;
        if (c.close_time.has_value()) {
            last_settlement = std::max(last_settlement, *c.close_time);
        } else {
            any_open = true;
        }
    }
    p.end = any_open ? snap.snapshot_end_time : last_settlement;
    return p;
}

void verify_integrity(const Snapshot& snap) {
    std::vector<std::string> problems;

    for (const Channel& c : snap.channels) {
        const std::string tag = "channel " + c.chpoint.str();
        const Transaction* funding = snap.find_tx(c.chpoint.funding_txid);
        if (funding == nullptr) {
            problems.push_back(tag + ": funding txid not in snapshot");
            continue;
        }
        if (c.chpoint.output_index >= funding->outputs.size()) {
            problems.push_back(tag + ": output index out of range");
            continue;
        }
        const TxOutput& locked = funding->outputs[c.chpoint.output_index];
        if (locked.script != ScriptKind::multi_sig)
            problems.push_back(tag + ": chpoint output is not multisig");
        if (c.node1 == c.node2) problems.push_back(tag + ": identical endpoints");
        if (c.capacity_sat <= 0) problems.push_back(tag + ": non-positive capacity");
        if (c.settlement_txid.has_value() != c.close_time.has_value())
            problems.push_back(tag + ": close_time and settlement_txid must be set together");
        if (c.settlement_txid.has_value()) {
            const Transaction* settle = snap.find_tx(*c.settlement_txid);
            if (settle == nullptr) {
                problems.push_back(tag + ": settlement txid not in snapshot");
            } else {
                const bool spends = std::any_of(
                    settle->inputs.begin(), settle->inputs.end(),
                    [&](const TxInput& in) { return in.address == locked.address; });
                if (!spends) problems.push_back(tag + ": settlement does not spend the chpoint output");
            }
        }
    }

    // Entities must partition the clustered address space.
    std::set<std::string> seen;
    std::size_t total = 0;
    for (const Entity& e : snap.entities) {
        total += e.addresses.size();
        for (const std::string& a : e.addresses)
            if (!seen.insert(a).second) problems.push_back("address " + a + " in more than one entity");
    }
    if (seen.size() != total) problems.push_back("entity address sets are not disjoint");

    if (!problems.empty()) {
        std::ostringstream os;
        os << problems.size() << " violation(s):";
        for (const auto& p : problems) os << "\n  " << p;
        throw Error("integrity-error", os.str());
    }
}

std::string to_string(ScriptKind k) {
    switch (k) {
        case ScriptKind::single_sig: return "singlesig";
        case ScriptKind::multi_sig: return "multisig";
        case ScriptKind::other: return "other";
    }
    return "other";
}

std::string to_string(SettlementKind k) {
    switch (k) {
        case SettlementKind::cooperative_2_output: return "cooperative-2-output";
        case SettlementKind::multi_output: return "multi-output";
        case SettlementKind::punishment: return "punishment";
        case SettlementKind::unknown: return "unknown";
    }
    return "unknown";
}

std::string to_string(ServiceCategory c) {
    switch (c) {
        case ServiceCategory::exchange: return "exchange";
        case ServiceCategory::mixer: return "mixer";
        case ServiceCategory::hosted_wallet: return "hosted-wallet";
        case ServiceCategory::other_service: return "other-service";
    }
    return "other-service";
}

std::string to_string(NetAddrKind k) {
    switch (k) {
        case NetAddrKind::ipv4: return "ipv4";
        case NetAddrKind::ipv6: return "ipv6";
        case NetAddrKind::onion: return "onion";
    }
    return "ipv4";
}

std::optional<ServiceCategory> service_category_from_string(const std::string& s) {
    if (s == "exchange") return ServiceCategory::exchange;
    if (s == "mixer") return ServiceCategory::mixer;
    if (s == "hosted-wallet") return ServiceCategory::hosted_wallet;
    if (s == "other-service") return ServiceCategory::other_service;
    return std::nullopt;
}

}  // namespace lnlink
