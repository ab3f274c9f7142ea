#include "lnlink/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lnlink/entity_graph.hpp"
#include "lnlink/util.hpp"
#include "lnlink/version.hpp"

namespace lnlink {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io-error", "cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io-error", "cannot write " + path.string());
    out << content;
}

// LND-style dumps quote numbers; accept either form.
std::int64_t json_int(const json& j, const char* key, const std::string& ctx,
                      std::optional<std::int64_t> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw Error("parse-error", ctx + ": missing field '" + key + "'");
    }
    const json& v = j.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_string()) {
        try {
            return std::stoll(v.get<std::string>());
        } catch (const std::exception&) {
            throw Error("parse-error", ctx + ": field '" + key + "' is not a number");
        }
    }
    throw Error("parse-error", ctx + ": field '" + key + "' is not a number");
}

ScriptKind script_from_string(const std::string& s, const std::string& ctx) {
    if (s == "singlesig") return ScriptKind::single_sig;
    if (s == "multisig") return ScriptKind::multi_sig;
    if (s == "other") return ScriptKind::other;
    throw Error("parse-error", ctx + ": unknown script kind '" + s + "'");
}

std::vector<Transaction> parse_transactions(const std::filesystem::path& path,
                                            std::map<std::string, ServiceCategory>& service_tags) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io-error", "cannot open " + path.string());

    std::vector<Transaction> txs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string ctx = path.filename().string() + " line " + std::to_string(lineno);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw Error("parse-error", ctx + ": " + e.what());
        }
        Transaction tx;
        if (!j.contains("txid") || !j.at("txid").is_string())
            throw Error("parse-error", ctx + ": missing txid");
        tx.txid = j.at("txid").get<std::string>();
        tx.height = json_int(j, "height", ctx);
        tx.timestamp = json_int(j, "timestamp", ctx);
        tx.is_coinjoin = j.value("is_coinjoin", false);
        tx.is_punishment = j.value("is_punishment", false);
        for (const json& i : j.value("inputs", json::array())) {
            TxInput input;
            input.address = i.at("address").get<std::string>();
            input.value_sat = json_int(i, "value_sat", ctx, 0);
            tx.inputs.push_back(std::move(input));
        }
        for (const json& o : j.value("outputs", json::array())) {
            TxOutput output;
            output.address = o.at("address").get<std::string>();
            output.value_sat = json_int(o, "value_sat", ctx, 0);
            output.script = script_from_string(o.value("script", "singlesig"), ctx);
            if (o.contains("service")) {
                const auto cat = service_category_from_string(o.at("service").get<std::string>());
                if (!cat) throw Error("parse-error", ctx + ": unknown service category");
                service_tags.emplace(output.address, *cat);
            }
            tx.outputs.push_back(std::move(output));
        }
        txs.push_back(std::move(tx));
    }
    return txs;
}

NetAddrKind net_kind_from_string(const std::string& s, const std::string& ctx) {
    if (s == "ipv4") return NetAddrKind::ipv4;
    if (s == "ipv6") return NetAddrKind::ipv6;
    if (s == "onion") return NetAddrKind::onion;
    throw Error("parse-error", ctx + ": unknown address kind '" + s + "'");
}

void parse_graph(const std::filesystem::path& path, Snapshot& snap) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error("parse-error", path.filename().string() + ": " + std::string(e.what()));
    }
    const std::string ctx = path.filename().string();

    for (const json& n : j.value("nodes", json::array())) {
        NodeRecord node;
        if (!n.contains("pub_key")) throw Error("parse-error", ctx + ": node without pub_key");
        node.nid = n.at("pub_key").get<std::string>();
        if (n.contains("aliases"))
            for (const json& a : n.at("aliases")) node.aliases.push_back(a.get<std::string>());
        else if (n.contains("alias") && !n.at("alias").get<std::string>().empty())
            node.aliases.push_back(n.at("alias").get<std::string>());
        for (const json& a : n.value("addresses", json::array())) {
            const std::string raw = a.at("addr").get<std::string>();
            NetAddress addr = normalize_net_address(raw);
            if (a.contains("network"))
                addr.kind = net_kind_from_string(a.at("network").get<std::string>(), ctx);
            node.net_addresses.push_back(std::move(addr));
        }
        snap.nodes.push_back(std::move(node));
    }

    for (const json& e : j.value("edges", json::array())) {
        Channel c;
        const std::string chp = e.at("channel_point").get<std::string>();
        const auto colon = chp.rfind(':');
        if (colon == std::string::npos)
            throw Error("parse-error", ctx + ": channel_point without output index: " + chp);
        c.chpoint.funding_txid = chp.substr(0, colon);
        c.chpoint.output_index = static_cast<std::uint32_t>(std::stoul(chp.substr(colon + 1)));
        c.node1 = e.at("node1_pub").get<std::string>();
        c.node2 = e.at("node2_pub").get<std::string>();
        c.capacity_sat = json_int(e, "capacity", ctx);
        auto policy = [&](const char* key) {
            FeePolicy p;
            if (e.contains(key)) {
                p.base_fee_msat = json_int(e.at(key), "fee_base_msat", ctx, 0);
                p.rate_ppm = json_int(e.at(key), "fee_rate_milli_msat", ctx, 0);
            }
            return p;
        };
        c.policy1 = policy("node1_policy");
        c.policy2 = policy("node2_policy");
        snap.channels.push_back(std::move(c));
    }
}

}  // namespace

AsnMap load_asn_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io-error", "cannot open " + path.string());
    AsnMap map;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.rfind("cidr_prefix", 0) == 0) continue;  // header
        const auto fields = split(line, ',');
        if (fields.size() != 2)
            throw Error("parse-error", path.filename().string() + " line " +
                                           std::to_string(lineno) + ": expected cidr_prefix,asn");
        map.add_prefix(fields[0], static_cast<std::uint32_t>(std::stoul(fields[1])));
    }
    return map;
}

Snapshot ingest(const std::filesystem::path& graph_json,
                const std::filesystem::path& transactions_jsonl,
                const std::filesystem::path& asn_csv) {
    Snapshot snap;
    std::map<std::string, ServiceCategory> service_tags;
    snap.transactions = parse_transactions(transactions_jsonl, service_tags);
    parse_graph(graph_json, snap);
    const AsnMap asn = load_asn_csv(asn_csv);

    snap.reindex();

    // Locate settlements: the unique spender of each chpoint output.
    std::map<std::string, std::vector<const Transaction*>> spenders;
    for (const Transaction& tx : snap.transactions)
        for (const TxInput& in : tx.inputs) spenders[in.address].push_back(&tx);

    std::vector<std::string> problems;
    std::int64_t last_ts = 0;
    for (const Transaction& tx : snap.transactions) last_ts = std::max(last_ts, tx.timestamp);

    for (Channel& c : snap.channels) {
        const Transaction* funding = snap.find_tx(c.chpoint.funding_txid);
        if (funding == nullptr) {
            problems.push_back("channel " + c.chpoint.str() + ": funding tx not found");
            continue;
        }
        if (c.chpoint.output_index >= funding->outputs.size()) {
            problems.push_back("channel " + c.chpoint.str() + ": output index out of range");
            continue;
        }
        c.open_time = funding->timestamp;
        const std::string& msig = funding->outputs[c.chpoint.output_index].address;
        auto it = spenders.find(msig);
        if (it == spenders.end()) continue;  // still open
        if (it->second.size() > 1) {
            problems.push_back("channel " + c.chpoint.str() + ": chpoint output spent twice");
            continue;
        }
        const Transaction* settle = it->second.front();
        c.settlement_txid = settle->txid;
        c.close_time = settle->timestamp;
        if (settle->is_punishment)
            c.settlement_kind = SettlementKind::punishment;
        else if (settle->outputs.size() == 2)
            c.settlement_kind = SettlementKind::cooperative_2_output;
        else if (settle->outputs.size() > 2)
            c.settlement_kind = SettlementKind::multi_output;
        else
            c.settlement_kind = SettlementKind::unknown;
    }
    if (!problems.empty()) {
        std::string msg;
        for (const auto& p : problems) msg += (msg.empty() ? "" : "\n  ") + p;
        throw Error("integrity-error", msg);
    }

    snap.snapshot_end_time = last_ts + 3600;

    snap.entities = cluster_cospend(snap.transactions);
    for (Entity& e : snap.entities) {
        for (const std::string& a : e.addresses) {
            auto tag = service_tags.find(a);
            if (tag != service_tags.end()) {
                e.service_category = tag->second;
                break;
            }
        }
    }

    for (NodeRecord& n : snap.nodes) {
        for (const NetAddress& a : n.net_addresses) {
            if (a.kind == NetAddrKind::onion || is_reserved_ip(a.host)) continue;
            const auto found = asn.lookup(a.host);
            if (found) n.asn_per_ip[a.host] = *found;
        }
    }

    snap.reindex();
    verify_integrity(snap);
    return snap;
}

void write_graph_json(const Snapshot& snap, const std::filesystem::path& path) {
    json nodes = json::array();
    for (const NodeRecord& n : snap.nodes) {
        json node;
        node["pub_key"] = n.nid;
        json aliases = json::array();
        for (const std::string& a : n.aliases) aliases.push_back(a);
        node["aliases"] = aliases;
        json addrs = json::array();
        for (const NetAddress& a : n.net_addresses)
            addrs.push_back(json{{"addr", a.host}, {"network", to_string(a.kind)}});
        node["addresses"] = addrs;
        nodes.push_back(std::move(node));
    }
    json edges = json::array();
    for (const Channel& c : snap.channels) {
        json e;
        e["channel_point"] = c.chpoint.str();
        e["capacity"] = std::to_string(c.capacity_sat);
        e["node1_pub"] = c.node1;
        e["node2_pub"] = c.node2;
        e["node1_policy"] = json{{"fee_base_msat", std::to_string(c.policy1.base_fee_msat)},
                                 {"fee_rate_milli_msat", std::to_string(c.policy1.rate_ppm)}};
        e["node2_policy"] = json{{"fee_base_msat", std::to_string(c.policy2.base_fee_msat)},
                                 {"fee_rate_milli_msat", std::to_string(c.policy2.rate_ppm)}};
        edges.push_back(std::move(e));
    }
    json root;
    root["nodes"] = std::move(nodes);
    root["edges"] = std::move(edges);
    write_file(path, root.dump(2) + "\n");
}

void write_transactions_jsonl(const Snapshot& snap, const std::filesystem::path& path) {
    // Service tags ride on the first tagged output of each service entity.
    std::map<std::string, std::string> service_of_addr;
    for (const Entity& e : snap.entities)
        if (e.service_category)
            for (const std::string& a : e.addresses) service_of_addr[a] = to_string(*e.service_category);

    std::ostringstream os;
    for (const Transaction& tx : snap.transactions) {
        json j;
        j["txid"] = tx.txid;
        j["height"] = tx.height;
        j["timestamp"] = tx.timestamp;
        j["is_coinjoin"] = tx.is_coinjoin;
        if (tx.is_punishment) j["is_punishment"] = true;
        json ins = json::array();
        for (const TxInput& in : tx.inputs)
            ins.push_back(json{{"address", in.address}, {"value_sat", in.value_sat}});
        j["inputs"] = std::move(ins);
        json outs = json::array();
        for (const TxOutput& out : tx.outputs) {
            json o{{"address", out.address}, {"value_sat", out.value_sat}};
            if (out.script != ScriptKind::single_sig) o["script"] = to_string(out.script);
            auto svc = service_of_addr.find(out.address);
            if (svc != service_of_addr.end()) o["service"] = svc->second;
            outs.push_back(std::move(o));
        }
        j["outputs"] = std::move(outs);
        os << j.dump() << "\n";
    }
    write_file(path, os.str());
}

void write_asn_csv(const Snapshot& snap, const std::filesystem::path& path) {
    // One /16 per observed prefix; matches how the generator allocates hosts.
    std::map<std::string, std::uint32_t> prefixes;
    for (const NodeRecord& n : snap.nodes)
        for (const auto& [ip, asn] : n.asn_per_ip) {
            const auto parts = split(ip, '.');
            if (parts.size() == 4) prefixes[parts[0] + "." + parts[1] + ".0.0/16"] = asn;
        }
    std::ostringstream os;
    os << "cidr_prefix,asn\n";
    for (const auto& [cidr, asn] : prefixes) os << cidr << "," << asn << "\n";
    write_file(path, os.str());
}

void write_snapshot_files(const Snapshot& snap, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_graph_json(snap, dir / "graph.json");
    write_transactions_jsonl(snap, dir / "transactions.jsonl");
    write_asn_csv(snap, dir / "asn.csv");
}

std::string file_checksum(const std::filesystem::path& path) {
    return "fnv1a64:" + to_hex(fnv1a64(read_file(path)));
}

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs[path.filename().string()] = file_checksum(path);
}

std::string RunManifest::hash() const {
    json j;
    j["tool_version"] = tool_version.empty() ? kToolVersion : tool_version;
    j["inputs"] = inputs;
    j["parameters"] = parameters;
    return to_hex(fnv1a64(j.dump()));
}

std::string RunManifest::to_json() const {
    json j;
    j["tool_version"] = tool_version.empty() ? kToolVersion : tool_version;
    j["inputs"] = inputs;
    j["parameters"] = parameters;
    j["manifest_hash"] = hash();
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& path) const {
    write_file(path, to_json());
}

}  // namespace lnlink
