#include "lnlink/entity_graph.hpp"

#include <algorithm>
#include <map>

#include "lnlink/util.hpp"

namespace lnlink {

std::vector<Entity> cluster_cospend(const std::vector<Transaction>& transactions) {
    // Address universe in first-appearance order (inputs before outputs).
    std::vector<std::string> order;
    std::map<std::string, std::size_t> index;
    std::map<std::string, ScriptKind> script;
    auto intern = [&](const std::string& a) {
        auto [it, fresh] = index.try_emplace(a, order.size());
        if (fresh) order.push_back(a);
        return it->second;
    };
    for (const Transaction& tx : transactions) {
        for (const TxInput& in : tx.inputs) intern(in.address);
        for (const TxOutput& out : tx.outputs) {
            intern(out.address);
            auto it = script.find(out.address);
            if (it == script.end()) script.emplace(out.address, out.script);
        }
    }

    DisjointSet dsu(order.size());
    for (const Transaction& tx : transactions) {
        if (tx.is_coinjoin) continue;
        for (std::size_t i = 1; i < tx.inputs.size(); ++i)
            dsu.unite(index[tx.inputs[0].address], index[tx.inputs[i].address]);
    }

    // Dense entity ids by first appearance of any member address.
    std::vector<std::int64_t> id_of_root(order.size(), -1);
    std::vector<Entity> entities;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t root = dsu.find(i);
        if (id_of_root[root] < 0) {
            id_of_root[root] = static_cast<std::int64_t>(entities.size());
            entities.push_back(Entity{id_of_root[root], {}, std::nullopt});
        }
        entities[static_cast<std::size_t>(id_of_root[root])].addresses.insert(order[i]);
    }
    return entities;
}

namespace {

std::set<std::int64_t> input_entities(const Snapshot& snap, const Transaction& tx) {
    std::set<std::int64_t> out;
    for (const TxInput& in : tx.inputs) {
        const std::int64_t e = snap.entity_of(in.address);
        if (e >= 0) out.insert(e);
    }
    return out;
}

}  // namespace

RoleTables derive_roles(const Snapshot& snap) {
    RoleTables tables;

    std::set<std::string> funding_txids;
    std::set<std::string> settlement_txids;
    // chpoint outputs, so channel deposits are never treated as wallet flows
    std::set<std::pair<std::string, std::uint32_t>> chpoint_outputs;

    for (const Channel& c : snap.channels) {
        if (snap.find_tx(c.chpoint.funding_txid) == nullptr)
            throw Error("dangling-reference",
                        "channel " + c.chpoint.str() + " references unknown funding tx");
        funding_txids.insert(c.chpoint.funding_txid);
        chpoint_outputs.emplace(c.chpoint.funding_txid, c.chpoint.output_index);
        if (c.settlement_txid.has_value()) {
            if (snap.find_tx(*c.settlement_txid) == nullptr)
                throw Error("dangling-reference",
                            "channel " + c.chpoint.str() + " references unknown settlement tx");
            settlement_txids.insert(*c.settlement_txid);
        }
    }

    for (const Transaction& tx : snap.transactions) {
        if (tx.is_coinjoin) continue;
        if (funding_txids.count(tx.txid)) {
            for (const std::int64_t e : input_entities(snap, tx)) tables.funding_entities.insert(e);
        }
        if (settlement_txids.count(tx.txid)) {
            for (const TxOutput& out : tx.outputs) {
                const std::int64_t e = snap.entity_of(out.address);
                if (e >= 0) tables.settlement_entities.insert(e);
            }
        }
    }

    for (const Transaction& tx : snap.transactions) {
        if (tx.is_coinjoin) continue;
        const auto inputs = input_entities(snap, tx);

        // Funding side: transfers into funding entities (includes the change
        // of a funding transaction feeding the next channel).
        if (!settlement_txids.count(tx.txid)) {
            for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
                if (chpoint_outputs.count({tx.txid, static_cast<std::uint32_t>(i)})) continue;
                const std::int64_t f = snap.entity_of(tx.outputs[i].address);
                if (f < 0 || !tables.funding_entities.count(f)) continue;
                for (const std::int64_t x : inputs) {
                    if (x == f) continue;
                    tables.funding_relations.emplace(x, f);
                    tables.source_entities.insert(x);
                }
            }
        }

        // Settlement side: transfers out of settlement entities.
        if (!funding_txids.count(tx.txid) && !settlement_txids.count(tx.txid)) {
            for (const std::int64_t s : inputs) {
                if (!tables.settlement_entities.count(s)) continue;
                for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
                    if (chpoint_outputs.count({tx.txid, static_cast<std::uint32_t>(i)})) continue;
                    const std::int64_t d = snap.entity_of(tx.outputs[i].address);
                    if (d < 0 || d == s) continue;
                    tables.settlement_relations.emplace(s, d);
                    tables.destination_entities.insert(d);
                }
            }
        }
    }
    return tables;
}

std::vector<EgoComponent> ego_components(const RoleTables& tables, GraphSide side,
                                         const std::vector<Entity>& entities) {
    const auto& relations =
        side == GraphSide::funding ? tables.funding_relations : tables.settlement_relations;

    std::vector<std::int64_t> verts;
    std::map<std::int64_t, std::size_t> vidx;
    for (const auto& [a, b] : relations) {
        for (std::int64_t v : {a, b}) {
            if (vidx.try_emplace(v, verts.size()).second) verts.push_back(v);
        }
    }
    DisjointSet dsu(verts.size());
    for (const auto& [a, b] : relations) dsu.unite(vidx[a], vidx[b]);

    std::map<std::size_t, EgoComponent> by_root;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        EgoComponent& comp = by_root[dsu.find(i)];
        comp.side = side;
        comp.vertices.insert(verts[i]);
    }
    for (const auto& rel : relations) by_root[dsu.find(vidx[rel.first])].edges.insert(rel);

    auto is_service = [&](std::int64_t e) {
        return e >= 0 && static_cast<std::size_t>(e) < entities.size() &&
               entities[static_cast<std::size_t>(e)].service_category.has_value();
    };

    std::vector<EgoComponent> out;
    for (auto& [root, comp] : by_root) {
        const bool tainted =
            std::any_of(comp.vertices.begin(), comp.vertices.end(), is_service);
        if (!tainted) out.push_back(std::move(comp));
    }
    std::sort(out.begin(), out.end(), [](const EgoComponent& a, const EgoComponent& b) {
        return *a.vertices.begin() < *b.vertices.begin();
    });
    return out;
}

}  // namespace lnlink
