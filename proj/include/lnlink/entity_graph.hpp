#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "lnlink/model.hpp"

namespace lnlink {

// Co-spend closure: two addresses belong to one entity iff they are connected
// through a chain of shared-input transactions. CoinJoin-flagged transactions
// never contribute unions (their inputs mix unrelated users). Output-only
// addresses become singleton entities. Entity ids are dense, assigned by first
// appearance of any member address in the transaction stream; the cluster
// representative is its lexicographically smallest address.
std::vector<Entity> cluster_cospend(const std::vector<Transaction>& transactions);

// Entity roles derived from channel funding/settlement transactions plus the
// transfers feeding and draining them.
struct RoleTables {
    std::set<std::int64_t> funding_entities;
    std::set<std::int64_t> settlement_entities;
    std::set<std::int64_t> source_entities;
    std::set<std::int64_t> destination_entities;
    // payer -> funding entity
    std::set<std::pair<std::int64_t, std::int64_t>> funding_relations;
    // settlement entity -> receiver
    std::set<std::pair<std::int64_t, std::int64_t>> settlement_relations;
};

// Throws Error("dangling-reference") if a channel's funding/settlement txid is
// unresolved. Relations come from non-CoinJoin transactions only; settlement
// transactions carry no funding-side relations and funding transactions carry
// no settlement-side relations (channel opens/closes are the layer boundary,
// not wallet-to-wallet flows), and chpoint outputs are never relation targets.
RoleTables derive_roles(const Snapshot& snap);

enum class GraphSide { funding, settlement };

struct EgoComponent {
    GraphSide side = GraphSide::funding;
    std::set<std::int64_t> vertices;
    std::set<std::pair<std::int64_t, std::int64_t>> edges;
};

// Weakly-connected components of the chosen side's relation graph, ordered by
// smallest vertex id. Components containing a service-tagged entity are
// dropped. Only vertices incident to an edge appear.
std::vector<EgoComponent> ego_components(const RoleTables& tables, GraphSide side,
                                         const std::vector<Entity>& entities);

}  // namespace lnlink
