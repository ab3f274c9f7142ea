#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lnlink/alias_cluster.hpp"
#include "lnlink/model.hpp"
#include "lnlink/patterns.hpp"

namespace lnlink {

enum class LinkHeuristic { coin_reuse, entity_reuse, counterparty, indirect_actor, indirect_onchain };

// One (entity, node) control assertion with provenance.
struct LinkRecord {
    std::int64_t entity_id = -1;
    std::string nid;
    LinkHeuristic heuristic = LinkHeuristic::coin_reuse;
    int iteration = 0;  // 0 for seed links
    std::vector<std::string> supporting_txids;
};

// A cooperative close usable for linking: exactly two distinct output
// entities, no punishment involved.
struct EligibleSettlement {
    std::string txid;
    std::size_t channel_index = 0;  // into Snapshot::channels
    std::array<std::int64_t, 2> output_entities{-1, -1};
};

struct LinkOptions {
    // Activity-period overlap guard against node-id changes behind a retained
    // wallet. Disable only to reproduce the false-positive regression.
    bool activity_guard = true;
    int iteration_cap = 20;
};

struct LinkDiagnostics {
    int iterations = 0;
    int ambiguous_seeds = 0;         // candidate channel pairs sharing 0 or 2 nodes
    int propagation_conflicts = 0;   // settlements voided (entity would get both nodes)
    std::set<std::int64_t> multi_node_entities;  // entity linked to >1 node
};

class LinkSet {
public:
    bool add(LinkRecord rec);  // false when the (entity, node) pair is present
    bool contains(std::int64_t entity, const std::string& nid) const;
    const std::vector<LinkRecord>& records() const { return records_; }
    const std::set<std::string>& nodes_of(std::int64_t entity) const;
    std::set<std::int64_t> linked_entities() const;
    std::set<std::string> linked_nodes() const;
    std::size_t size() const { return records_.size(); }

    LinkDiagnostics diag;

private:
    std::vector<LinkRecord> records_;
    std::map<std::int64_t, std::set<std::string>> by_entity_;
    static const std::set<std::string> empty_;
};

std::vector<EligibleSettlement> eligible_settlements(const Snapshot& snap);

// Funding entity -> indices of channels whose funding transaction it feeds.
// CoinJoin funding transactions attribute no entities.
std::map<std::int64_t, std::vector<std::size_t>> channels_by_funding_entity(const Snapshot& snap);

// Coin reuse: an entity that funded a channel, received one side of its
// cooperative close, and funded another channel sharing exactly one node is
// linked to the shared node, guarded by activity overlap of the two non-shared
// nodes. Counterparty propagation then runs to fixpoint.
LinkSet link_coin_reuse(const Snapshot& snap, const LinkOptions& opt = {});

// Entity reuse: an entity funding more than one channel with exactly one node
// common to all of them is linked to that node, guarded by at least one
// activity-overlapping pair among the non-common nodes. Counterparty
// propagation then runs to fixpoint.
LinkSet link_entity_reuse(const Snapshot& snap, const LinkOptions& opt = {});

// One propagation round: for every eligible settlement of channel (na, nb)
// with outputs {ex, ey}, a known (ex, na) yields (ey, nb) and symmetrically.
// A settlement that would hand one output entity both channel nodes is voided
// and counted in diagnostics. Returns the number of links added.
int propagate_counterparty(LinkSet& links, const Snapshot& snap,
                           const std::vector<EligibleSettlement>& settlements, int iteration);

// Merges on-chain super-entities into the link set (tag indirect-onchain),
// re-runs propagation to fixpoint, then expands links across actor-cluster
// members (tag indirect-actor).
LinkSet combine_with_clusters(const LinkSet& links, const PatternResult& patterns,
                              const std::vector<ActorCluster>& actors, const Snapshot& snap,
                              const LinkOptions& opt = {});

struct CrossValidation {
    std::size_t intersection_size = 0;  // (entity, node) pairs found by both
    // entities linked by both algorithms to disjoint node sets
    std::set<std::int64_t> contradictions;
};

CrossValidation cross_validate(const LinkSet& a, const LinkSet& b);

// Ground-truth labels for validation; the synthetic generator produces them,
// user-supplied labels work the same way.
struct LinkLabels {
    std::map<std::int64_t, std::int64_t> entity_user;
    std::map<std::string, std::int64_t> node_user;
    // expected seed links with the heuristic that should find them
    std::vector<std::tuple<std::int64_t, std::string, LinkHeuristic>> injected;
};

struct HeuristicScore {
    std::size_t links = 0;
    std::size_t correct = 0;
    std::size_t injected = 0;
    std::size_t recalled = 0;
    std::size_t validated_nodes = 0;  // distinct nodes with a correct link
    std::optional<double> precision;  // absent when links == 0
    std::optional<double> recall;     // absent when injected == 0
};

struct ValidationReport {
    std::map<LinkHeuristic, HeuristicScore> per_heuristic;
    HeuristicScore overall;
};

ValidationReport validate_against_ground_truth(const LinkSet& links, const LinkLabels& labels);

std::string to_string(LinkHeuristic h);
std::optional<LinkHeuristic> link_heuristic_from_string(const std::string& s);

}  // namespace lnlink
