#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lnlink/alias_cluster.hpp"
#include "lnlink/linking.hpp"
#include "lnlink/model.hpp"

namespace lnlink {

// Read-only channel-graph view used by the analysis metrics. Node indices are
// dense and ordered by nid, so index order equals lexicographic nid order.
struct ChannelGraph {
    struct Edge {
        int a = 0;
        int b = 0;
        std::int64_t capacity_sat = 0;
        FeePolicy policy_ab;  // fee charged by a forwarding a -> b
        FeePolicy policy_ba;
        std::string chpoint;
    };

    std::vector<std::string> nids;
    std::vector<Edge> edges;
    std::vector<std::vector<std::size_t>> adjacency;  // node -> edge indices

    int index_of(const std::string& nid) const;
    std::size_t node_count() const { return nids.size(); }
    std::int64_t total_capacity_sat() const;

    void rebuild_adjacency();

    // Channels open at `at_time` (default: snapshot end). All snapshot nodes
    // become vertices even when isolated at that time.
    static ChannelGraph from_snapshot(const Snapshot& snap,
                                      std::optional<std::int64_t> at_time = std::nullopt);
};

// Fee one intermediary charges for forwarding `amount_sat`, in millisatoshi:
// base_fee_msat + amount_msat * rate_ppm / 1e6, floored.
std::int64_t hop_fee_msat(const FeePolicy& policy, std::int64_t amount_sat);

struct PathResult {
    std::vector<int> nodes;  // src .. dst
    std::int64_t fee_msat = 0;
};

// Least-fee route for `amount_sat`: edges below the amount are unusable, the
// sender's own first hop charges nothing, parallel channels contribute their
// cheapest eligible policy. Ties break by fewer hops, then by the
// lexicographically smallest nid sequence. nullopt when disconnected.
std::optional<PathResult> cheapest_path(const ChannelGraph& g, int src, int dst,
                                        std::int64_t amount_sat);

// |1 - after/before|; 0 when the baseline is 0.
double advantage_delta(double before, double after);

struct AdvantageReport {
    double delta_r = 0.0;  // largest-component node count
    double delta_f = 0.0;  // mean max-flow over sampled pairs
    double delta_s = 0.0;  // payment success ratio at the probe amount
    int sample_count = 0;
    std::string removed_actor;
    std::uint64_t seed = 0;
    std::int64_t amount_sat = 0;
};

// Before/after comparison when the actor's nodes and their channels are
// removed. Pairs are sampled uniformly among surviving nodes, identically for
// both sides, so a fixed seed reproduces results bit for bit.
// Throws Error("actor-unknown") when no actor node is in the graph.
AdvantageReport dos_advantage(const ChannelGraph& g, const std::set<std::string>& actor_nodes,
                              const std::string& actor_label, int samples, std::int64_t amount_sat,
                              std::uint64_t seed);

struct GriefingReport {
    double blocked_channel_fraction = 0.0;
    double blocked_capacity_fraction = 0.0;
    int paths_locked = 0;
    std::int64_t budget_spent_sat = 0;
};

// Greedy capacity-locking model: repeatedly lock the path between two
// actor-controlled endpoints that saturates the most not-yet-blocked capacity
// per locked coin, until the budget is exhausted or no affordable path
// remains. A channel counts as blocked once fully saturated.
GriefingReport griefing_reach(const ChannelGraph& g, const std::set<std::string>& actor_nodes,
                              std::int64_t lock_budget_sat, int max_hops);

// Fraction of pairs whose cheapest path routes through at least one
// actor-controlled intermediary. Pairs without a route are skipped.
double value_privacy(const ChannelGraph& g, const std::set<int>& actors, std::int64_t amount_sat,
                     const std::vector<std::pair<int, int>>& pairs);

// Fraction of pairs where an actor node is the sender's immediate successor
// and an actor node the receiver's immediate predecessor (one node may fill
// both roles on a single-intermediary path).
double relationship_anonymity_exposure(const ChannelGraph& g, const std::set<int>& actors,
                                       std::int64_t amount_sat,
                                       const std::vector<std::pair<int, int>>& pairs);

// Fraction of pairs whose cheapest path holds two actor intermediaries with at
// least one honest intermediary strictly between them.
double wormhole_exposure(const ChannelGraph& g, const std::set<int>& actors,
                         std::int64_t amount_sat, const std::vector<std::pair<int, int>>& pairs);

std::vector<std::pair<int, int>> all_ordered_pairs(std::size_t n);
std::vector<std::pair<int, int>> sample_ordered_pairs(std::size_t n, int count, std::uint64_t seed);

struct CapacityRow {
    std::string actor;       // actor-<id> or the nid for unclustered nodes
    std::size_t node_count = 0;
    std::int64_t capacity_msat = 0;  // attributed capacity
    double share = 0.0;
};

// Capacity per actor: a channel whose funding entity is linked to exactly one
// endpoint is attributed fully to that endpoint's actor, otherwise each side
// gets half. Rows are sorted by descending share; shares sum to 1.
std::vector<CapacityRow> capacity_distribution(const ChannelGraph& g, const Snapshot& snap,
                                               const LinkSet& links,
                                               const std::vector<ActorCluster>& actors);

}  // namespace lnlink
