#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lnlink/model.hpp"

namespace lnlink {

enum class AliasMetric {
    relative_lcs,
    levenshtein,
    damerau_levenshtein,
    hamming,
    jaro,
    jaro_winkler,
};

// Normalized string distance in [0, 1]; 0 for identical aliases, symmetric.
// relative_lcs = 1 - |longest common substring| / max(|a|, |b|). Hamming on
// unequal lengths is 1. Throws Error("empty-alias") on empty input.
double alias_distance(std::string_view a, std::string_view b, AliasMetric metric);

struct NodeCluster {
    std::set<std::string> nodes;
};

// Complete-linkage agglomerative clustering over the distinct aliases of all
// nodes, cut at `threshold`; a node joins a cluster when any of its historical
// aliases is a member. Singleton node clusters are discarded. A node may
// appear in several clusters; overlapping clusters merge later in
// merge_actor_clusters.
std::vector<NodeCluster> cluster_aliases(const std::vector<NodeRecord>& nodes, AliasMetric metric,
                                         double threshold);

// Keeps only clusters whose members' public IPs resolve to exactly one ASN.
// Members without public IPs are vacuously pure only when the whole cluster
// has none. Throws Error("missing-asn") listing unresolved IPs.
std::vector<NodeCluster> asn_purity_filter(const std::vector<NodeCluster>& clusters,
                                           const std::vector<NodeRecord>& nodes);

// Groups nodes transitively by shared public IP or onion address (ports
// stripped, reserved ranges excluded). Singletons discarded.
std::vector<NodeCluster> cluster_by_ip(const std::vector<NodeRecord>& nodes);

enum class ActorEvidence { alias_asn, shared_ip };

struct ActorCluster {
    std::int64_t actor_id = -1;
    std::set<std::string> nodes;
    std::set<ActorEvidence> evidence;
};

// Transitive union of overlapping clusters from both sources, evidence tags
// unioned; ids dense, ordered by smallest member nid.
std::vector<ActorCluster> merge_actor_clusters(const std::vector<NodeCluster>& alias_clusters,
                                               const std::vector<NodeCluster>& ip_clusters);

struct SweepAnchor {
    std::string alias_prefix;
    std::size_t min_size = 2;
};

struct SweepResult {
    double threshold = 0.0;
    std::size_t clustered_nodes = 0;
    // (threshold, ASN-pure clustered node count) for every grid point
    std::vector<std::pair<double, std::size_t>> curve;
};

// Evaluates thresholds 0.00, 0.01, ..., 0.99 and returns the smallest one
// maximizing the ASN-pure clustered node count, subject to all nodes carrying
// the anchor alias prefix landing in one surviving cluster of >= min_size.
// Throws Error("anchor-unsatisfiable") when no grid point meets the anchor.
SweepResult sweep_threshold(const std::vector<NodeRecord>& nodes, AliasMetric metric,
                            const SweepAnchor& anchor);

std::string to_string(AliasMetric m);
std::string to_string(ActorEvidence e);
std::optional<AliasMetric> alias_metric_from_string(const std::string& s);

}  // namespace lnlink
