#include "lnlink/alias_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lnlink/error.hpp"
#include "lnlink/net.hpp"
#include "lnlink/util.hpp"

namespace lnlink {

namespace {

std::size_t longest_common_substring(std::string_view a, std::string_view b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
            best = std::max(best, cur[j]);
        }
        std::swap(prev, cur);
    }
    return best;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// Optimal-string-alignment variant: Levenshtein plus adjacent transposition.
std::size_t damerau_levenshtein(std::string_view a, std::string_view b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
            if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
                d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
        }
    }
    return d[n][m];
}

double jaro_similarity(std::string_view a, std::string_view b) {
    if (a == b) return 1.0;
    const std::size_t n = a.size(), m = b.size();
    const std::size_t window = std::max<std::size_t>(1, std::max(n, m) / 2) - 1;
    std::vector<bool> amatch(n, false), bmatch(m, false);
    std::size_t matches = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i > window ? i - window : 0;
        const std::size_t hi = std::min(m, i + window + 1);
        for (std::size_t j = lo; j < hi; ++j) {
            if (bmatch[j] || a[i] != b[j]) continue;
            amatch[i] = bmatch[j] = true;
            ++matches;
            break;
        }
    }
    if (matches == 0) return 0.0;
    std::size_t transpositions = 0, k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!amatch[i]) continue;
        while (!bmatch[k]) ++k;
        if (a[i] != b[k]) ++transpositions;
        ++k;
    }
    const double mm = static_cast<double>(matches);
    return (mm / n + mm / m + (mm - transpositions / 2.0) / mm) / 3.0;
}

double jaro_winkler_similarity(std::string_view a, std::string_view b) {
    const double j = jaro_similarity(a, b);
    std::size_t prefix = 0;
    while (prefix < 4 && prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
    return j + static_cast<double>(prefix) * 0.1 * (1.0 - j);
}

struct AliasUniverse {
    std::vector<std::string> aliases;
    std::map<std::string, std::vector<std::size_t>> nodes_of_alias;  // alias -> node indices
};

AliasUniverse collect_aliases(const std::vector<NodeRecord>& nodes) {
    AliasUniverse u;
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (const std::string& a : nodes[i].aliases) {
            if (a.empty()) continue;
            if (seen.try_emplace(a, u.aliases.size()).second) u.aliases.push_back(a);
            u.nodes_of_alias[a].push_back(i);
        }
    }
    return u;
}

std::vector<std::vector<double>> distance_matrix(const std::vector<std::string>& aliases,
                                                 AliasMetric metric) {
    const std::size_t n = aliases.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] = alias_distance(aliases[i], aliases[j], metric);
    return dist;
}

// Complete-linkage agglomeration over a precomputed matrix, cut at threshold.
// Returns the member alias indices of every final cluster.
std::vector<std::vector<std::size_t>> agglomerate(std::vector<std::vector<double>> dist,
                                                  double threshold) {
    const std::size_t n = dist.size();
    std::vector<std::vector<std::size_t>> members(n);
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};
    if (n < 2) return members;

    std::vector<bool> active(n, true);
    for (;;) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                if (dist[i][j] < best) {
                    best = dist[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        if (!std::isfinite(best) || best > threshold) break;
        // Complete linkage: distance to the union is the max of the parts.
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == bi || k == bj) continue;
            dist[bi][k] = dist[k][bi] = std::max(dist[bi][k], dist[bj][k]);
        }
        active[bj] = false;
        members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
        members[bj].clear();
    }
    return members;
}

std::vector<NodeCluster> clusters_from_members(const std::vector<NodeRecord>& nodes,
                                               const AliasUniverse& u,
                                               const std::vector<std::vector<std::size_t>>& members) {
    std::vector<NodeCluster> out;
    for (const auto& group : members) {
        if (group.empty()) continue;
        NodeCluster cluster;
        for (std::size_t ai : group)
            for (std::size_t ni : u.nodes_of_alias.at(u.aliases[ai])) cluster.nodes.insert(nodes[ni].nid);
        if (cluster.nodes.size() >= 2) out.push_back(std::move(cluster));
    }
    std::sort(out.begin(), out.end(), [](const NodeCluster& a, const NodeCluster& b) {
        return *a.nodes.begin() < *b.nodes.begin();
    });
    return out;
}

}  // namespace

double alias_distance(std::string_view a, std::string_view b, AliasMetric metric) {
    if (a.empty() || b.empty()) throw Error("empty-alias", "alias distance over empty string");
    const double longest = static_cast<double>(std::max(a.size(), b.size()));
    switch (metric) {
        case AliasMetric::relative_lcs:
            return 1.0 - static_cast<double>(longest_common_substring(a, b)) / longest;
        case AliasMetric::levenshtein:
            return static_cast<double>(levenshtein(a, b)) / longest;
        case AliasMetric::damerau_levenshtein:
            return static_cast<double>(damerau_levenshtein(a, b)) / longest;
        case AliasMetric::hamming: {
            if (a.size() != b.size()) return 1.0;
            std::size_t diff = 0;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i] != b[i]) ++diff;
            return static_cast<double>(diff) / longest;
        }
        case AliasMetric::jaro:
            return 1.0 - jaro_similarity(a, b);
        case AliasMetric::jaro_winkler:
            return 1.0 - jaro_winkler_similarity(a, b);
    }
    return 1.0;
}

std::vector<NodeCluster> cluster_aliases(const std::vector<NodeRecord>& nodes, AliasMetric metric,
                                         double threshold) {
    if (threshold < 0.0 || threshold >= 1.0)
        throw Error("config-invalid", "alias threshold must lie in [0, 1)");
    const AliasUniverse u = collect_aliases(nodes);
    const auto members = agglomerate(distance_matrix(u.aliases, metric), threshold);
    return clusters_from_members(nodes, u, members);
}

std::vector<NodeCluster> asn_purity_filter(const std::vector<NodeCluster>& clusters,
                                           const std::vector<NodeRecord>& nodes) {
    std::map<std::string, const NodeRecord*> by_nid;
    for (const NodeRecord& n : nodes) by_nid[n.nid] = &n;

    std::vector<std::string> unresolved;
    std::vector<NodeCluster> out;
    for (const NodeCluster& cluster : clusters) {
        std::set<std::uint32_t> asns;
        bool any_public = false, any_without_public = false;
        for (const std::string& nid : cluster.nodes) {
            auto it = by_nid.find(nid);
            if (it == by_nid.end()) {
                any_without_public = true;
                continue;
            }
            const auto hosts = public_hosts(*it->second);
            if (hosts.empty()) {
                any_without_public = true;
                continue;
            }
            any_public = true;
            for (const std::string& h : hosts) {
                auto asn = it->second->asn_per_ip.find(h);
                if (asn == it->second->asn_per_ip.end())
                    unresolved.push_back(h);
                else
                    asns.insert(asn->second);
            }
        }
        // Vacuously pure when nobody exposes a public IP; mixed clusters fail.
        if (any_public && any_without_public) continue;
        if (any_public && asns.size() != 1) continue;
        out.push_back(cluster);
    }
    if (!unresolved.empty()) {
        std::sort(unresolved.begin(), unresolved.end());
        unresolved.erase(std::unique(unresolved.begin(), unresolved.end()), unresolved.end());
        std::string list;
        for (const auto& h : unresolved) list += (list.empty() ? "" : ", ") + h;
        throw Error("missing-asn", "no ASN for: " + list);
    }
    return out;
}

std::vector<NodeCluster> cluster_by_ip(const std::vector<NodeRecord>& nodes) {
    std::map<std::string, std::vector<std::size_t>> by_host;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (const std::string& h : public_hosts(nodes[i])) by_host[h].push_back(i);
        for (const std::string& h : onion_hosts(nodes[i])) by_host[h].push_back(i);
    }
    DisjointSet dsu(nodes.size());
    for (const auto& [host, idxs] : by_host)
        for (std::size_t k = 1; k < idxs.size(); ++k) dsu.unite(idxs[0], idxs[k]);

    std::map<std::size_t, NodeCluster> by_root;
    for (std::size_t i = 0; i < nodes.size(); ++i) by_root[dsu.find(i)].nodes.insert(nodes[i].nid);

    std::vector<NodeCluster> out;
    for (auto& [root, cluster] : by_root)
        if (cluster.nodes.size() >= 2) out.push_back(std::move(cluster));
    std::sort(out.begin(), out.end(), [](const NodeCluster& a, const NodeCluster& b) {
        return *a.nodes.begin() < *b.nodes.begin();
    });
    return out;
}

std::vector<ActorCluster> merge_actor_clusters(const std::vector<NodeCluster>& alias_clusters,
                                               const std::vector<NodeCluster>& ip_clusters) {
    struct Tagged {
        const NodeCluster* cluster;
        ActorEvidence tag;
    };
    std::vector<Tagged> all;
    for (const auto& c : alias_clusters) all.push_back({&c, ActorEvidence::alias_asn});
    for (const auto& c : ip_clusters) all.push_back({&c, ActorEvidence::shared_ip});

    std::vector<std::string> nids;
    std::map<std::string, std::size_t> idx;
    for (const Tagged& t : all)
        for (const std::string& nid : t.cluster->nodes)
            if (idx.try_emplace(nid, nids.size()).second) nids.push_back(nid);

    DisjointSet dsu(nids.size());
    for (const Tagged& t : all) {
        const std::size_t first = idx[*t.cluster->nodes.begin()];
        for (const std::string& nid : t.cluster->nodes) dsu.unite(first, idx[nid]);
    }

    std::map<std::size_t, ActorCluster> by_root;
    for (std::size_t i = 0; i < nids.size(); ++i) by_root[dsu.find(i)].nodes.insert(nids[i]);
    for (const Tagged& t : all)
        by_root[dsu.find(idx[*t.cluster->nodes.begin()])].evidence.insert(t.tag);

    std::vector<ActorCluster> out;
    for (auto& [root, actor] : by_root) out.push_back(std::move(actor));
    std::sort(out.begin(), out.end(), [](const ActorCluster& a, const ActorCluster& b) {
        return *a.nodes.begin() < *b.nodes.begin();
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].actor_id = static_cast<std::int64_t>(i);
    return out;
}

SweepResult sweep_threshold(const std::vector<NodeRecord>& nodes, AliasMetric metric,
                            const SweepAnchor& anchor) {
    std::set<std::string> anchored;
    for (const NodeRecord& n : nodes)
        for (const std::string& a : n.aliases)
            if (a.rfind(anchor.alias_prefix, 0) == 0) anchored.insert(n.nid);
    if (anchored.empty())
        throw Error("anchor-unsatisfiable",
                    "no node carries an alias with prefix '" + anchor.alias_prefix + "'");

    const AliasUniverse u = collect_aliases(nodes);
    const auto dist = distance_matrix(u.aliases, metric);

    SweepResult result;
    bool found = false;
    for (int step = 0; step < 100; ++step) {
        const double t = step / 100.0;
        const auto pure =
            asn_purity_filter(clusters_from_members(nodes, u, agglomerate(dist, t)), nodes);

        std::size_t clustered = 0;
        for (const NodeCluster& c : pure) clustered += c.nodes.size();

        bool anchor_ok = false;
        for (const NodeCluster& c : pure) {
            if (c.nodes.size() < anchor.min_size) continue;
            if (std::includes(c.nodes.begin(), c.nodes.end(), anchored.begin(), anchored.end()))
                anchor_ok = true;
        }
        result.curve.emplace_back(t, clustered);
        if (anchor_ok && (!found || clustered > result.clustered_nodes)) {
            found = true;
            result.threshold = t;
            result.clustered_nodes = clustered;
        }
    }
    if (!found)
        throw Error("anchor-unsatisfiable", "no threshold keeps the anchor family in one cluster");
    return result;
}

std::string to_string(AliasMetric m) {
    switch (m) {
        case AliasMetric::relative_lcs: return "relative-lcs";
        case AliasMetric::levenshtein: return "levenshtein";
        case AliasMetric::damerau_levenshtein: return "damerau-levenshtein";
        case AliasMetric::hamming: return "hamming";
        case AliasMetric::jaro: return "jaro";
        case AliasMetric::jaro_winkler: return "jaro-winkler";
    }
    return "relative-lcs";
}

std::string to_string(ActorEvidence e) {
    return e == ActorEvidence::alias_asn ? "alias-asn" : "shared-ip";
}

std::optional<AliasMetric> alias_metric_from_string(const std::string& s) {
    if (s == "relative-lcs" || s == "lcs") return AliasMetric::relative_lcs;
    if (s == "levenshtein") return AliasMetric::levenshtein;
    if (s == "damerau-levenshtein") return AliasMetric::damerau_levenshtein;
    if (s == "hamming") return AliasMetric::hamming;
    if (s == "jaro") return AliasMetric::jaro;
    if (s == "jaro-winkler") return AliasMetric::jaro_winkler;
    return std::nullopt;
}

}  // namespace lnlink
