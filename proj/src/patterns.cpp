#include "lnlink/patterns.hpp"

#include <algorithm>

#include "lnlink/util.hpp"

namespace lnlink {

namespace {

struct Degrees {
    std::map<std::int64_t, int> in, out;
};

Degrees degrees(const EgoComponent& comp) {
    Degrees d;
    for (std::int64_t v : comp.vertices) {
        d.in[v] = 0;
        d.out[v] = 0;
    }
    for (const auto& [a, b] : comp.edges) {
        ++d.out[a];
        ++d.in[b];
    }
    return d;
}

}  // namespace

std::optional<PatternCluster> detect_star(const EgoComponent& comp, const RoleTables& tables,
                                          const PatternOptions& opt) {
    if (comp.side != GraphSide::funding) return std::nullopt;
    const Degrees d = degrees(comp);

    std::int64_t root = -1;
    for (const auto& [v, out] : d.out) {
        if (out == 0) continue;
        if (root != -1) return std::nullopt;  // more than one spender
        root = v;
    }
    if (root == -1) return std::nullopt;
    if (tables.funding_entities.count(root)) return std::nullopt;  // not a pure source
    if (d.in.at(root) != 0) return std::nullopt;

    std::set<std::int64_t> targets;
    for (const auto& [a, b] : comp.edges) {
        if (a != root || !tables.funding_entities.count(b)) return std::nullopt;
        targets.insert(b);
    }
    if (static_cast<int>(targets.size()) < opt.min_fan()) return std::nullopt;

    PatternCluster cluster;
    cluster.kind = PatternKind::star;
    cluster.entities = targets;
    cluster.entities.insert(root);
    return cluster;
}

std::optional<PatternCluster> detect_snake(const EgoComponent& comp, const RoleTables& tables,
                                           const PatternOptions&) {
    if (comp.side != GraphSide::funding) return std::nullopt;
    const Degrees d = degrees(comp);

    // Exactly one root (in-degree 0) and in-degree 1 everywhere else makes the
    // weakly-connected component a directed tree rooted at the root.
    std::int64_t root = -1;
    for (const auto& [v, in] : d.in) {
        if (in == 0) {
            if (root != -1) return std::nullopt;
            root = v;
        } else if (in != 1) {
            return std::nullopt;
        }
    }
    if (root == -1) return std::nullopt;
    if (tables.funding_entities.count(root)) return std::nullopt;

    bool dual_role = false;
    for (std::int64_t v : comp.vertices) {
        if (v == root) continue;
        if (!tables.funding_entities.count(v)) return std::nullopt;
        if (d.out.at(v) > 0) dual_role = true;
    }
    if (!dual_role) return std::nullopt;

    PatternCluster cluster;
    cluster.kind = PatternKind::snake;
    cluster.entities = comp.vertices;
    return cluster;
}

std::optional<PatternCluster> detect_collector(const EgoComponent& comp, const RoleTables& tables,
                                               const PatternOptions& opt) {
    if (comp.side != GraphSide::settlement) return std::nullopt;
    const Degrees d = degrees(comp);

    std::int64_t sink = -1;
    for (const auto& [v, in] : d.in) {
        if (in == 0) continue;
        if (sink != -1) return std::nullopt;
        sink = v;
    }
    if (sink == -1) return std::nullopt;
    if (tables.settlement_entities.count(sink)) return std::nullopt;  // must be a pure destination
    if (d.out.at(sink) != 0) return std::nullopt;

    std::set<std::int64_t> sources;
    for (const auto& [a, b] : comp.edges) {
        if (b != sink) return std::nullopt;
        if (!tables.settlement_entities.count(a)) return std::nullopt;
        sources.insert(a);
    }
    if (static_cast<int>(sources.size()) < opt.min_fan()) return std::nullopt;

    PatternCluster cluster;
    cluster.kind = PatternKind::collector;
    cluster.entities = sources;
    cluster.entities.insert(sink);
    return cluster;
}

std::optional<PatternCluster> detect_proxy(const EgoComponent& comp, const RoleTables& tables,
                                           const PatternOptions&) {
    if (comp.side != GraphSide::settlement) return std::nullopt;
    const Degrees d = degrees(comp);

    // Mirror of the snake: one terminal destination, out-degree 1 elsewhere.
    std::int64_t final_dest = -1;
    for (const auto& [v, out] : d.out) {
        if (out == 0) {
            if (final_dest != -1) return std::nullopt;
            final_dest = v;
        } else if (out != 1) {
            return std::nullopt;
        }
    }
    if (final_dest == -1) return std::nullopt;
    if (tables.settlement_entities.count(final_dest)) return std::nullopt;

    bool dual_role = false;
    for (std::int64_t v : comp.vertices) {
        if (v == final_dest) continue;
        if (!tables.settlement_entities.count(v)) return std::nullopt;
        if (d.in.at(v) > 0) dual_role = true;  // receives like a destination
    }
    if (!dual_role) return std::nullopt;

    PatternCluster cluster;
    cluster.kind = PatternKind::proxy;
    cluster.entities = comp.vertices;
    return cluster;
}

PatternResult apply_patterns(const std::vector<EgoComponent>& components, const RoleTables& tables,
                             const PatternOptions& opt) {
    PatternResult result;
    for (std::size_t i = 0; i < components.size(); ++i) {
        const EgoComponent& comp = components[i];
        std::optional<PatternCluster> cluster;
        if (comp.side == GraphSide::funding) {
            cluster = detect_snake(comp, tables, opt);
            if (!cluster) cluster = detect_star(comp, tables, opt);
        } else {
            cluster = detect_proxy(comp, tables, opt);
            if (!cluster) cluster = detect_collector(comp, tables, opt);
        }
        if (cluster) {
            cluster->component_id = static_cast<int>(i);
            result.clusters.push_back(std::move(*cluster));
        }
    }

    // Union entities across clusters (an entity in a funding-side and a
    // settlement-side cluster joins both groups).
    std::vector<std::int64_t> ids;
    std::map<std::int64_t, std::size_t> idx;
    for (const PatternCluster& c : result.clusters)
        for (std::int64_t e : c.entities)
            if (idx.try_emplace(e, ids.size()).second) ids.push_back(e);

    DisjointSet dsu(ids.size());
    for (const PatternCluster& c : result.clusters) {
        auto first = idx[*c.entities.begin()];
        for (std::int64_t e : c.entities) dsu.unite(first, idx[e]);
    }
    std::map<std::size_t, std::set<std::int64_t>> tmp;
    for (std::size_t i = 0; i < ids.size(); ++i) tmp[dsu.find(i)].insert(ids[i]);
    for (auto& [root, members] : tmp) {
        const std::int64_t rep = *members.begin();
        for (std::int64_t e : members) result.super_of[e] = rep;
        result.groups.emplace(rep, std::move(members));
    }
    return result;
}

std::string to_string(PatternKind k) {
    switch (k) {
        case PatternKind::star: return "star";
        case PatternKind::snake: return "snake";
        case PatternKind::collector: return "collector";
        case PatternKind::proxy: return "proxy";
    }
    return "star";
}

std::optional<PatternKind> pattern_kind_from_string(const std::string& s) {
    if (s == "star") return PatternKind::star;
    if (s == "snake") return PatternKind::snake;
    if (s == "collector") return PatternKind::collector;
    if (s == "proxy") return PatternKind::proxy;
    return std::nullopt;
}

}  // namespace lnlink
