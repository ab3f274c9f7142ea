#pragma once

#include <map>
#include <optional>
#include <vector>

#include "lnlink/entity_graph.hpp"

namespace lnlink {

enum class PatternKind { star, snake, collector, proxy };

struct PatternCluster {
    PatternKind kind = PatternKind::star;
    std::set<std::int64_t> entities;
    int component_id = -1;
};

struct PatternOptions {
    // Star/collector fan requirement. With strict_fan a fan of one is not
    // distinguishable from a plain transfer and is rejected.
    bool strict_fan = true;
    int min_fan() const { return strict_fan ? 2 : 1; }
};

// Funding side: a single pure source (not itself a funding entity) feeding
// >= min_fan funding entities. Cluster = source plus targets.
std::optional<PatternCluster> detect_star(const EgoComponent& comp, const RoleTables& tables,
                                          const PatternOptions& opt = {});

// Funding side: a directed tree from one pure source where every non-root
// vertex is a funding entity and at least one vertex both forwards funds and
// is a funding entity. Cluster = all vertices.
std::optional<PatternCluster> detect_snake(const EgoComponent& comp, const RoleTables& tables,
                                           const PatternOptions& opt = {});

// Settlement side: >= min_fan settlement entities with no other role feeding a
// single pure destination. Cluster = sources plus destination.
std::optional<PatternCluster> detect_collector(const EgoComponent& comp, const RoleTables& tables,
                                               const PatternOptions& opt = {});

// Settlement side: a reverse tree into one pure destination with at least one
// intermediate vertex holding both the settlement and destination roles.
// Cluster = all vertices.
std::optional<PatternCluster> detect_proxy(const EgoComponent& comp, const RoleTables& tables,
                                           const PatternOptions& opt = {});

struct PatternResult {
    std::vector<PatternCluster> clusters;
    // Super-entity groups induced by the clusters (entities sharing a cluster,
    // transitively). rep = smallest entity id in the group; only grouped
    // entities appear.
    std::map<std::int64_t, std::int64_t> super_of;
    std::map<std::int64_t, std::set<std::int64_t>> groups;

    const std::set<std::int64_t>* group_of(std::int64_t entity) const {
        auto it = super_of.find(entity);
        if (it == super_of.end()) return nullptr;
        return &groups.at(it->second);
    }
};

// Classifies every component (precedence: snake over star, proxy over
// collector) and merges the resulting clusters into super-entity groups.
PatternResult apply_patterns(const std::vector<EgoComponent>& components, const RoleTables& tables,
                             const PatternOptions& opt = {});

std::string to_string(PatternKind k);
std::optional<PatternKind> pattern_kind_from_string(const std::string& s);

}  // namespace lnlink
