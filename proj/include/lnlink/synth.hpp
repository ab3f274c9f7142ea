#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lnlink/linking.hpp"
#include "lnlink/model.hpp"
#include "lnlink/patterns.hpp"

namespace lnlink {

// How many users exhibit each behavior. Users are assigned behaviors in this
// order, remaining users act plainly (replenish, open a few channels, close
// some).
struct BehaviorCounts {
    int coin_reuse = 0;
    int entity_reuse = 0;
    int star = 0;
    int snake = 0;
    int collector = 0;
    int proxy = 0;
    int themed_actor = 0;      // several nodes, themed aliases, one hosting ASN
    int shared_ip_actor = 0;   // several nodes behind one IP
    int adversarial_id_change = 0;  // node-id change behind a retained wallet
    int multi_output_close = 0;     // settlement with >2 outputs (excluded from linking)
    int punished_close = 0;         // punishment settlement (excluded from linking)

    int total() const {
        return coin_reuse + entity_reuse + star + snake + collector + proxy + themed_actor +
               shared_ip_actor + adversarial_id_change + multi_output_close + punished_close;
    }
};

struct ScenarioConfig {
    int user_count = 24;
    BehaviorCounts behaviors;
    int min_extra_channels = 1;  // organic channels beyond the anchor
    int max_extra_channels = 3;
    std::int64_t min_capacity_sat = 100'000;
    std::int64_t max_capacity_sat = 2'000'000;
    std::int64_t max_base_fee_msat = 2'000;
    std::int64_t max_rate_ppm = 1'000;
    double service_entity_rate = 0.0;  // fraction of plain users fed by a tagged exchange
    double coinjoin_rate = 0.0;        // fraction of plain users mixing wallet coins
    std::optional<std::uint64_t> seed; // mandatory

    // Throws Error("config-invalid") on out-of-range values.
    void validate() const;
};

struct PatternInstance {
    PatternKind kind = PatternKind::star;
    std::vector<std::int64_t> entities;
};

struct InjectedLink {
    std::int64_t entity_id = -1;
    std::string nid;
    LinkHeuristic kind = LinkHeuristic::coin_reuse;
};

struct GroundTruth {
    std::map<std::int64_t, std::int64_t> entity_user;
    std::map<std::string, std::int64_t> node_user;
    std::vector<PatternInstance> patterns;
    std::vector<InjectedLink> links;

    LinkLabels labels() const;
};

// Deterministic scenario generator: identical configs (including seed) yield
// byte-identical snapshots. Every emitted snapshot passes verify_integrity and
// every injected pattern instance satisfies its detector.
std::pair<Snapshot, GroundTruth> generate(const ScenarioConfig& config);

// gt_entity_user.csv, gt_node_user.csv, gt_patterns.csv, gt_links.csv
void emit_ground_truth(const GroundTruth& gt, const std::filesystem::path& dir);
GroundTruth load_ground_truth(const std::filesystem::path& dir);

}  // namespace lnlink
