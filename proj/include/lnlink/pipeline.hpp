#pragma once

#include <filesystem>
#include <optional>

#include "lnlink/entity_graph.hpp"
#include "lnlink/impact.hpp"
#include "lnlink/io.hpp"
#include "lnlink/linking.hpp"
#include "lnlink/patterns.hpp"
#include "lnlink/synth.hpp"

namespace lnlink {

struct PipelineParams {
    AliasMetric alias_metric = AliasMetric::relative_lcs;
    double alias_threshold = 0.46;
    std::optional<SweepAnchor> sweep;   // when set, overrides alias_threshold
    PatternOptions pattern_options;
    LinkOptions link_options;
    std::vector<std::int64_t> amounts_sat;  // probe amounts for path metrics
    int samples = 1000;
    std::uint64_t seed = 1;
    int top_actors = 3;
    std::int64_t griefing_budget_sat = 10'000'000;
    int griefing_max_hops = 8;
    unsigned threads = 1;
};

struct OnchainArtifacts {
    RoleTables roles;
    std::vector<EgoComponent> funding_components;
    std::vector<EgoComponent> settlement_components;
    PatternResult patterns;
};

struct OffchainArtifacts {
    std::vector<NodeCluster> alias_clusters;       // before the ASN filter
    std::vector<NodeCluster> alias_pure_clusters;  // after it
    std::vector<NodeCluster> ip_clusters;
    std::vector<ActorCluster> actors;
    std::optional<SweepResult> sweep;
    double threshold_used = 0.0;
    AliasMetric metric = AliasMetric::relative_lcs;
};

struct LinkArtifacts {
    LinkSet alg1, alg1_onchain, alg1_full;
    LinkSet alg2, alg2_onchain, alg2_full;
    CrossValidation cross;
};

struct LinkedShare {
    double addresses = 0.0;
    double entities = 0.0;
    double nodes = 0.0;
};

struct PrivacyPoint {
    std::int64_t amount_sat = 0;
    double value_privacy = 0.0;
    double relationship_anonymity = 0.0;
    double wormhole = 0.0;
};

struct AnalysisArtifacts {
    std::vector<CapacityRow> capacity;
    std::vector<AdvantageReport> advantage;      // per actor rank
    std::vector<std::string> advantage_actors;   // labels matching `advantage`
    std::vector<PrivacyPoint> privacy;           // top-actor-set metrics per amount
    std::set<std::string> privacy_actor_nodes;
    GriefingReport griefing;
    std::vector<std::pair<std::int64_t, GriefingReport>> griefing_curve;
    std::string griefing_actor;
};

OnchainArtifacts cluster_onchain(const Snapshot& snap, const PatternOptions& opt);
OffchainArtifacts cluster_offchain(const Snapshot& snap, const PipelineParams& params);
LinkArtifacts run_linking(const Snapshot& snap, const OnchainArtifacts& onchain,
                          const std::vector<ActorCluster>& actors, const LinkOptions& opt);
AnalysisArtifacts run_analysis(const Snapshot& snap, const LinkSet& links,
                               const std::vector<ActorCluster>& actors,
                               const PipelineParams& params);

LinkedShare linked_share(const Snapshot& snap, const LinkSet& links);

struct PipelineResult {
    OnchainArtifacts onchain;
    OffchainArtifacts offchain;
    LinkArtifacts links;
    AnalysisArtifacts analysis;
};

// Full run: clustering, linking, analysis, report bundle under out_dir.
// Every emitted file references the manifest hash.
PipelineResult run_pipeline(const Snapshot& snap, const PipelineParams& params,
                            const RunManifest& manifest, const std::filesystem::path& out_dir);

// Renders one chart kind ("privacy", "wormhole", "dos", "griefing",
// "capacity") from an existing report bundle. Returns false when the selected
// series is empty (the chart is still written, with empty axes).
// Throws Error("missing-metric") when the bundle lacks the needed report.
bool plot_bundle(const std::filesystem::path& bundle_dir, const std::string& kind,
                 const std::filesystem::path& svg_out);

}  // namespace lnlink
