// Batch front end: ingest -> cluster -> link -> analyze -> reports/plots.
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "lnlink/pipeline.hpp"
#include "lnlink/version.hpp"

namespace fs = std::filesystem;
using namespace lnlink;

namespace {

struct CommonInputs {
    std::string graph, transactions, asn;

    void attach(CLI::App* cmd) {
        cmd->add_option("--graph", graph, "channel graph JSON")->required();
        cmd->add_option("--transactions", transactions, "ledger transactions JSONL")->required();
        cmd->add_option("--asn", asn, "CIDR-to-ASN CSV")->required();
    }

    Snapshot load() const { return ingest(graph, transactions, asn); }

    RunManifest manifest() const {
        RunManifest m;
        m.tool_version = kToolVersion;
        m.add_input(graph);
        m.add_input(transactions);
        m.add_input(asn);
        return m;
    }
};

void attach_params(CLI::App* cmd, PipelineParams& p, std::string& metric_name,
                   std::string& sweep_prefix, std::size_t& sweep_min_size) {
    cmd->add_option("--alias-metric", metric_name,
                    "relative-lcs|levenshtein|damerau-levenshtein|hamming|jaro|jaro-winkler");
    cmd->add_option("--alias-threshold", p.alias_threshold, "dendrogram cut threshold");
    cmd->add_option("--sweep-anchor-prefix", sweep_prefix,
                    "enable threshold sweep anchored on this alias prefix");
    cmd->add_option("--sweep-min-size", sweep_min_size, "minimum anchor cluster size");
    cmd->add_flag("!--lenient-fan", p.pattern_options.strict_fan,
                  "accept fan-of-one star/collector components");
    cmd->add_flag("!--no-activity-guard", p.link_options.activity_guard,
                  "disable the activity-period overlap guard");
    cmd->add_option("--iteration-cap", p.link_options.iteration_cap, "propagation round cap");
    cmd->add_option("--amount", p.amounts_sat, "probe amounts in satoshi")
        ->delimiter(',');
    cmd->add_option("--samples", p.samples, "sampled node pairs per metric");
    cmd->add_option("--top-actors", p.top_actors, "actors analyzed by capacity rank");
    cmd->add_option("--griefing-budget", p.griefing_budget_sat, "lock budget in satoshi");
    cmd->add_option("--max-hops", p.griefing_max_hops, "griefing path hop limit");
    cmd->add_option("--threads", p.threads, "bounded worker count");
}

void finish_params(PipelineParams& p, const std::string& metric_name,
                   const std::string& sweep_prefix, std::size_t sweep_min_size) {
    const auto metric = alias_metric_from_string(metric_name);
    if (!metric) throw Error("config-invalid", "unknown alias metric '" + metric_name + "'");
    p.alias_metric = *metric;
    if (!sweep_prefix.empty()) p.sweep = SweepAnchor{sweep_prefix, sweep_min_size};
}

void manifest_params(RunManifest& m, const PipelineParams& p) {
    m.parameters["alias_metric"] = to_string(p.alias_metric);
    m.parameters["alias_threshold"] = std::to_string(p.alias_threshold);
    if (p.sweep) {
        m.parameters["sweep_anchor_prefix"] = p.sweep->alias_prefix;
        m.parameters["sweep_min_size"] = std::to_string(p.sweep->min_size);
    }
    m.parameters["strict_fan"] = p.pattern_options.strict_fan ? "true" : "false";
    m.parameters["activity_guard"] = p.link_options.activity_guard ? "true" : "false";
    m.parameters["iteration_cap"] = std::to_string(p.link_options.iteration_cap);
    std::string amounts;
    for (const auto a : p.amounts_sat) amounts += (amounts.empty() ? "" : ",") + std::to_string(a);
    m.parameters["amounts_sat"] = amounts;
    m.parameters["samples"] = std::to_string(p.samples);
    m.parameters["seed"] = std::to_string(p.seed);
    m.parameters["top_actors"] = std::to_string(p.top_actors);
    m.parameters["griefing_budget_sat"] = std::to_string(p.griefing_budget_sat);
    m.parameters["griefing_max_hops"] = std::to_string(p.griefing_max_hops);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-layer analysis toolkit for payment channel networks"};
    app.set_version_flag("--version", kToolVersion);
    app.set_config("--config", "", "TOML-style key=value config file; flags win");
    app.require_subcommand(1);

    // ---- ingest ----
    CommonInputs in_ingest;
    auto* cmd_ingest = app.add_subcommand("ingest", "validate inputs and report totals");
    in_ingest.attach(cmd_ingest);

    // ---- cluster-onchain ----
    CommonInputs in_onchain;
    std::string out_onchain{"onchain_clusters.csv"};
    bool lenient_fan = false;
    auto* cmd_onchain =
        app.add_subcommand("cluster-onchain", "detect funding/settlement patterns");
    in_onchain.attach(cmd_onchain);
    cmd_onchain->add_option("--out", out_onchain, "cluster CSV path");
    cmd_onchain->add_flag("--lenient-fan", lenient_fan, "accept fan-of-one components");

    // ---- cluster-offchain ----
    CommonInputs in_offchain;
    PipelineParams p_offchain;
    std::string metric_offchain{"relative-lcs"}, sweep_prefix_offchain;
    std::size_t sweep_min_offchain = 2;
    std::string out_offchain{"offchain_clusters.csv"};
    auto* cmd_offchain = app.add_subcommand("cluster-offchain", "cluster nodes by alias/ASN/IP");
    in_offchain.attach(cmd_offchain);
    cmd_offchain->add_option("--alias-metric", metric_offchain, "string distance metric");
    cmd_offchain->add_option("--alias-threshold", p_offchain.alias_threshold, "cut threshold");
    cmd_offchain->add_option("--sweep-anchor-prefix", sweep_prefix_offchain, "sweep anchor prefix");
    cmd_offchain->add_option("--sweep-min-size", sweep_min_offchain, "anchor minimum size");
    cmd_offchain->add_option("--out", out_offchain, "actor cluster CSV path");

    // ---- link ----
    CommonInputs in_link;
    PipelineParams p_link;
    std::string metric_link{"relative-lcs"}, sweep_prefix_link;
    std::size_t sweep_min_link = 2;
    std::string out_link{"links.csv"};
    auto* cmd_link = app.add_subcommand("link", "run both linking algorithms plus combination");
    in_link.attach(cmd_link);
    attach_params(cmd_link, p_link, metric_link, sweep_prefix_link, sweep_min_link);
    cmd_link->add_option("--out", out_link, "combined links CSV path");

    // ---- analyze / pipeline ----
    CommonInputs in_pipe;
    PipelineParams p_pipe;
    std::string metric_pipe{"relative-lcs"}, sweep_prefix_pipe;
    std::size_t sweep_min_pipe = 2;
    std::string out_dir{"report"};
    auto* cmd_analyze = app.add_subcommand("analyze", "impact metrics for the top actors");
    auto* cmd_pipeline = app.add_subcommand("pipeline", "full run into a report bundle");
    for (CLI::App* cmd : {cmd_analyze, cmd_pipeline}) {
        cmd->add_option("--out", out_dir, "report bundle directory");
        cmd->add_option("--seed", p_pipe.seed, "rng seed for sampled metrics")->required();
    }
    in_pipe.attach(cmd_analyze);
    attach_params(cmd_analyze, p_pipe, metric_pipe, sweep_prefix_pipe, sweep_min_pipe);
    in_pipe.attach(cmd_pipeline);
    attach_params(cmd_pipeline, p_pipe, metric_pipe, sweep_prefix_pipe, sweep_min_pipe);

    // ---- synth ----
    ScenarioConfig synth_cfg;
    std::uint64_t synth_seed = 0;
    bool synth_seed_set = false;
    std::string synth_out{"scenario"};
    auto* cmd_synth = app.add_subcommand("synth", "generate a labeled synthetic scenario");
    cmd_synth->add_option("--out", synth_out, "output directory");
    cmd_synth->add_option("--seed", synth_seed, "scenario seed")
        ->required()
        ->trigger_on_parse()
        ->each([&](const std::string&) { synth_seed_set = true; });
    cmd_synth->add_option("--users", synth_cfg.user_count, "total users");
    cmd_synth->add_option("--coin-reuse", synth_cfg.behaviors.coin_reuse, "coin-reuse users");
    cmd_synth->add_option("--entity-reuse", synth_cfg.behaviors.entity_reuse, "entity-reuse users");
    cmd_synth->add_option("--stars", synth_cfg.behaviors.star, "star-funding users");
    cmd_synth->add_option("--snakes", synth_cfg.behaviors.snake, "snake-change users");
    cmd_synth->add_option("--collectors", synth_cfg.behaviors.collector, "collector users");
    cmd_synth->add_option("--proxies", synth_cfg.behaviors.proxy, "proxy users");
    cmd_synth->add_option("--themed-actors", synth_cfg.behaviors.themed_actor,
                          "multi-node users with themed aliases");
    cmd_synth->add_option("--shared-ip-actors", synth_cfg.behaviors.shared_ip_actor,
                          "multi-node users behind one IP");
    cmd_synth->add_option("--adversarial", synth_cfg.behaviors.adversarial_id_change,
                          "node-id-change users");
    cmd_synth->add_option("--multi-output-closes", synth_cfg.behaviors.multi_output_close,
                          "users with >2-output settlements");
    cmd_synth->add_option("--punished-closes", synth_cfg.behaviors.punished_close,
                          "users with punishment settlements");
    cmd_synth->add_option("--min-extra-channels", synth_cfg.min_extra_channels, "");
    cmd_synth->add_option("--max-extra-channels", synth_cfg.max_extra_channels, "");
    cmd_synth->add_option("--min-capacity", synth_cfg.min_capacity_sat, "");
    cmd_synth->add_option("--max-capacity", synth_cfg.max_capacity_sat, "");
    cmd_synth->add_option("--service-rate", synth_cfg.service_entity_rate,
                          "fraction of plain users fed by a tagged exchange");
    cmd_synth->add_option("--coinjoin-rate", synth_cfg.coinjoin_rate,
                          "fraction of plain users mixing coins");

    // ---- plot ----
    std::string plot_bundle_dir{"report"}, plot_kind{"privacy"}, plot_out;
    auto* cmd_plot = app.add_subcommand("plot", "render a chart from a report bundle");
    cmd_plot->add_option("--bundle", plot_bundle_dir, "report bundle directory")->required();
    cmd_plot->add_option("--kind", plot_kind, "privacy|wormhole|dos|griefing|capacity");
    cmd_plot->add_option("--out", plot_out, "SVG path (default <bundle>/<kind>.svg)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_ingest->parsed()) {
            const Snapshot snap = in_ingest.load();
            std::size_t settled = 0;
            for (const Channel& c : snap.channels)
                if (c.settlement_txid) ++settled;
            std::printf("transactions %zu\nentities %zu\nnodes %zu\nchannels %zu (settled %zu)\n",
                        snap.transactions.size(), snap.entities.size(), snap.nodes.size(),
                        snap.channels.size(), settled);
            return 0;
        }
        if (cmd_onchain->parsed()) {
            const Snapshot snap = in_onchain.load();
            PatternOptions opt;
            opt.strict_fan = !lenient_fan;
            const OnchainArtifacts art = cluster_onchain(snap, opt);
            std::ofstream out(out_onchain, std::ios::binary);
            out << "component_id,kind,entities\n";
            for (const PatternCluster& c : art.patterns.clusters) {
                out << c.component_id << "," << to_string(c.kind) << ",";
                bool first = true;
                for (const std::int64_t e : c.entities) {
                    out << (first ? "" : ";") << e;
                    first = false;
                }
                out << "\n";
            }
            std::printf("funding components %zu, settlement components %zu, clusters %zu -> %s\n",
                        art.funding_components.size(), art.settlement_components.size(),
                        art.patterns.clusters.size(), out_onchain.c_str());
            return 0;
        }
        if (cmd_offchain->parsed()) {
            const Snapshot snap = in_offchain.load();
            PipelineParams p = p_offchain;
            finish_params(p, metric_offchain, sweep_prefix_offchain, sweep_min_offchain);
            const OffchainArtifacts art = cluster_offchain(snap, p);
            std::ofstream out(out_offchain, std::ios::binary);
            out << "actor_id,evidence,nodes\n";
            for (const ActorCluster& c : art.actors) {
                out << c.actor_id << ",";
                bool first = true;
                for (const ActorEvidence ev : c.evidence) {
                    out << (first ? "" : ";") << to_string(ev);
                    first = false;
                }
                out << ",";
                first = true;
                for (const std::string& nid : c.nodes) {
                    out << (first ? "" : ";") << nid;
                    first = false;
                }
                out << "\n";
            }
            std::size_t clustered = 0;
            for (const ActorCluster& c : art.actors) clustered += c.nodes.size();
            std::printf("threshold %.2f: %zu actors covering %zu nodes -> %s\n", art.threshold_used,
                        art.actors.size(), clustered, out_offchain.c_str());
            return 0;
        }
        if (cmd_link->parsed()) {
            const Snapshot snap = in_link.load();
            PipelineParams p = p_link;
            finish_params(p, metric_link, sweep_prefix_link, sweep_min_link);
            const OnchainArtifacts onchain = cluster_onchain(snap, p.pattern_options);
            const OffchainArtifacts offchain = cluster_offchain(snap, p);
            const LinkArtifacts links = run_linking(snap, onchain, offchain.actors, p.link_options);
            std::ofstream out(out_link, std::ios::binary);
            out << "entity_id,nid,heuristic,iteration\n";
            for (const LinkRecord& r : links.alg2_full.records())
                out << r.entity_id << "," << r.nid << "," << to_string(r.heuristic) << ","
                    << r.iteration << "\n";
            std::printf("alg1 %zu, alg2 %zu, combined %zu links; contradictions %zu -> %s\n",
                        links.alg1.size(), links.alg2.size(), links.alg2_full.size(),
                        links.cross.contradictions.size(), out_link.c_str());
            return 0;
        }
        if (cmd_analyze->parsed() || cmd_pipeline->parsed()) {
            PipelineParams p = p_pipe;
            finish_params(p, metric_pipe, sweep_prefix_pipe, sweep_min_pipe);
            if (p.amounts_sat.empty())
                throw Error("config-invalid", "--amount is required for path metrics");
            const Snapshot snap = in_pipe.load();
            RunManifest manifest = in_pipe.manifest();
            manifest_params(manifest, p);
            const PipelineResult result = run_pipeline(snap, p, manifest, out_dir);
            std::printf("bundle written to %s (manifest %s)\n", out_dir.c_str(),
                        manifest.hash().c_str());
            std::printf("alg2 + on/off-chain: %zu links over %zu entities\n",
                        result.links.alg2_full.size(),
                        result.links.alg2_full.linked_entities().size());
            return 0;
        }
        if (cmd_synth->parsed()) {
            if (synth_seed_set) synth_cfg.seed = synth_seed;
            const auto [snap, gt] = generate(synth_cfg);
            write_snapshot_files(snap, synth_out);
            emit_ground_truth(gt, synth_out);
            std::printf("scenario: %zu transactions, %zu nodes, %zu channels -> %s\n",
                        snap.transactions.size(), snap.nodes.size(), snap.channels.size(),
                        synth_out.c_str());
            return 0;
        }
        if (cmd_plot->parsed()) {
            const fs::path out = plot_out.empty()
                                     ? fs::path(plot_bundle_dir) / (plot_kind + ".svg")
                                     : fs::path(plot_out);
            const bool has_data = plot_bundle(plot_bundle_dir, plot_kind, out);
            std::printf("chart -> %s\n", out.string().c_str());
            if (!has_data) {
                std::fprintf(stderr, "warning: empty series for chart '%s'\n", plot_kind.c_str());
                return 1;
            }
            return 0;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s] %s\n", e.code().c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
