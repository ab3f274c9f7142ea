#include "lnlink/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lnlink/svg.hpp"
#include "lnlink/util.hpp"
#include "lnlink/version.hpp"

namespace lnlink {

using nlohmann::json;

OnchainArtifacts cluster_onchain(const Snapshot& snap, const PatternOptions& opt) {
    OnchainArtifacts a;
    a.roles = derive_roles(snap);
    a.funding_components = ego_components(a.roles, GraphSide::funding, snap.entities);
    a.settlement_components = ego_components(a.roles, GraphSide::settlement, snap.entities);

    std::vector<EgoComponent> all = a.funding_components;
    all.insert(all.end(), a.settlement_components.begin(), a.settlement_components.end());
    a.patterns = apply_patterns(all, a.roles, opt);
    return a;
}

OffchainArtifacts cluster_offchain(const Snapshot& snap, const PipelineParams& params) {
    OffchainArtifacts a;
    a.metric = params.alias_metric;
    a.threshold_used = params.alias_threshold;
    if (params.sweep) {
        a.sweep = sweep_threshold(snap.nodes, params.alias_metric, *params.sweep);
        a.threshold_used = a.sweep->threshold;
    }
    a.alias_clusters = cluster_aliases(snap.nodes, params.alias_metric, a.threshold_used);
    a.alias_pure_clusters = asn_purity_filter(a.alias_clusters, snap.nodes);
    a.ip_clusters = cluster_by_ip(snap.nodes);
    a.actors = merge_actor_clusters(a.alias_pure_clusters, a.ip_clusters);
    return a;
}

LinkArtifacts run_linking(const Snapshot& snap, const OnchainArtifacts& onchain,
                          const std::vector<ActorCluster>& actors, const LinkOptions& opt) {
    LinkArtifacts l;
    const std::vector<ActorCluster> no_actors;
    const PatternResult no_patterns;

    l.alg1 = link_coin_reuse(snap, opt);
    l.alg2 = link_entity_reuse(snap, opt);
    l.alg1_onchain = combine_with_clusters(l.alg1, onchain.patterns, no_actors, snap, opt);
    l.alg1_full = combine_with_clusters(l.alg1, onchain.patterns, actors, snap, opt);
    l.alg2_onchain = combine_with_clusters(l.alg2, onchain.patterns, no_actors, snap, opt);
    l.alg2_full = combine_with_clusters(l.alg2, onchain.patterns, actors, snap, opt);
    l.cross = cross_validate(l.alg1, l.alg2);
    return l;
}

LinkedShare linked_share(const Snapshot& snap, const LinkSet& links) {
    LinkedShare s;
    std::size_t total_addresses = 0;
    for (const Entity& e : snap.entities) total_addresses += e.addresses.size();

    std::size_t linked_addresses = 0;
    const auto entities = links.linked_entities();
    for (const std::int64_t e : entities)
        if (e >= 0 && static_cast<std::size_t>(e) < snap.entities.size())
            linked_addresses += snap.entities[static_cast<std::size_t>(e)].addresses.size();

    if (total_addresses > 0)
        s.addresses = static_cast<double>(linked_addresses) / static_cast<double>(total_addresses);
    if (!snap.entities.empty())
        s.entities = static_cast<double>(entities.size()) / static_cast<double>(snap.entities.size());
    if (!snap.nodes.empty())
        s.nodes = static_cast<double>(links.linked_nodes().size()) /
                  static_cast<double>(snap.nodes.size());
    return s;
}

AnalysisArtifacts run_analysis(const Snapshot& snap, const LinkSet& links,
                               const std::vector<ActorCluster>& actors,
                               const PipelineParams& params) {
    AnalysisArtifacts a;
    const ChannelGraph graph = ChannelGraph::from_snapshot(snap);
    a.capacity = capacity_distribution(graph, snap, links, actors);

    std::map<std::string, std::set<std::string>> actor_nodes;
    for (const ActorCluster& c : actors) {
        std::set<std::string>& nodes = actor_nodes["actor-" + std::to_string(c.actor_id)];
        nodes.insert(c.nodes.begin(), c.nodes.end());
    }
    auto nodes_of_actor = [&](const std::string& label) -> std::set<std::string> {
        auto it = actor_nodes.find(label);
        if (it != actor_nodes.end()) return it->second;
        return {label};  // singleton actor named by its nid
    };

    const int top = std::min<int>(params.top_actors, static_cast<int>(a.capacity.size()));
    const std::int64_t probe_amount = params.amounts_sat.empty() ? 0 : params.amounts_sat.front();

    for (int rank = 0; rank < top; ++rank) {
        const std::string& label = a.capacity[static_cast<std::size_t>(rank)].actor;
        const auto nodes = nodes_of_actor(label);
        a.advantage.push_back(
            dos_advantage(graph, nodes, label, params.samples, probe_amount, params.seed));
        a.advantage_actors.push_back(label);
    }

    if (top > 0) {
        a.griefing_actor = a.capacity[0].actor;
        const auto nodes = nodes_of_actor(a.griefing_actor);
        for (int step = 1; step <= 5; ++step) {
            const std::int64_t budget = params.griefing_budget_sat * step / 5;
            a.griefing_curve.emplace_back(
                budget, griefing_reach(graph, nodes, budget, params.griefing_max_hops));
        }
        a.griefing = griefing_reach(graph, nodes, params.griefing_budget_sat,
                                    params.griefing_max_hops);

        std::set<std::string> top_set;
        for (int rank = 0; rank < top; ++rank) {
            const auto nodes_k = nodes_of_actor(a.capacity[static_cast<std::size_t>(rank)].actor);
            top_set.insert(nodes_k.begin(), nodes_k.end());
        }
        a.privacy_actor_nodes = top_set;
        std::set<int> actor_idx;
        for (const std::string& nid : top_set) {
            const int i = graph.index_of(nid);
            if (i >= 0) actor_idx.insert(i);
        }
        const auto pairs =
            sample_ordered_pairs(graph.node_count(), params.samples, params.seed);
        a.privacy.resize(params.amounts_sat.size());
        parallel_for(params.amounts_sat.size(), params.threads, [&](std::size_t i) {
            const std::int64_t amount = params.amounts_sat[i];
            PrivacyPoint p;
            p.amount_sat = amount;
            p.value_privacy = value_privacy(graph, actor_idx, amount, pairs);
            p.relationship_anonymity =
                relationship_anonymity_exposure(graph, actor_idx, amount, pairs);
            p.wormhole = wormhole_exposure(graph, actor_idx, amount, pairs);
            a.privacy[i] = p;
        });
    }
    return a;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io-error", "cannot write " + path.string());
    out << content;
}

std::string csv_header(const std::string& hash, const std::string& columns) {
    return "# manifest: " + hash + "\n" + columns + "\n";
}

std::string links_csv(const LinkSet& links, const std::string& hash) {
    std::ostringstream os;
    os << csv_header(hash, "entity_id,nid,heuristic,iteration,evidence");
    std::vector<LinkRecord> sorted = links.records();
    std::sort(sorted.begin(), sorted.end(), [](const LinkRecord& a, const LinkRecord& b) {
        if (a.entity_id != b.entity_id) return a.entity_id < b.entity_id;
        return a.nid < b.nid;
    });
    for (const LinkRecord& r : sorted) {
        os << r.entity_id << "," << r.nid << "," << to_string(r.heuristic) << "," << r.iteration
           << ",";
        for (std::size_t i = 0; i < r.supporting_txids.size(); ++i)
            os << (i ? ";" : "") << r.supporting_txids[i];
        os << "\n";
    }
    return os.str();
}

json share_json(const LinkedShare& s) {
    return json{{"pct_addresses", s.addresses * 100.0},
                {"pct_entities", s.entities * 100.0},
                {"pct_nodes", s.nodes * 100.0}};
}

}  // namespace

PipelineResult run_pipeline(const Snapshot& snap, const PipelineParams& params,
                            const RunManifest& manifest, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string hash = manifest.hash();
    manifest.write(out_dir / "manifest.json");

    PipelineResult result;
    result.onchain = cluster_onchain(snap, params.pattern_options);
    result.offchain = cluster_offchain(snap, params);
    result.links = run_linking(snap, result.onchain, result.offchain.actors, params.link_options);
    result.analysis = run_analysis(snap, result.links.alg2_full, result.offchain.actors, params);

    // entities.csv
    {
        std::ostringstream os;
        os << csv_header(hash, "entity_id,representative,address_count,service");
        for (const Entity& e : snap.entities) {
            os << e.entity_id << "," << (e.addresses.empty() ? "" : *e.addresses.begin()) << ","
               << e.addresses.size() << ","
               << (e.service_category ? to_string(*e.service_category) : "") << "\n";
        }
        write_text(out_dir / "entities.csv", os.str());
    }
    // clusters_onchain.csv
    {
        std::ostringstream os;
        os << csv_header(hash, "component_id,kind,entities");
        for (const PatternCluster& c : result.onchain.patterns.clusters) {
            os << c.component_id << "," << to_string(c.kind) << ",";
            bool first = true;
            for (const std::int64_t e : c.entities) {
                os << (first ? "" : ";") << e;
                first = false;
            }
            os << "\n";
        }
        write_text(out_dir / "clusters_onchain.csv", os.str());
    }
    // clusters_offchain.csv
    {
        std::ostringstream os;
        os << csv_header(hash, "actor_id,evidence,nodes");
        for (const ActorCluster& c : result.offchain.actors) {
            os << c.actor_id << ",";
            bool first = true;
            for (const ActorEvidence ev : c.evidence) {
                os << (first ? "" : ";") << to_string(ev);
                first = false;
            }
            os << ",";
            first = true;
            for (const std::string& nid : c.nodes) {
                os << (first ? "" : ";") << nid;
                first = false;
            }
            os << "\n";
        }
        write_text(out_dir / "clusters_offchain.csv", os.str());
    }
    // offchain_summary.json (dendrogram cut)
    {
        json j;
        j["_manifest"] = hash;
        j["metric"] = to_string(result.offchain.metric);
        j["threshold"] = result.offchain.threshold_used;
        j["alias_clusters"] = result.offchain.alias_clusters.size();
        j["alias_clusters_asn_pure"] = result.offchain.alias_pure_clusters.size();
        j["ip_clusters"] = result.offchain.ip_clusters.size();
        j["actors"] = result.offchain.actors.size();
        std::size_t clustered = 0;
        for (const ActorCluster& c : result.offchain.actors) clustered += c.nodes.size();
        j["clustered_nodes"] = clustered;
        if (result.offchain.sweep) {
            json curve = json::array();
            for (const auto& [t, n] : result.offchain.sweep->curve)
                curve.push_back(json{{"threshold", t}, {"clustered_nodes", n}});
            j["sweep_curve"] = std::move(curve);
        }
        write_text(out_dir / "offchain_summary.json", j.dump(2) + "\n");
    }
    // links
    write_text(out_dir / "links_alg1.csv", links_csv(result.links.alg1, hash));
    write_text(out_dir / "links_alg2.csv", links_csv(result.links.alg2, hash));
    write_text(out_dir / "links_alg1_combined.csv", links_csv(result.links.alg1_full, hash));
    write_text(out_dir / "links_alg2_combined.csv", links_csv(result.links.alg2_full, hash));

    // summary.json (per-configuration linked shares)
    {
        json j;
        j["_manifest"] = hash;
        j["totals"] = json{{"transactions", snap.transactions.size()},
                           {"entities", snap.entities.size()},
                           {"nodes", snap.nodes.size()},
                           {"channels", snap.channels.size()}};
        j["configurations"] = json{
            {"alg1", share_json(linked_share(snap, result.links.alg1))},
            {"alg1_onchain", share_json(linked_share(snap, result.links.alg1_onchain))},
            {"alg1_on_offchain", share_json(linked_share(snap, result.links.alg1_full))},
            {"alg2", share_json(linked_share(snap, result.links.alg2))},
            {"alg2_onchain", share_json(linked_share(snap, result.links.alg2_onchain))},
            {"alg2_on_offchain", share_json(linked_share(snap, result.links.alg2_full))},
        };
        j["cross_validation"] =
            json{{"intersection", result.links.cross.intersection_size},
                 {"contradictions", result.links.cross.contradictions.size()}};
        j["diagnostics"] = json{
            {"alg1_iterations", result.links.alg1.diag.iterations},
            {"alg2_iterations", result.links.alg2.diag.iterations},
            {"alg1_ambiguous_seeds", result.links.alg1.diag.ambiguous_seeds},
            {"alg2_ambiguous_seeds", result.links.alg2.diag.ambiguous_seeds},
            {"alg1_conflicts", result.links.alg1.diag.propagation_conflicts},
            {"alg2_conflicts", result.links.alg2.diag.propagation_conflicts},
        };
        write_text(out_dir / "summary.json", j.dump(2) + "\n");
    }
    // capacity.csv
    {
        std::ostringstream os;
        os << csv_header(hash, "rank,actor,node_count,capacity_msat,share");
        char buf[32];
        for (std::size_t i = 0; i < result.analysis.capacity.size(); ++i) {
            const CapacityRow& r = result.analysis.capacity[i];
            std::snprintf(buf, sizeof(buf), "%.9f", r.share);
            os << (i + 1) << "," << r.actor << "," << r.node_count << "," << r.capacity_msat << ","
               << buf << "\n";
        }
        write_text(out_dir / "capacity.csv", os.str());
    }
    // advantage.json
    {
        json j;
        j["_manifest"] = hash;
        j["samples"] = params.samples;
        j["seed"] = params.seed;
        j["amount_sat"] = params.amounts_sat.empty() ? 0 : params.amounts_sat.front();
        j["flow_model"] = "undirected-aggregate";
        json list = json::array();
        for (std::size_t i = 0; i < result.analysis.advantage.size(); ++i) {
            const AdvantageReport& r = result.analysis.advantage[i];
            list.push_back(json{{"rank", i + 1},
                                {"actor", result.analysis.advantage_actors[i]},
                                {"delta_r", r.delta_r},
                                {"delta_f", r.delta_f},
                                {"delta_s", r.delta_s},
                                {"sample_count", r.sample_count}});
        }
        j["actors"] = std::move(list);
        write_text(out_dir / "advantage.json", j.dump(2) + "\n");
    }
    // privacy.json
    {
        json j;
        j["_manifest"] = hash;
        j["samples"] = params.samples;
        j["seed"] = params.seed;
        json actor_set = json::array();
        for (const std::string& nid : result.analysis.privacy_actor_nodes) actor_set.push_back(nid);
        j["actor_nodes"] = std::move(actor_set);
        json series = json::array();
        for (const PrivacyPoint& p : result.analysis.privacy)
            series.push_back(json{{"amount_sat", p.amount_sat},
                                  {"value_privacy", p.value_privacy},
                                  {"relationship_anonymity", p.relationship_anonymity},
                                  {"wormhole", p.wormhole}});
        j["series"] = std::move(series);
        write_text(out_dir / "privacy.json", j.dump(2) + "\n");
    }
    // griefing.json
    {
        json j;
        j["_manifest"] = hash;
        j["actor"] = result.analysis.griefing_actor;
        j["budget_sat"] = params.griefing_budget_sat;
        j["max_hops"] = params.griefing_max_hops;
        j["blocked_channel_fraction"] = result.analysis.griefing.blocked_channel_fraction;
        j["blocked_capacity_fraction"] = result.analysis.griefing.blocked_capacity_fraction;
        j["paths_locked"] = result.analysis.griefing.paths_locked;
        j["budget_spent_sat"] = result.analysis.griefing.budget_spent_sat;
        json curve = json::array();
        for (const auto& [budget, rep] : result.analysis.griefing_curve)
            curve.push_back(json{{"budget_sat", budget},
                                 {"blocked_channel_fraction", rep.blocked_channel_fraction},
                                 {"blocked_capacity_fraction", rep.blocked_capacity_fraction}});
        j["curve"] = std::move(curve);
        write_text(out_dir / "griefing.json", j.dump(2) + "\n");
    }
    return result;
}

namespace {

json load_json(const std::filesystem::path& path, const std::string& kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("missing-metric", "chart '" + kind + "' needs " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("parse-error", path.string() + ": " + e.what());
    }
    return j;
}

}  // namespace

bool plot_bundle(const std::filesystem::path& bundle_dir, const std::string& kind,
                 const std::filesystem::path& svg_out) {
    ChartSpec spec;

    if (kind == "privacy" || kind == "wormhole") {
        const json j = load_json(bundle_dir / "privacy.json", kind);
        spec.manifest_hash = j.value("_manifest", "");
        spec.x_label = "payment amount (sat)";
        spec.y_label = "fraction of cheapest paths";
        ChartSeries vp{"value privacy broken", {}}, ra{"relationship anonymity", {}},
            wh{"wormhole prone", {}};
        for (const json& p : j.value("series", json::array())) {
            const double x = p.at("amount_sat").get<double>();
            vp.points.emplace_back(x, p.at("value_privacy").get<double>());
            ra.points.emplace_back(x, p.at("relationship_anonymity").get<double>());
            wh.points.emplace_back(x, p.at("wormhole").get<double>());
        }
        if (kind == "privacy") {
            spec.title = "Cheapest paths exposed to the top actors";
            spec.series = {vp, ra};
        } else {
            spec.title = "Cheapest paths prone to wormholes";
            spec.series = {wh};
        }
    } else if (kind == "dos") {
        const json j = load_json(bundle_dir / "advantage.json", kind);
        spec.manifest_hash = j.value("_manifest", "");
        spec.title = "Adversary advantage by actor rank";
        spec.x_label = "actor rank";
        spec.y_label = "advantage";
        ChartSeries dr{"delta_r", {}}, df{"delta_f", {}}, ds{"delta_s", {}};
        for (const json& p : j.value("actors", json::array())) {
            const double x = p.at("rank").get<double>();
            dr.points.emplace_back(x, p.at("delta_r").get<double>());
            df.points.emplace_back(x, p.at("delta_f").get<double>());
            ds.points.emplace_back(x, p.at("delta_s").get<double>());
        }
        spec.series = {dr, df, ds};
    } else if (kind == "griefing") {
        const json j = load_json(bundle_dir / "griefing.json", kind);
        spec.manifest_hash = j.value("_manifest", "");
        spec.title = "Griefing reach of the top actor";
        spec.x_label = "lock budget (sat)";
        spec.y_label = "blocked fraction";
        ChartSeries ch{"channels", {}}, cap{"capacity", {}};
        for (const json& p : j.value("curve", json::array())) {
            const double x = p.at("budget_sat").get<double>();
            ch.points.emplace_back(x, p.at("blocked_channel_fraction").get<double>());
            cap.points.emplace_back(x, p.at("blocked_capacity_fraction").get<double>());
        }
        spec.series = {ch, cap};
    } else if (kind == "capacity") {
        // capacity.csv: rank,actor,node_count,capacity_msat,share
        std::ifstream in(bundle_dir / "capacity.csv", std::ios::binary);
        if (!in) throw Error("missing-metric", "chart 'capacity' needs capacity.csv");
        spec.title = "Capacity share by actor rank";
        spec.x_label = "actor rank";
        spec.y_label = "share of total capacity";
        spec.bars = true;
        ChartSeries shares{"capacity share", {}};
        std::string line;
        int rank = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (line.rfind("# manifest: ", 0) == 0) {
                spec.manifest_hash = line.substr(12);
                continue;
            }
            if (line.rfind("rank,", 0) == 0) continue;
            const auto f = split(line, ',');
            if (f.size() < 5) continue;
            ++rank;
            if (rank > 15) break;
            shares.points.emplace_back(std::stod(f[0]), std::stod(f[4]));
        }
        spec.series = {shares};
    } else {
        throw Error("missing-metric", "unknown chart kind '" + kind + "'");
    }

    write_text(svg_out, render_chart(spec));
    return !chart_is_empty(spec);
}

}  // namespace lnlink
