#include "lnlink/linking.hpp"

#include <algorithm>

namespace lnlink {

const std::set<std::string> LinkSet::empty_;

bool LinkSet::add(LinkRecord rec) {
    auto& nodes = by_entity_[rec.entity_id];
    if (!nodes.insert(rec.nid).second) return false;
    if (nodes.size() > 1) diag.multi_node_entities.insert(rec.entity_id);
    records_.push_back(std::move(rec));
    return true;
}

bool LinkSet::contains(std::int64_t entity, const std::string& nid) const {
    auto it = by_entity_.find(entity);
    return it != by_entity_.end() && it->second.count(nid) > 0;
}

const std::set<std::string>& LinkSet::nodes_of(std::int64_t entity) const {
    auto it = by_entity_.find(entity);
    return it == by_entity_.end() ? empty_ : it->second;
}

std::set<std::int64_t> LinkSet::linked_entities() const {
    std::set<std::int64_t> out;
    for (const auto& [e, nodes] : by_entity_)
        if (!nodes.empty()) out.insert(e);
    return out;
}

std::set<std::string> LinkSet::linked_nodes() const {
    std::set<std::string> out;
    for (const auto& [e, nodes] : by_entity_) out.insert(nodes.begin(), nodes.end());
    return out;
}

std::vector<EligibleSettlement> eligible_settlements(const Snapshot& snap) {
    std::vector<EligibleSettlement> out;
    for (std::size_t i = 0; i < snap.channels.size(); ++i) {
        const Channel& c = snap.channels[i];
        if (!c.settlement_txid.has_value()) continue;
        if (c.settlement_kind != SettlementKind::cooperative_2_output) continue;
        const Transaction* settle = snap.find_tx(*c.settlement_txid);
        if (settle == nullptr || settle->is_coinjoin) continue;
        std::set<std::int64_t> entities;
        for (const TxOutput& o : settle->outputs) {
            const std::int64_t e = snap.entity_of(o.address);
            if (e >= 0) entities.insert(e);
        }
        if (entities.size() != 2) continue;
        EligibleSettlement s;
        s.txid = *c.settlement_txid;
        s.channel_index = i;
        auto it = entities.begin();
        s.output_entities[0] = *it++;
        s.output_entities[1] = *it;
        out.push_back(std::move(s));
    }
    return out;
}

std::map<std::int64_t, std::vector<std::size_t>> channels_by_funding_entity(const Snapshot& snap) {
    std::map<std::int64_t, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < snap.channels.size(); ++i) {
        const Transaction* funding = snap.find_tx(snap.channels[i].chpoint.funding_txid);
        if (funding == nullptr || funding->is_coinjoin) continue;
        std::set<std::int64_t> funders;
        for (const TxInput& in : funding->inputs) {
            const std::int64_t e = snap.entity_of(in.address);
            if (e >= 0) funders.insert(e);
        }
        for (const std::int64_t e : funders) out[e].push_back(i);
    }
    return out;
}

namespace {

// Activity periods are needed repeatedly for guard checks; unknown or
// channel-less nodes yield no period and fail every overlap test.
class PeriodCache {
public:
    explicit PeriodCache(const Snapshot& snap) : snap_(snap) {}

    const std::optional<ActivityPeriod>& get(const std::string& nid) {
        auto it = cache_.find(nid);
        if (it != cache_.end()) return it->second;
        std::optional<ActivityPeriod> p;
        try {
            p = activity_period(snap_, nid);
        } catch (const Error&) {
        }
        return cache_.emplace(nid, p).first->second;
    }

    bool overlap(const std::string& a, const std::string& b) {
        const auto& pa = get(a);
        const auto& pb = get(b);
        return pa.has_value() && pb.has_value() && periods_overlap(*pa, *pb);
    }

private:
    const Snapshot& snap_;
    std::map<std::string, std::optional<ActivityPeriod>> cache_;
};

std::set<std::string> channel_nodes(const Channel& c) { return {c.node1, c.node2}; }

void run_propagation(LinkSet& links, const Snapshot& snap,
                     const std::vector<EligibleSettlement>& settlements, const LinkOptions& opt,
                     int first_iteration = 1) {
    int iteration = first_iteration;
    while (iteration <= opt.iteration_cap) {
        if (propagate_counterparty(links, snap, settlements, iteration) == 0) break;
        links.diag.iterations = iteration;
        ++iteration;
    }
}

}  // namespace

int propagate_counterparty(LinkSet& links, const Snapshot& snap,
                           const std::vector<EligibleSettlement>& settlements, int iteration) {
    // Barrier semantics: every candidate is derived from the state at the
    // start of the round, then applied in one batch.
    std::vector<LinkRecord> pending;
    for (const EligibleSettlement& s : settlements) {
        const Channel& c = snap.channels[s.channel_index];
        const std::string& na = c.node1;
        const std::string& nb = c.node2;

        bool conflict = false;
        std::vector<LinkRecord> candidates;
        for (int side = 0; side < 2; ++side) {
            const std::int64_t known = s.output_entities[side];
            const std::int64_t other = s.output_entities[1 - side];
            const bool at_a = links.contains(known, na);
            const bool at_b = links.contains(known, nb);
            if (at_a && at_b) {
                // the counterpart would be linked to both channel nodes
                conflict = true;
                continue;
            }
            if (!at_a && !at_b) continue;
            const std::string& target = at_a ? nb : na;
            if (links.contains(other, target)) continue;
            candidates.push_back(LinkRecord{other, target, LinkHeuristic::counterparty, iteration,
                                            {s.txid}});
        }
        if (conflict) {
            ++links.diag.propagation_conflicts;
            continue;
        }
        pending.insert(pending.end(), std::make_move_iterator(candidates.begin()),
                       std::make_move_iterator(candidates.end()));
    }
    int added = 0;
    for (LinkRecord& rec : pending)
        if (links.add(std::move(rec))) ++added;
    return added;
}

LinkSet link_coin_reuse(const Snapshot& snap, const LinkOptions& opt) {
    LinkSet links;
    PeriodCache periods(snap);
    const auto settlements = eligible_settlements(snap);
    const auto funded = channels_by_funding_entity(snap);

    // settlement lookup per (channel, entity)
    std::map<std::size_t, const EligibleSettlement*> settlement_of_channel;
    for (const auto& s : settlements) settlement_of_channel[s.channel_index] = &s;

    for (const auto& [entity, channel_ids] : funded) {
        if (channel_ids.size() < 2) continue;
        for (const std::size_t c1 : channel_ids) {
            auto sit = settlement_of_channel.find(c1);
            if (sit == settlement_of_channel.end()) continue;
            const EligibleSettlement& s = *sit->second;
            if (s.output_entities[0] != entity && s.output_entities[1] != entity) continue;

            for (const std::size_t c2 : channel_ids) {
                if (c2 == c1) continue;
                const auto nodes1 = channel_nodes(snap.channels[c1]);
                const auto nodes2 = channel_nodes(snap.channels[c2]);
                std::vector<std::string> shared;
                std::set_intersection(nodes1.begin(), nodes1.end(), nodes2.begin(), nodes2.end(),
                                      std::back_inserter(shared));
                if (shared.size() != 1) {
                    ++links.diag.ambiguous_seeds;
                    continue;
                }
                std::vector<std::string> outsiders;
                std::set_symmetric_difference(nodes1.begin(), nodes1.end(), nodes2.begin(),
                                              nodes2.end(), std::back_inserter(outsiders));
                if (opt.activity_guard &&
                    !(outsiders.size() == 2 && periods.overlap(outsiders[0], outsiders[1])))
                    continue;
                links.add(LinkRecord{entity, shared[0], LinkHeuristic::coin_reuse, 0,
                                     {snap.channels[c1].chpoint.funding_txid, s.txid,
                                      snap.channels[c2].chpoint.funding_txid}});
            }
        }
    }

    run_propagation(links, snap, settlements, opt);
    return links;
}

LinkSet link_entity_reuse(const Snapshot& snap, const LinkOptions& opt) {
    LinkSet links;
    PeriodCache periods(snap);
    const auto funded = channels_by_funding_entity(snap);

    for (const auto& [entity, channel_ids] : funded) {
        if (channel_ids.size() < 2) continue;  // N_C > 1

        std::set<std::string> common = channel_nodes(snap.channels[channel_ids[0]]);
        for (std::size_t k = 1; k < channel_ids.size() && !common.empty(); ++k) {
            const auto nodes = channel_nodes(snap.channels[channel_ids[k]]);
            std::set<std::string> next;
            std::set_intersection(common.begin(), common.end(), nodes.begin(), nodes.end(),
                                  std::inserter(next, next.begin()));
            common = std::move(next);
        }
        if (common.size() != 1) {
            ++links.diag.ambiguous_seeds;
            continue;
        }
        const std::string& node = *common.begin();

        std::set<std::string> others;
        std::vector<std::string> evidence;
        for (const std::size_t ci : channel_ids) {
            for (const std::string& n : channel_nodes(snap.channels[ci]))
                if (n != node) others.insert(n);
            evidence.push_back(snap.channels[ci].chpoint.funding_txid);
        }
        if (opt.activity_guard) {
            bool overlapping_pair = false;
            for (auto it = others.begin(); it != others.end() && !overlapping_pair; ++it) {
                auto jt = it;
                for (++jt; jt != others.end(); ++jt) {
                    if (periods.overlap(*it, *jt)) {
                        overlapping_pair = true;
                        break;
                    }
                }
            }
            if (!overlapping_pair) continue;
        }
        links.add(LinkRecord{entity, node, LinkHeuristic::entity_reuse, 0, std::move(evidence)});
    }

    run_propagation(links, snap, eligible_settlements(snap), opt);
    return links;
}

LinkSet combine_with_clusters(const LinkSet& links, const PatternResult& patterns,
                              const std::vector<ActorCluster>& actors, const Snapshot& snap,
                              const LinkOptions& opt) {
    LinkSet out;
    out.diag = links.diag;
    for (const LinkRecord& rec : links.records()) out.add(rec);

    const auto settlements = eligible_settlements(snap);

    // Super-entity inheritance and propagation feed each other; repeat until
    // neither adds a link.
    int iteration = out.diag.iterations;
    for (;;) {
        int inherited = 0;
        // snapshot of current records; additions must not invalidate iteration
        const std::vector<LinkRecord> current(out.records());
        for (const LinkRecord& rec : current) {
            const auto* group = patterns.group_of(rec.entity_id);
            if (group == nullptr) continue;
            for (const std::int64_t sibling : *group) {
                if (sibling == rec.entity_id || out.contains(sibling, rec.nid)) continue;
                if (out.add(LinkRecord{sibling, rec.nid, LinkHeuristic::indirect_onchain,
                                       rec.iteration, rec.supporting_txids}))
                    ++inherited;
            }
        }
        int propagated = 0;
        while (iteration < opt.iteration_cap) {
            const int n = propagate_counterparty(out, snap, settlements, iteration + 1);
            if (n == 0) break;
            propagated += n;
            ++iteration;
            out.diag.iterations = iteration;
        }
        if (inherited == 0 && propagated == 0) break;
        if (iteration >= opt.iteration_cap) break;
    }

    // Actor clusters: every member of a cluster containing a linked node
    // inherits that node's entity links.
    const std::vector<LinkRecord> direct(out.records());
    for (const ActorCluster& actor : actors) {
        for (const LinkRecord& rec : direct) {
            if (!actor.nodes.count(rec.nid)) continue;
            for (const std::string& member : actor.nodes) {
                if (member == rec.nid || out.contains(rec.entity_id, member)) continue;
                out.add(LinkRecord{rec.entity_id, member, LinkHeuristic::indirect_actor,
                                   rec.iteration, {}});
            }
        }
    }
    return out;
}

CrossValidation cross_validate(const LinkSet& a, const LinkSet& b) {
    CrossValidation cv;
    for (const LinkRecord& rec : a.records())
        if (b.contains(rec.entity_id, rec.nid)) ++cv.intersection_size;

    for (const std::int64_t e : a.linked_entities()) {
        const auto& na = a.nodes_of(e);
        const auto& nb = b.nodes_of(e);
        if (na.empty() || nb.empty()) continue;
        std::vector<std::string> shared;
        std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                              std::back_inserter(shared));
        if (shared.empty()) cv.contradictions.insert(e);
    }
    return cv;
}

ValidationReport validate_against_ground_truth(const LinkSet& links, const LinkLabels& labels) {
    ValidationReport report;

    auto correct = [&](const LinkRecord& rec) {
        auto eu = labels.entity_user.find(rec.entity_id);
        auto nu = labels.node_user.find(rec.nid);
        return eu != labels.entity_user.end() && nu != labels.node_user.end() &&
               eu->second == nu->second;
    };

    std::map<LinkHeuristic, std::set<std::string>> validated_nodes;
    std::set<std::string> validated_overall;
    for (const LinkRecord& rec : links.records()) {
        HeuristicScore& score = report.per_heuristic[rec.heuristic];
        ++score.links;
        ++report.overall.links;
        if (correct(rec)) {
            ++score.correct;
            ++report.overall.correct;
            validated_nodes[rec.heuristic].insert(rec.nid);
            validated_overall.insert(rec.nid);
        }
    }

    for (const auto& [entity, nid, kind] : labels.injected) {
        HeuristicScore& score = report.per_heuristic[kind];
        ++score.injected;
        ++report.overall.injected;
        if (links.contains(entity, nid)) {
            ++score.recalled;
            ++report.overall.recalled;
        }
    }

    for (auto& [kind, score] : report.per_heuristic) {
        score.validated_nodes = validated_nodes[kind].size();
        if (score.links > 0)
            score.precision = static_cast<double>(score.correct) / static_cast<double>(score.links);
        if (score.injected > 0)
            score.recall = static_cast<double>(score.recalled) / static_cast<double>(score.injected);
    }
    report.overall.validated_nodes = validated_overall.size();
    if (report.overall.links > 0)
        report.overall.precision =
            static_cast<double>(report.overall.correct) / static_cast<double>(report.overall.links);
    if (report.overall.injected > 0)
        report.overall.recall = static_cast<double>(report.overall.recalled) /
                                static_cast<double>(report.overall.injected);
    return report;
}

std::string to_string(LinkHeuristic h) {
    switch (h) {
        case LinkHeuristic::coin_reuse: return "coin-reuse";
        case LinkHeuristic::entity_reuse: return "entity-reuse";
        case LinkHeuristic::counterparty: return "counterparty";
        case LinkHeuristic::indirect_actor: return "indirect-actor";
        case LinkHeuristic::indirect_onchain: return "indirect-onchain";
    }
    return "coin-reuse";
}

std::optional<LinkHeuristic> link_heuristic_from_string(const std::string& s) {
    if (s == "coin-reuse") return LinkHeuristic::coin_reuse;
    if (s == "entity-reuse") return LinkHeuristic::entity_reuse;
    if (s == "counterparty") return LinkHeuristic::counterparty;
    if (s == "indirect-actor") return LinkHeuristic::indirect_actor;
    if (s == "indirect-onchain") return LinkHeuristic::indirect_onchain;
    return std::nullopt;
}

}  // namespace lnlink
