#include "lnlink/impact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>

#include "lnlink/error.hpp"
#include "lnlink/util.hpp"

namespace lnlink {

int ChannelGraph::index_of(const std::string& nid) const {
    auto it = std::lower_bound(nids.begin(), nids.end(), nid);
    if (it == nids.end() || *it != nid) return -1;
    return static_cast<int>(it - nids.begin());
}

std::int64_t ChannelGraph::total_capacity_sat() const {
    std::int64_t total = 0;
    for (const Edge& e : edges) total += e.capacity_sat;
    return total;
}

void ChannelGraph::rebuild_adjacency() {
    adjacency.assign(nids.size(), {});
    for (std::size_t i = 0; i < edges.size(); ++i) {
        adjacency[static_cast<std::size_t>(edges[i].a)].push_back(i);
        adjacency[static_cast<std::size_t>(edges[i].b)].push_back(i);
    }
}

ChannelGraph ChannelGraph::from_snapshot(const Snapshot& snap, std::optional<std::int64_t> at_time) {
    const std::int64_t t = at_time.value_or(snap.snapshot_end_time);
    ChannelGraph g;
    g.nids.reserve(snap.nodes.size());
    for (const NodeRecord& n : snap.nodes) g.nids.push_back(n.nid);
    std::sort(g.nids.begin(), g.nids.end());

    for (const Channel& c : snap.channels) {
        if (c.open_time.value_or(0) > t) continue;
        if (c.close_time.has_value() && *c.close_time <= t) continue;
        const int a = g.index_of(c.node1);
        const int b = g.index_of(c.node2);
        if (a < 0 || b < 0) continue;
        Edge e;
        e.chpoint = c.chpoint.str();
        e.capacity_sat = c.capacity_sat;
        if (c.node1 < c.node2) {
            e.a = a;
            e.b = b;
            e.policy_ab = c.policy1;
            e.policy_ba = c.policy2;
        } else {
            e.a = b;
            e.b = a;
            e.policy_ab = c.policy2;
            e.policy_ba = c.policy1;
        }
        g.edges.push_back(std::move(e));
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const Edge& x, const Edge& y) { return x.chpoint < y.chpoint; });
    g.rebuild_adjacency();
    return g;
}

std::int64_t hop_fee_msat(const FeePolicy& policy, std::int64_t amount_sat) {
    const std::int64_t amount_msat = amount_sat * 1000;
    return policy.base_fee_msat + amount_msat * policy.rate_ppm / 1'000'000;
}

std::optional<PathResult> cheapest_path(const ChannelGraph& g, int src, int dst,
                                        std::int64_t amount_sat) {
    const std::size_t n = g.node_count();
    if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= n ||
        static_cast<std::size_t>(dst) >= n || src == dst)
        return std::nullopt;

    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    std::vector<std::int64_t> fee(n, kInf);
    std::vector<int> hops(n, std::numeric_limits<int>::max());
    std::vector<int> parent(n, -1);
    std::vector<bool> done(n, false);

    auto path_to = [&](int v) {
        std::vector<int> path;
        for (int x = v; x != -1; x = parent[x]) path.push_back(x);
        std::reverse(path.begin(), path.end());
        return path;
    };

    using Key = std::tuple<std::int64_t, int, int>;  // fee, hops, node index
    std::priority_queue<Key, std::vector<Key>, std::greater<>> queue;
    fee[static_cast<std::size_t>(src)] = 0;
    hops[static_cast<std::size_t>(src)] = 0;
    queue.emplace(0, 0, src);

    while (!queue.empty()) {
        const auto [f, h, u] = queue.top();
        queue.pop();
        if (done[static_cast<std::size_t>(u)]) continue;
        if (f != fee[static_cast<std::size_t>(u)] || h != hops[static_cast<std::size_t>(u)])
            continue;
        done[static_cast<std::size_t>(u)] = true;
        if (u == dst) break;

        // Cheapest eligible policy per neighbour; parallel channels collapse.
        std::map<int, std::int64_t> best_hop;
        for (const std::size_t ei : g.adjacency[static_cast<std::size_t>(u)]) {
            const ChannelGraph::Edge& e = g.edges[ei];
            if (e.capacity_sat < amount_sat) continue;
            const int v = e.a == u ? e.b : e.a;
            const FeePolicy& pol = e.a == u ? e.policy_ab : e.policy_ba;
            const std::int64_t cost = u == src ? 0 : hop_fee_msat(pol, amount_sat);
            auto it = best_hop.find(v);
            if (it == best_hop.end() || cost < it->second) best_hop[v] = cost;
        }
        for (const auto& [v, cost] : best_hop) {
            const std::size_t vi = static_cast<std::size_t>(v);
            if (done[vi]) continue;
            const std::int64_t nf = f + cost;
            const int nh = h + 1;
            if (nf < fee[vi] || (nf == fee[vi] && nh < hops[vi])) {
                fee[vi] = nf;
                hops[vi] = nh;
                parent[vi] = u;
                queue.emplace(nf, nh, v);
            } else if (nf == fee[vi] && nh == hops[vi] && parent[vi] != u) {
                // Same fee and length: keep the lexicographically smaller
                // route. Candidate predecessors settle before v pops, so the
                // comparison sees final prefixes.
                auto current = path_to(v);
                auto candidate = path_to(u);
                candidate.push_back(v);
                if (candidate < current) parent[vi] = u;
            }
        }
    }

    const std::size_t di = static_cast<std::size_t>(dst);
    if (fee[di] == kInf) return std::nullopt;
    return PathResult{path_to(dst), fee[di]};
}

double advantage_delta(double before, double after) {
    if (before == 0.0) return 0.0;
    return std::abs(1.0 - after / before);
}

namespace {

// Undirected view with per-pair aggregated capacity, amount filtering and a
// removal mask; shared by the robustness metrics.
struct FlowGraph {
    int n = 0;
    std::vector<std::vector<std::pair<int, std::int64_t>>> adj;  // (neighbour, capacity)

    static FlowGraph build(const ChannelGraph& g, const std::vector<bool>& removed) {
        FlowGraph f;
        f.n = static_cast<int>(g.node_count());
        std::map<std::pair<int, int>, std::int64_t> caps;
        for (const ChannelGraph::Edge& e : g.edges) {
            if (removed[static_cast<std::size_t>(e.a)] || removed[static_cast<std::size_t>(e.b)])
                continue;
            caps[{std::min(e.a, e.b), std::max(e.a, e.b)}] += e.capacity_sat;
        }
        f.adj.assign(static_cast<std::size_t>(f.n), {});
        for (const auto& [key, cap] : caps) {
            f.adj[static_cast<std::size_t>(key.first)].emplace_back(key.second, cap);
            f.adj[static_cast<std::size_t>(key.second)].emplace_back(key.first, cap);
        }
        return f;
    }
};

// Dinic max-flow on the undirected capacity graph.
class MaxFlow {
public:
    explicit MaxFlow(const FlowGraph& g) : n_(g.n), head_(static_cast<std::size_t>(g.n), -1) {
        for (int u = 0; u < g.n; ++u)
            for (const auto& [v, cap] : g.adj[static_cast<std::size_t>(u)])
                if (u < v) add_undirected(u, v, cap);
    }

    std::int64_t run(int s, int t) {
        for (Arc& a : arcs_) a.flow = 0;
        std::int64_t total = 0;
        while (bfs(s, t)) {
            iter_ = head_;
            std::int64_t f;
            while ((f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) > 0) total += f;
        }
        return total;
    }

private:
    struct Arc {
        int to;
        int next;
        std::int64_t cap;
        std::int64_t flow;
    };

    void add_undirected(int u, int v, std::int64_t cap) {
        add_arc(u, v, cap);
        add_arc(v, u, cap);
    }
    void add_arc(int u, int v, std::int64_t cap) {
        arcs_.push_back(Arc{v, head_[static_cast<std::size_t>(u)], cap, 0});
        head_[static_cast<std::size_t>(u)] = static_cast<int>(arcs_.size()) - 1;
    }

    bool bfs(int s, int t) {
        level_.assign(static_cast<std::size_t>(n_), -1);
        std::queue<int> q;
        level_[static_cast<std::size_t>(s)] = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int i = head_[static_cast<std::size_t>(u)]; i != -1; i = arcs_[static_cast<std::size_t>(i)].next) {
                const Arc& a = arcs_[static_cast<std::size_t>(i)];
                if (level_[static_cast<std::size_t>(a.to)] == -1 && residual(i) > 0) {
                    level_[static_cast<std::size_t>(a.to)] = level_[static_cast<std::size_t>(u)] + 1;
                    q.push(a.to);
                }
            }
        }
        return level_[static_cast<std::size_t>(t)] != -1;
    }

    std::int64_t dfs(int u, int t, std::int64_t limit) {
        if (u == t || limit == 0) return limit;
        for (int& i = iter_[static_cast<std::size_t>(u)]; i != -1;
             i = arcs_[static_cast<std::size_t>(i)].next) {
            const Arc& a = arcs_[static_cast<std::size_t>(i)];
            if (level_[static_cast<std::size_t>(a.to)] != level_[static_cast<std::size_t>(u)] + 1 ||
                residual(i) <= 0)
                continue;
            const std::int64_t pushed = dfs(a.to, t, std::min(limit, residual(i)));
            if (pushed > 0) {
                arcs_[static_cast<std::size_t>(i)].flow += pushed;
                arcs_[static_cast<std::size_t>(i ^ 1)].flow -= pushed;
                return pushed;
            }
        }
        return 0;
    }

    std::int64_t residual(int i) const {
        return arcs_[static_cast<std::size_t>(i)].cap - arcs_[static_cast<std::size_t>(i)].flow;
    }

    int n_;
    std::vector<int> head_;
    std::vector<Arc> arcs_;
    std::vector<int> level_;
    std::vector<int> iter_;
};

std::size_t largest_component(const FlowGraph& g, const std::vector<bool>& removed) {
    std::vector<bool> seen(static_cast<std::size_t>(g.n), false);
    std::size_t best = 0;
    for (int s = 0; s < g.n; ++s) {
        if (seen[static_cast<std::size_t>(s)] || removed[static_cast<std::size_t>(s)]) continue;
        std::size_t size = 0;
        std::queue<int> q;
        seen[static_cast<std::size_t>(s)] = true;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            ++size;
            for (const auto& [v, cap] : g.adj[static_cast<std::size_t>(u)]) {
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = true;
                    q.push(v);
                }
            }
        }
        best = std::max(best, size);
    }
    return best;
}

bool reachable_at_amount(const FlowGraph& g, int s, int t, std::int64_t amount) {
    if (s == t) return true;
    std::vector<bool> seen(static_cast<std::size_t>(g.n), false);
    std::queue<int> q;
    seen[static_cast<std::size_t>(s)] = true;
    q.push(s);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (const auto& [v, cap] : g.adj[static_cast<std::size_t>(u)]) {
            if (cap < amount || seen[static_cast<std::size_t>(v)]) continue;
            if (v == t) return true;
            seen[static_cast<std::size_t>(v)] = true;
            q.push(v);
        }
    }
    return false;
}

}  // namespace

std::vector<std::pair<int, int>> all_ordered_pairs(std::size_t n) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
    return pairs;
}

std::vector<std::pair<int, int>> sample_ordered_pairs(std::size_t n, int count, std::uint64_t seed) {
    std::vector<std::pair<int, int>> pairs;
    if (n < 2 || count <= 0) return pairs;
    std::mt19937_64 rng(seed);
    pairs.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const int a = static_cast<int>(uniform_below(rng, n));
        int b = static_cast<int>(uniform_below(rng, n - 1));
        if (b >= a) ++b;
        pairs.emplace_back(a, b);
    }
    return pairs;
}

AdvantageReport dos_advantage(const ChannelGraph& g, const std::set<std::string>& actor_nodes,
                              const std::string& actor_label, int samples, std::int64_t amount_sat,
                              std::uint64_t seed) {
    const std::size_t n = g.node_count();
    std::vector<bool> removed(n, false);
    bool any = false;
    for (const std::string& nid : actor_nodes) {
        const int i = g.index_of(nid);
        if (i >= 0) {
            removed[static_cast<std::size_t>(i)] = true;
            any = true;
        }
    }
    if (!any) throw Error("actor-unknown", "no node of actor '" + actor_label + "' is in the graph");

    const std::vector<bool> none(n, false);
    const FlowGraph before = FlowGraph::build(g, none);
    const FlowGraph after = FlowGraph::build(g, removed);

    AdvantageReport report;
    report.removed_actor = actor_label;
    report.seed = seed;
    report.amount_sat = amount_sat;

    const double r_before = static_cast<double>(largest_component(before, none));
    const double r_after = static_cast<double>(largest_component(after, removed));
    report.delta_r = advantage_delta(r_before, r_after);

    // Pairs drawn from surviving nodes only, so both measurements see the
    // same population.
    std::vector<int> survivors;
    for (std::size_t i = 0; i < n; ++i)
        if (!removed[i]) survivors.push_back(static_cast<int>(i));
    if (survivors.size() < 2 || samples <= 0) return report;

    std::mt19937_64 rng(seed);
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const std::size_t a = uniform_below(rng, survivors.size());
        std::size_t b = uniform_below(rng, survivors.size() - 1);
        if (b >= a) ++b;
        pairs.emplace_back(survivors[a], survivors[b]);
    }
    report.sample_count = samples;

    MaxFlow flow_before(before);
    MaxFlow flow_after(after);
    double sum_before = 0.0, sum_after = 0.0;
    std::int64_t ok_before = 0, ok_after = 0;
    for (const auto& [s, t] : pairs) {
        sum_before += static_cast<double>(flow_before.run(s, t));
        sum_after += static_cast<double>(flow_after.run(s, t));
        ok_before += reachable_at_amount(before, s, t, amount_sat) ? 1 : 0;
        ok_after += reachable_at_amount(after, s, t, amount_sat) ? 1 : 0;
    }
    const double count = static_cast<double>(pairs.size());
    report.delta_f = advantage_delta(sum_before / count, sum_after / count);
    report.delta_s = advantage_delta(static_cast<double>(ok_before) / count,
                                     static_cast<double>(ok_after) / count);
    return report;
}

namespace {

// Hop-limited min-cost path on residual capacities; prefers nearly saturated
// channels so locks target cheap-to-block routes.
struct GriefCandidate {
    std::vector<std::size_t> edge_ids;
    std::vector<int> nodes;
    std::int64_t lock = 0;          // min residual along the path
    std::int64_t blocked_cap = 0;   // capacity of channels this lock saturates
};

std::optional<GriefCandidate> grief_path(const ChannelGraph& g,
                                         const std::vector<std::int64_t>& residual, int s, int t,
                                         int max_hops, std::int64_t budget,
                                         std::optional<std::size_t> banned_edge = std::nullopt) {
    const std::size_t n = g.node_count();
    // cost[h][v] = min residual-sum over walks of at most h hops
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    std::vector<std::vector<std::int64_t>> cost(
        static_cast<std::size_t>(max_hops) + 1, std::vector<std::int64_t>(n, kInf));
    std::vector<std::vector<std::pair<int, std::size_t>>> from(
        static_cast<std::size_t>(max_hops) + 1,
        std::vector<std::pair<int, std::size_t>>(n, {-1, 0}));
    cost[0][static_cast<std::size_t>(s)] = 0;

    for (int h = 1; h <= max_hops; ++h) {
        cost[static_cast<std::size_t>(h)] = cost[static_cast<std::size_t>(h - 1)];
        from[static_cast<std::size_t>(h)] = from[static_cast<std::size_t>(h - 1)];
        for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
            if (residual[ei] <= 0 || (banned_edge && *banned_edge == ei)) continue;
            const ChannelGraph::Edge& e = g.edges[ei];
            for (const auto& [u, v] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
                const std::int64_t base = cost[static_cast<std::size_t>(h - 1)][static_cast<std::size_t>(u)];
                if (base == kInf) continue;
                const std::int64_t c = base + residual[ei];
                if (c < cost[static_cast<std::size_t>(h)][static_cast<std::size_t>(v)]) {
                    cost[static_cast<std::size_t>(h)][static_cast<std::size_t>(v)] = c;
                    from[static_cast<std::size_t>(h)][static_cast<std::size_t>(v)] = {u, ei};
                }
            }
        }
    }
    if (cost[static_cast<std::size_t>(max_hops)][static_cast<std::size_t>(t)] == kInf)
        return std::nullopt;

    // Walk back through the first hop layer that achieved the best cost.
    int h = max_hops;
    while (h > 1 && cost[static_cast<std::size_t>(h - 1)][static_cast<std::size_t>(t)] ==
                        cost[static_cast<std::size_t>(h)][static_cast<std::size_t>(t)])
        --h;
    GriefCandidate cand;
    int v = t;
    cand.nodes.push_back(v);
    int layer = h;
    while (v != s) {
        if (layer < 1) return std::nullopt;
        const auto [u, ei] = from[static_cast<std::size_t>(layer)][static_cast<std::size_t>(v)];
        if (u < 0) return std::nullopt;
        cand.edge_ids.push_back(ei);
        cand.nodes.push_back(u);
        v = u;
        --layer;
    }
    std::reverse(cand.nodes.begin(), cand.nodes.end());
    std::reverse(cand.edge_ids.begin(), cand.edge_ids.end());

    std::int64_t lock = kInf;
    for (const std::size_t ei : cand.edge_ids) lock = std::min(lock, residual[ei]);
    if (lock > budget) return std::nullopt;
    cand.lock = lock;
    for (const std::size_t ei : cand.edge_ids)
        if (residual[ei] == lock) cand.blocked_cap += g.edges[ei].capacity_sat;
    return cand;
}

}  // namespace

GriefingReport griefing_reach(const ChannelGraph& g, const std::set<std::string>& actor_nodes,
                              std::int64_t lock_budget_sat, int max_hops) {
    GriefingReport report;
    if (g.edges.empty()) return report;

    std::vector<int> endpoints;
    for (const std::string& nid : actor_nodes) {
        const int i = g.index_of(nid);
        if (i >= 0) endpoints.push_back(i);
    }
    std::sort(endpoints.begin(), endpoints.end());
    const bool enough = endpoints.size() >= 2 ||
                        (endpoints.size() == 1 &&
                         g.adjacency[static_cast<std::size_t>(endpoints[0])].size() >= 2);
    if (!enough || lock_budget_sat <= 0 || max_hops < 1) return report;

    std::vector<std::int64_t> residual(g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) residual[i] = g.edges[i].capacity_sat;

    std::int64_t budget = lock_budget_sat;
    std::set<std::size_t> blocked;
    for (;;) {
        std::optional<GriefCandidate> best;
        double best_score = 0.0;
        auto consider = [&](std::optional<GriefCandidate> cand) {
            if (!cand) return;
            const double score =
                static_cast<double>(cand->blocked_cap) / static_cast<double>(cand->lock);
            if (!best || score > best_score) {
                best_score = score;
                best = std::move(cand);
            }
        };
        for (const int s : endpoints)
            for (const int t : endpoints)
                if (s < t) consider(grief_path(g, residual, s, t, max_hops, budget));
        // Circular routes for an actor with a single node: leave over one of
        // its channels, come back over a different route.
        for (const int s : endpoints) {
            for (const std::size_t ei : g.adjacency[static_cast<std::size_t>(s)]) {
                if (residual[ei] <= 0) continue;
                const ChannelGraph::Edge& e = g.edges[ei];
                const int u = e.a == s ? e.b : e.a;
                // Affordability is decided on the composed cycle's lock.
                auto tail = grief_path(g, residual, u, s, max_hops - 1,
                                       std::numeric_limits<std::int64_t>::max(), ei);
                if (!tail) continue;
                GriefCandidate cycle;
                cycle.edge_ids = {ei};
                cycle.edge_ids.insert(cycle.edge_ids.end(), tail->edge_ids.begin(),
                                      tail->edge_ids.end());
                cycle.nodes = {s};
                cycle.nodes.insert(cycle.nodes.end(), tail->nodes.begin(), tail->nodes.end());
                cycle.lock = std::min(residual[ei], tail->lock);
                cycle.blocked_cap = 0;
                for (const std::size_t id : cycle.edge_ids)
                    if (residual[id] == cycle.lock) cycle.blocked_cap += g.edges[id].capacity_sat;
                if (cycle.lock <= budget) consider(std::move(cycle));
            }
        }
        if (!best) break;
        budget -= best->lock;
        report.budget_spent_sat += best->lock;
        ++report.paths_locked;
        for (const std::size_t ei : best->edge_ids) {
            residual[ei] -= best->lock;
            if (residual[ei] == 0) blocked.insert(ei);
        }
        if (budget <= 0) break;
    }

    std::int64_t blocked_cap = 0;
    for (const std::size_t ei : blocked) blocked_cap += g.edges[ei].capacity_sat;
    report.blocked_channel_fraction =
        static_cast<double>(blocked.size()) / static_cast<double>(g.edges.size());
    report.blocked_capacity_fraction =
        static_cast<double>(blocked_cap) / static_cast<double>(g.total_capacity_sat());
    return report;
}

namespace {

template <typename Pred>
double path_fraction(const ChannelGraph& g, std::int64_t amount_sat,
                     const std::vector<std::pair<int, int>>& pairs, Pred pred) {
    std::size_t feasible = 0, hit = 0;
    for (const auto& [s, t] : pairs) {
        const auto path = cheapest_path(g, s, t, amount_sat);
        if (!path) continue;
        ++feasible;
        if (pred(path->nodes)) ++hit;
    }
    if (feasible == 0) return 0.0;
    return static_cast<double>(hit) / static_cast<double>(feasible);
}

}  // namespace

double value_privacy(const ChannelGraph& g, const std::set<int>& actors, std::int64_t amount_sat,
                     const std::vector<std::pair<int, int>>& pairs) {
    return path_fraction(g, amount_sat, pairs, [&](const std::vector<int>& nodes) {
        for (std::size_t i = 1; i + 1 < nodes.size(); ++i)
            if (actors.count(nodes[i])) return true;
        return false;
    });
}

double relationship_anonymity_exposure(const ChannelGraph& g, const std::set<int>& actors,
                                       std::int64_t amount_sat,
                                       const std::vector<std::pair<int, int>>& pairs) {
    return path_fraction(g, amount_sat, pairs, [&](const std::vector<int>& nodes) {
        if (nodes.size() < 3) return false;
        return actors.count(nodes[1]) > 0 && actors.count(nodes[nodes.size() - 2]) > 0;
    });
}

double wormhole_exposure(const ChannelGraph& g, const std::set<int>& actors,
                         std::int64_t amount_sat, const std::vector<std::pair<int, int>>& pairs) {
    return path_fraction(g, amount_sat, pairs, [&](const std::vector<int>& nodes) {
        // two actor intermediaries separated by at least one honest one
        int last_actor = -1;
        bool honest_since = false;
        for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
            if (actors.count(nodes[i])) {
                if (last_actor != -1 && honest_since) return true;
                last_actor = static_cast<int>(i);
                honest_since = false;
            } else if (last_actor != -1) {
                honest_since = true;
            }
        }
        return false;
    });
}

std::vector<CapacityRow> capacity_distribution(const ChannelGraph& g, const Snapshot& snap,
                                               const LinkSet& links,
                                               const std::vector<ActorCluster>& actors) {
    std::map<std::string, std::string> actor_of_node;
    std::map<std::string, std::size_t> actor_sizes;
    for (const ActorCluster& a : actors) {
        const std::string label = "actor-" + std::to_string(a.actor_id);
        actor_sizes[label] = a.nodes.size();
        for (const std::string& nid : a.nodes) actor_of_node[nid] = label;
    }
    auto actor_of = [&](const std::string& nid) {
        auto it = actor_of_node.find(nid);
        return it == actor_of_node.end() ? nid : it->second;
    };

    std::map<std::string, std::int64_t> attributed_msat;
    for (const ChannelGraph::Edge& e : g.edges) {
        const std::string& nid_a = g.nids[static_cast<std::size_t>(e.a)];
        const std::string& nid_b = g.nids[static_cast<std::size_t>(e.b)];

        // Funding entities of the channel's opening transaction.
        std::set<std::int64_t> funders;
        const auto colon = e.chpoint.rfind(':');
        const Transaction* funding = snap.find_tx(e.chpoint.substr(0, colon));
        if (funding != nullptr && !funding->is_coinjoin) {
            for (const TxInput& in : funding->inputs) {
                const std::int64_t ent = snap.entity_of(in.address);
                if (ent >= 0) funders.insert(ent);
            }
        }
        // Full attribution only when the links single out one endpoint.
        std::set<std::string> linked_endpoints;
        for (const std::int64_t ent : funders) {
            if (links.contains(ent, nid_a)) linked_endpoints.insert(nid_a);
            if (links.contains(ent, nid_b)) linked_endpoints.insert(nid_b);
        }
        const std::int64_t cap_msat = e.capacity_sat * 1000;
        if (linked_endpoints.size() == 1) {
            attributed_msat[actor_of(*linked_endpoints.begin())] += cap_msat;
        } else {
            attributed_msat[actor_of(nid_a)] += cap_msat / 2;
            attributed_msat[actor_of(nid_b)] += cap_msat / 2;
        }
    }

    const double total = static_cast<double>(g.total_capacity_sat()) * 1000.0;
    std::vector<CapacityRow> rows;
    for (const auto& [actor, msat] : attributed_msat) {
        CapacityRow row;
        row.actor = actor;
        row.capacity_msat = msat;
        row.share = total > 0.0 ? static_cast<double>(msat) / total : 0.0;
        auto it = actor_sizes.find(actor);
        row.node_count = it == actor_sizes.end() ? 1 : it->second;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const CapacityRow& a, const CapacityRow& b) {
        if (a.capacity_msat != b.capacity_msat) return a.capacity_msat > b.capacity_msat;
        return a.actor < b.actor;
    });
    return rows;
}

}  // namespace lnlink
