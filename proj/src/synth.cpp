#include "lnlink/synth.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "lnlink/entity_graph.hpp"
#include "lnlink/error.hpp"
#include "lnlink/util.hpp"

namespace lnlink {

namespace {

constexpr std::int64_t kStartTime = 1'600'000'000;
constexpr std::int64_t kBlockSeconds = 600;

const char* kWordsA[] = {"Falcon", "Harbor", "Copper", "Nimbus", "Quartz", "Meadow", "Saffron",
                         "Cobalt", "Juniper", "Marble", "Tundra", "Velvet", "Willow", "Zephyr",
                         "Amber",  "Basalt", "Cinder", "Drift",  "Ember",  "Fjord"};
const char* kWordsB[] = {"Relay",  "Beacon", "Bridge", "Router", "Portal", "Anchor", "Signal",
                         "Switch", "Lantern", "Outpost", "Gateway", "Courier", "Runner", "Herald",
                         "Station", "Harvest", "Keeper", "Vault",  "Spire",  "Forge"};
const char* kThemes[] = {"NimbusPay", "CopperNode", "SwiftSats", "RouteWorks", "PeakRelay",
                         "BlueArc",   "NordLight",  "SatStream", "HighWire",   "DeepChannel"};

enum class Behavior {
    plain,
    coin_reuse,
    entity_reuse,
    star,
    snake,
    collector,
    proxy,
    themed_actor,
    shared_ip_actor,
    adversarial,
    multi_output_close,
    punished_close,
};

struct Wallet {
    std::vector<std::string> addrs;
    std::set<std::size_t> used_peers;  // user ids already on the other side
};

struct UserState {
    int id = 0;
    Behavior behavior = Behavior::plain;
    std::vector<std::string> nids;  // [0] is the primary node
    Wallet source;
    Wallet wallet;
    bool service_fed = false;
};

struct Provider {
    std::string prefix;  // first two octets, e.g. "51.3"
    std::uint32_t asn;
};

class Builder {
public:
    explicit Builder(const ScenarioConfig& cfg) : cfg_(cfg), rng_(*cfg.seed) {}

    std::pair<Snapshot, GroundTruth> build();

private:
    // --- ledger primitives -------------------------------------------------
    std::string fresh_addr() { return "addr" + to_hex(addr_counter_++).substr(8); }
    std::string fresh_txid() { return "tx" + to_hex(fnv1a64(std::to_string(tx_counter_++))); }

    std::int64_t tick() {
        t_ += 30 + static_cast<std::int64_t>(uniform_below(rng_, 570));
        return t_;
    }

    const std::string& add_tx(std::vector<TxInput> inputs, std::vector<TxOutput> outputs,
                              bool coinjoin = false, bool punishment = false) {
        Transaction tx;
        tx.txid = fresh_txid();
        tx.inputs = std::move(inputs);
        tx.outputs = std::move(outputs);
        tx.timestamp = tick();
        tx.height = tx.timestamp / kBlockSeconds;
        tx.is_coinjoin = coinjoin;
        tx.is_punishment = punishment;
        snap_.transactions.push_back(std::move(tx));
        return snap_.transactions.back().txid;
    }

    Wallet make_wallet(int user, int n_addrs) {
        Wallet w;
        for (int i = 0; i < n_addrs; ++i) {
            w.addrs.push_back(fresh_addr());
            owner_[w.addrs.back()] = user;
        }
        return w;
    }

    std::vector<TxInput> spend_all(const Wallet& w, std::int64_t total) {
        std::vector<TxInput> ins;
        const std::int64_t share = std::max<std::int64_t>(1, total / static_cast<std::int64_t>(w.addrs.size()));
        for (const std::string& a : w.addrs) ins.push_back({a, share});
        return ins;
    }

    void mint(const Wallet& w, std::int64_t per_addr) {
        std::vector<TxOutput> outs;
        for (const std::string& a : w.addrs) outs.push_back({a, per_addr});
        add_tx({}, std::move(outs));
    }

    // --- channel primitives ------------------------------------------------
    std::int64_t draw_capacity() {
        return uniform_range(rng_, cfg_.min_capacity_sat, cfg_.max_capacity_sat);
    }

    FeePolicy draw_policy() {
        return FeePolicy{uniform_range(rng_, 0, cfg_.max_base_fee_msat),
                         uniform_range(rng_, 0, cfg_.max_rate_ppm)};
    }

    // Opens a channel funded by `funder` between node `a` and node `b`.
    std::size_t open_channel(Wallet& funder, const std::string& a, const std::string& b,
                             std::int64_t capacity) {
        const std::string msig = "msig" + to_hex(addr_counter_++).substr(8);
        owner_[msig] = -1;  // shared deposit, owned by no single user
        const std::string change = funder.addrs[0];
        const std::string& txid =
            add_tx(spend_all(funder, capacity + 1000),
                   {{msig, capacity, ScriptKind::multi_sig}, {change, 900}});
        Channel c;
        c.chpoint = ChannelPoint{txid, 0};
        c.node1 = a;
        c.node2 = b;
        c.capacity_sat = capacity;
        c.open_time = snap_.transactions.back().timestamp;
        c.policy1 = draw_policy();
        c.policy2 = draw_policy();
        snap_.channels.push_back(std::move(c));
        msig_addrs_.push_back(msig);
        return snap_.channels.size() - 1;
    }

    // Cooperative 2-output close paying `side1_addr` / `side2_addr`.
    void close_channel(std::size_t ci, const std::string& side1_addr,
                       const std::string& side2_addr) {
        Channel& c = snap_.channels[ci];
        const std::int64_t part1 = c.capacity_sat / 3 + 1;
        const std::string& txid = add_tx({{msig_addrs_[ci], c.capacity_sat}},
                                         {{side1_addr, part1}, {side2_addr, c.capacity_sat - part1}});
        c.settlement_txid = txid;
        c.close_time = snap_.transactions.back().timestamp;
        c.settlement_kind = SettlementKind::cooperative_2_output;
    }

    void close_channel_multi(std::size_t ci, const std::string& side1_addr,
                             const std::string& side2_addr) {
        Channel& c = snap_.channels[ci];
        const std::string htlc = fresh_addr();
        owner_[htlc] = -1;
        const std::int64_t third = c.capacity_sat / 3;
        const std::string& txid =
            add_tx({{msig_addrs_[ci], c.capacity_sat}},
                   {{side1_addr, third}, {side2_addr, third}, {htlc, c.capacity_sat - 2 * third}});
        c.settlement_txid = txid;
        c.close_time = snap_.transactions.back().timestamp;
        c.settlement_kind = SettlementKind::multi_output;
    }

    void close_channel_punished(std::size_t ci, const std::string& side1_addr,
                                const std::string& side2_addr) {
        Channel& c = snap_.channels[ci];
        const std::int64_t part1 = c.capacity_sat / 2;
        const std::string& txid =
            add_tx({{msig_addrs_[ci], c.capacity_sat}},
                   {{side1_addr, part1}, {side2_addr, c.capacity_sat - part1}}, false, true);
        c.settlement_txid = txid;
        c.close_time = snap_.transactions.back().timestamp;
        c.settlement_kind = SettlementKind::punishment;
    }

    // --- node primitives ---------------------------------------------------
    std::string fresh_nid() { return "02" + to_hex(fnv1a64("nid" + std::to_string(nid_counter_))) +
                                     to_hex(0x1000 + nid_counter_++); }

    std::string draw_ip(std::size_t provider) {
        for (;;) {
            std::string ip = providers_[provider].prefix + "." +
                             std::to_string(uniform_below(rng_, 250) + 1) + "." +
                             std::to_string(uniform_below(rng_, 250) + 1);
            if (used_ips_.insert(ip).second) return ip;
        }
    }

    std::string make_node(int user, std::optional<std::string> alias, std::size_t provider,
                          bool onion_only, std::optional<std::string> fixed_ip = std::nullopt) {
        NodeRecord n;
        n.nid = fresh_nid();
        if (alias) n.aliases.push_back(*alias);
        if (onion_only) {
            n.net_addresses.push_back({"o" + to_hex(fnv1a64(n.nid)).substr(4) + ".onion",
                                       NetAddrKind::onion});
        } else {
            const std::string ip = fixed_ip.value_or(draw_ip(provider));
            n.net_addresses.push_back({ip, NetAddrKind::ipv4});
            n.asn_per_ip[ip] = providers_[provider].asn;
        }
        node_user_[n.nid] = user;
        snap_.nodes.push_back(std::move(n));
        return snap_.nodes.back().nid;
    }

    // Peer choice honoring the one-peer-per-wallet rule.
    std::size_t pick_peer(UserState& me, Wallet& wallet) {
        for (int tries = 0; tries < 64; ++tries) {
            const std::size_t cand = uniform_below(rng_, honest_.size());
            const std::size_t uid = honest_[cand];
            if (uid == static_cast<std::size_t>(me.id)) continue;
            if (wallet.used_peers.count(uid)) continue;
            wallet.used_peers.insert(uid);
            return uid;
        }
        throw Error("config-invalid", "not enough distinct peers; increase user_count");
    }

    // --- behaviors ----------------------------------------------------------
    void run_plain_activity(UserState& u);
    void run_coin_reuse(UserState& u);
    void run_entity_reuse(UserState& u);
    void run_star(UserState& u);
    void run_snake(UserState& u);
    void run_collector(UserState& u);
    void run_proxy(UserState& u);
    void run_actor_cluster(UserState& u, bool shared_ip);
    void run_adversarial(UserState& u);
    void run_decoy_close(UserState& u, bool punished);
    void run_service_decoy(UserState& u);
    void run_coinjoin(UserState& a, UserState& b);

    void record_pattern(PatternKind kind, const std::vector<std::string>& repr_addrs) {
        pending_patterns_.push_back({kind, repr_addrs});
    }
    void record_link(const std::string& repr_addr, const std::string& nid, LinkHeuristic kind) {
        pending_links_.push_back({repr_addr, nid, kind});
    }

    const ScenarioConfig& cfg_;
    std::mt19937_64 rng_;
    Snapshot snap_;
    std::int64_t t_ = kStartTime;
    std::uint64_t addr_counter_ = 0x100000000ULL;  // keeps hex suffixes fixed-width
    std::uint64_t tx_counter_ = 0;
    std::uint64_t nid_counter_ = 0;

    std::vector<Provider> providers_;
    std::vector<UserState> users_;
    std::vector<std::size_t> honest_;  // indices of users eligible as peers

    std::map<std::string, int> owner_;       // address -> user (-1 = channel deposit)
    std::map<std::string, int> node_user_;   // nid -> user
    std::vector<std::string> msig_addrs_;    // parallel to snap_.channels
    std::vector<std::string> service_addrs_;
    std::set<std::string> used_ips_;
    std::size_t lnd_index_ = 1;

    struct PendingPattern {
        PatternKind kind;
        std::vector<std::string> repr_addrs;
    };
    struct PendingLink {
        std::string repr_addr;
        std::string nid;
        LinkHeuristic kind;
    };
    std::vector<PendingPattern> pending_patterns_;
    std::vector<PendingLink> pending_links_;
};

void Builder::run_plain_activity(UserState& u) {
    const int extra = static_cast<int>(
        uniform_range(rng_, cfg_.min_extra_channels, cfg_.max_extra_channels));
    std::vector<std::size_t> opened;
    for (int k = 0; k < extra; ++k) {
        const std::size_t peer = pick_peer(u, u.wallet);
        opened.push_back(open_channel(u.wallet, u.nids[0], users_[peer].nids[0], draw_capacity()));
    }
    // Roughly a third of the organic channels close cooperatively.
    for (const std::size_t ci : opened) {
        if (uniform_below(rng_, 3) != 0) continue;
        const Channel& c = snap_.channels[ci];
        const int peer_user = node_user_[c.node2];
        close_channel(ci, u.wallet.addrs[0], users_[static_cast<std::size_t>(peer_user)].wallet.addrs[0]);
    }
}

void Builder::run_coin_reuse(UserState& u) {
    const std::size_t p1 = pick_peer(u, u.wallet);
    const std::size_t c1 = open_channel(u.wallet, u.nids[0], users_[p1].nids[0], draw_capacity());
    close_channel(c1, u.wallet.addrs[0], users_[p1].wallet.addrs[0]);
    const std::size_t p2 = pick_peer(u, u.wallet);
    open_channel(u.wallet, u.nids[0], users_[p2].nids[0], draw_capacity());
    record_link(u.wallet.addrs[0], u.nids[0], LinkHeuristic::coin_reuse);
}

void Builder::run_entity_reuse(UserState& u) {
    for (int k = 0; k < 2; ++k) {
        const std::size_t peer = pick_peer(u, u.wallet);
        open_channel(u.wallet, u.nids[0], users_[peer].nids[0], draw_capacity());
    }
    record_link(u.wallet.addrs[0], u.nids[0], LinkHeuristic::entity_reuse);
}

void Builder::run_star(UserState& u) {
    Wallet hub = make_wallet(u.id, 2);
    mint(hub, 50'000'000);
    const int fan = 3;
    std::vector<std::string> members{hub.addrs[0]};
    std::vector<TxOutput> outs;
    std::vector<Wallet> spokes;
    for (int k = 0; k < fan; ++k) {
        spokes.push_back(make_wallet(u.id, 1));
        outs.push_back({spokes.back().addrs[0], 5'000'000});
        members.push_back(spokes.back().addrs[0]);
    }
    add_tx(spend_all(hub, 16'000'000), std::move(outs));
    for (Wallet& spoke : spokes) {
        const std::size_t peer = pick_peer(u, spoke);
        open_channel(spoke, u.nids[0], users_[peer].nids[0], draw_capacity());
    }
    record_pattern(PatternKind::star, members);
}

void Builder::run_snake(UserState& u) {
    Wallet hub = make_wallet(u.id, 2);
    mint(hub, 50'000'000);
    Wallet link0 = make_wallet(u.id, 1);
    add_tx(spend_all(hub, 16'000'000), {{link0.addrs[0], 15'000'000}});

    std::vector<std::string> members{hub.addrs[0], link0.addrs[0]};
    Wallet current = std::move(link0);
    const int length = 2 + static_cast<int>(uniform_below(rng_, 2));  // 2..3 channels
    for (int k = 0; k < length; ++k) {
        const bool last = k + 1 == length;
        const std::size_t peer = pick_peer(u, current);
        const std::int64_t capacity = draw_capacity();
        Wallet next = make_wallet(u.id, 1);
        const std::string msig = "msig" + to_hex(addr_counter_++).substr(8);
        owner_[msig] = -1;
        // funding tx whose change seeds the next link of the chain
        const std::string& txid =
            add_tx(spend_all(current, capacity + 5'000'000),
                   {{msig, capacity, ScriptKind::multi_sig}, {next.addrs[0], 4'000'000}});
        Channel c;
        c.chpoint = ChannelPoint{txid, 0};
        c.node1 = u.nids[0];
        c.node2 = users_[peer].nids[0];
        c.capacity_sat = capacity;
        c.open_time = snap_.transactions.back().timestamp;
        c.policy1 = draw_policy();
        c.policy2 = draw_policy();
        snap_.channels.push_back(std::move(c));
        msig_addrs_.push_back(msig);
        if (!last) {
            members.push_back(next.addrs[0]);
            next.used_peers = current.used_peers;  // keep peers distinct along the chain
            current = std::move(next);
        }
        // the final change address stays unused, ending the chain
    }
    record_pattern(PatternKind::snake, members);
}

void Builder::run_collector(UserState& u) {
    const int fan = 2 + static_cast<int>(uniform_below(rng_, 2));  // 2..3 settlements
    Wallet destination = make_wallet(u.id, 1);
    std::vector<std::string> members;
    for (int k = 0; k < fan; ++k) {
        const std::size_t peer = pick_peer(u, u.wallet);
        const std::size_t ci =
            open_channel(u.wallet, u.nids[0], users_[peer].nids[0], draw_capacity());
        Wallet pocket = make_wallet(u.id, 1);
        close_channel(ci, pocket.addrs[0], users_[peer].wallet.addrs[0]);
        add_tx({{pocket.addrs[0], 400'000}}, {{destination.addrs[0], 390'000}});
        members.push_back(pocket.addrs[0]);
    }
    members.push_back(destination.addrs[0]);
    record_pattern(PatternKind::collector, members);
}

void Builder::run_proxy(UserState& u) {
    Wallet aggregate = make_wallet(u.id, 1);
    Wallet destination = make_wallet(u.id, 1);
    std::vector<std::string> members;
    for (int k = 0; k < 2; ++k) {
        const std::size_t peer = pick_peer(u, u.wallet);
        const std::size_t ci =
            open_channel(u.wallet, u.nids[0], users_[peer].nids[0], draw_capacity());
        Wallet pocket = make_wallet(u.id, 1);
        close_channel(ci, pocket.addrs[0], users_[peer].wallet.addrs[0]);
        add_tx({{pocket.addrs[0], 400'000}}, {{aggregate.addrs[0], 390'000}});
        members.push_back(pocket.addrs[0]);
    }
    // one settlement lands in the aggregate directly, giving it both roles
    const std::size_t peer = pick_peer(u, u.wallet);
    const std::size_t ci = open_channel(u.wallet, u.nids[0], users_[peer].nids[0], draw_capacity());
    close_channel(ci, aggregate.addrs[0], users_[peer].wallet.addrs[0]);
    add_tx({{aggregate.addrs[0], 1'000'000}}, {{destination.addrs[0], 990'000}});
    members.push_back(aggregate.addrs[0]);
    members.push_back(destination.addrs[0]);
    record_pattern(PatternKind::proxy, members);
}

void Builder::run_actor_cluster(UserState& u, bool shared_ip) {
    // Extra nodes under the same operator; a dedicated wallet links the
    // primary so the whole cluster becomes indirectly linkable.
    Wallet w2 = make_wallet(u.id, 2);
    mint(w2, 20'000'000);
    for (int k = 0; k < 2; ++k) {
        const std::size_t peer = pick_peer(u, w2);
        open_channel(w2, u.nids[0], users_[peer].nids[0], draw_capacity());
    }
    record_link(w2.addrs[0], u.nids[0], LinkHeuristic::entity_reuse);

    // Anchor each extra node so it shows organic activity.
    for (std::size_t k = 1; k < u.nids.size(); ++k) {
        const std::size_t peer = pick_peer(u, u.wallet);
        open_channel(u.wallet, u.nids[k], users_[peer].nids[0], draw_capacity());
    }
    (void)shared_ip;
}

void Builder::run_adversarial(UserState& u) {
    // c1 from the first node, cooperative close, then c2 to the same victim
    // from a fresh node id while keeping the wallet. Activity periods of the
    // two own nodes stay disjoint; no anchors for them.
    const std::size_t victim = honest_[uniform_below(rng_, honest_.size())];
    const std::size_t c1 =
        open_channel(u.wallet, u.nids[0], users_[victim].nids[0], draw_capacity());
    close_channel(c1, u.wallet.addrs[0], users_[victim].wallet.addrs[0]);
    tick();
    tick();
    open_channel(u.wallet, u.nids[1], users_[victim].nids[0], draw_capacity());
}

void Builder::run_decoy_close(UserState& u, bool punished) {
    const std::size_t peer = pick_peer(u, u.wallet);
    const std::size_t ci = open_channel(u.wallet, u.nids[0], users_[peer].nids[0], draw_capacity());
    if (punished)
        close_channel_punished(ci, u.wallet.addrs[0], users_[peer].wallet.addrs[0]);
    else
        close_channel_multi(ci, u.wallet.addrs[0], users_[peer].wallet.addrs[0]);
}

void Builder::run_service_decoy(UserState& u) {
    // Star-shaped component rooted in a tagged exchange; the filter must drop
    // the whole component.
    Wallet exchange = make_wallet(u.id, 2);
    mint(exchange, 900'000'000);
    service_addrs_.push_back(exchange.addrs[0]);
    std::vector<Wallet> spokes;
    std::vector<TxOutput> outs;
    for (int k = 0; k < 2; ++k) {
        spokes.push_back(make_wallet(u.id, 1));
        outs.push_back({spokes.back().addrs[0], 5'000'000});
    }
    add_tx(spend_all(exchange, 11'000'000), std::move(outs));
    for (Wallet& spoke : spokes) {
        const std::size_t peer = pick_peer(u, spoke);
        open_channel(spoke, u.nids[0], users_[peer].nids[0], draw_capacity());
    }
}

void Builder::run_coinjoin(UserState& a, UserState& b) {
    std::vector<TxInput> ins;
    for (const std::string& addr : a.wallet.addrs) ins.push_back({addr, 200'000});
    for (const std::string& addr : b.wallet.addrs) ins.push_back({addr, 200'000});
    const std::string out_a = fresh_addr();
    const std::string out_b = fresh_addr();
    owner_[out_a] = a.id;
    owner_[out_b] = b.id;
    add_tx(std::move(ins), {{out_a, 190'000}, {out_b, 190'000}}, true);
}

std::pair<Snapshot, GroundTruth> Builder::build() {
    cfg_.validate();

    for (int i = 0; i < 8; ++i)
        providers_.push_back(Provider{std::to_string(51 + i) + "." + std::to_string(3 + 2 * i),
                                      static_cast<std::uint32_t>(64500 + i)});

    // Assign behaviors in declaration order; the rest stay plain.
    std::vector<Behavior> assignment;
    auto push_n = [&](Behavior b, int n) { assignment.insert(assignment.end(), n, b); };
    push_n(Behavior::coin_reuse, cfg_.behaviors.coin_reuse);
    push_n(Behavior::entity_reuse, cfg_.behaviors.entity_reuse);
    push_n(Behavior::star, cfg_.behaviors.star);
    push_n(Behavior::snake, cfg_.behaviors.snake);
    push_n(Behavior::collector, cfg_.behaviors.collector);
    push_n(Behavior::proxy, cfg_.behaviors.proxy);
    push_n(Behavior::themed_actor, cfg_.behaviors.themed_actor);
    push_n(Behavior::shared_ip_actor, cfg_.behaviors.shared_ip_actor);
    push_n(Behavior::adversarial, cfg_.behaviors.adversarial_id_change);
    push_n(Behavior::multi_output_close, cfg_.behaviors.multi_output_close);
    push_n(Behavior::punished_close, cfg_.behaviors.punished_close);
    assignment.resize(static_cast<std::size_t>(cfg_.user_count), Behavior::plain);

    // Users, nodes, wallets.
    int theme_counter = 0;
    for (int i = 0; i < cfg_.user_count; ++i) {
        UserState u;
        u.id = i;
        u.behavior = assignment[static_cast<std::size_t>(i)];
        u.source = make_wallet(i, 2);
        u.wallet = make_wallet(i, 2);

        const std::size_t provider = uniform_below(rng_, providers_.size());
        if (u.behavior == Behavior::themed_actor) {
            // Unique theme per operator plus a globally unique node index, so
            // families cluster internally but never across operators.
            std::string theme = kThemes[theme_counter % 10];
            if (theme_counter >= 10) theme += std::to_string(theme_counter / 10);
            ++theme_counter;
            const int node_count = 3 + static_cast<int>(uniform_below(rng_, 2));
            for (int k = 0; k < node_count; ++k) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), " [lnd-%02d]", static_cast<int>(lnd_index_++));
                u.nids.push_back(make_node(i, theme + buf, provider, false));
            }
        } else if (u.behavior == Behavior::shared_ip_actor) {
            const std::string ip = draw_ip(provider);
            const int node_count = 3;
            for (int k = 0; k < node_count; ++k) {
                const std::string alias = std::string(kWordsA[uniform_below(rng_, 20)]) +
                                          kWordsB[uniform_below(rng_, 20)] + "-" +
                                          std::to_string(nid_counter_);
                u.nids.push_back(make_node(i, alias, provider, false, ip));
            }
        } else if (u.behavior == Behavior::adversarial) {
            for (int k = 0; k < 2; ++k)
                u.nids.push_back(make_node(i, std::nullopt, provider, false));
        } else {
            const bool onion = chance(rng_, 0.1);
            std::optional<std::string> alias;
            if (!chance(rng_, 0.15)) {
                alias = std::string(kWordsA[static_cast<std::size_t>(i) % 20]) +
                        kWordsB[(static_cast<std::size_t>(i) / 20) % 20] + "-" + std::to_string(i);
            }
            u.nids.push_back(make_node(i, alias, provider, onion));
        }
        users_.push_back(std::move(u));
    }

    for (const UserState& u : users_)
        if (u.behavior != Behavior::adversarial) honest_.push_back(static_cast<std::size_t>(u.id));

    // Replenishment: faucet -> source, source -> wallet.
    for (UserState& u : users_) {
        mint(u.source, 400'000'000);
        std::vector<TxOutput> outs;
        for (const std::string& a : u.wallet.addrs) outs.push_back({a, 80'000'000});
        add_tx(spend_all(u.source, 170'000'000), std::move(outs));
    }

    // Anchor ring among honest users: every primary node gets one long-lived
    // channel, keeping activity periods open until the snapshot end.
    for (std::size_t k = 0; k < honest_.size(); ++k) {
        UserState& u = users_[honest_[k]];
        UserState& v = users_[honest_[(k + 1) % honest_.size()]];
        if (u.id == v.id) continue;
        u.wallet.used_peers.insert(static_cast<std::size_t>(v.id));
        open_channel(u.wallet, u.nids[0], v.nids[0], draw_capacity());
    }

    // Behavior phases.
    std::vector<std::size_t> coinjoiners;
    for (UserState& u : users_) {
        switch (u.behavior) {
            case Behavior::plain: {
                run_plain_activity(u);
                if (chance(rng_, cfg_.service_entity_rate)) run_service_decoy(u);
                if (chance(rng_, cfg_.coinjoin_rate)) coinjoiners.push_back(static_cast<std::size_t>(u.id));
                break;
            }
            case Behavior::coin_reuse: run_coin_reuse(u); break;
            case Behavior::entity_reuse: run_entity_reuse(u); break;
            case Behavior::star: run_star(u); break;
            case Behavior::snake: run_snake(u); break;
            case Behavior::collector: run_collector(u); break;
            case Behavior::proxy: run_proxy(u); break;
            case Behavior::themed_actor: run_actor_cluster(u, false); break;
            case Behavior::shared_ip_actor: run_actor_cluster(u, true); break;
            case Behavior::adversarial: run_adversarial(u); break;
            case Behavior::multi_output_close: run_decoy_close(u, false); break;
            case Behavior::punished_close: run_decoy_close(u, true); break;
        }
    }
    for (std::size_t k = 0; k + 1 < coinjoiners.size(); k += 2)
        run_coinjoin(users_[coinjoiners[k]], users_[coinjoiners[k + 1]]);

    // Same rule ingest applies, so a files round trip reproduces the snapshot.
    std::int64_t last_ts = 0;
    for (const Transaction& tx : snap_.transactions) last_ts = std::max(last_ts, tx.timestamp);
    snap_.snapshot_end_time = last_ts + 3600;

    // Entities via co-spend closure over the final ledger, then labels.
    snap_.reindex();
    snap_.entities = cluster_cospend(snap_.transactions);
    for (const std::string& a : service_addrs_) {
        const std::int64_t e = [&] {
            for (const Entity& ent : snap_.entities)
                if (ent.addresses.count(a)) return ent.entity_id;
            return std::int64_t{-1};
        }();
        if (e >= 0) snap_.entities[static_cast<std::size_t>(e)].service_category =
            ServiceCategory::exchange;
    }
    snap_.reindex();

    GroundTruth gt;
    for (const Entity& e : snap_.entities) {
        int user = -2;
        bool mixed = false;
        for (const std::string& a : e.addresses) {
            auto it = owner_.find(a);
            const int o = it == owner_.end() ? -1 : it->second;
            if (user == -2) user = o;
            else if (user != o) mixed = true;
        }
        if (!mixed && user >= 0) gt.entity_user[e.entity_id] = user;
    }
    for (const auto& [nid, user] : node_user_) gt.node_user[nid] = user;
    for (const PendingPattern& p : pending_patterns_) {
        PatternInstance inst;
        inst.kind = p.kind;
        for (const std::string& a : p.repr_addrs) inst.entities.push_back(snap_.entity_of(a));
        std::sort(inst.entities.begin(), inst.entities.end());
        gt.patterns.push_back(std::move(inst));
    }
    for (const PendingLink& l : pending_links_)
        gt.links.push_back({snap_.entity_of(l.repr_addr), l.nid, l.kind});

    return {std::move(snap_), std::move(gt)};
}

}  // namespace

void ScenarioConfig::validate() const {
    if (!seed.has_value()) throw Error("config-invalid", "scenario seed is mandatory");
    if (user_count < 4) throw Error("config-invalid", "user_count must be at least 4");
    if (behaviors.total() > user_count)
        throw Error("config-invalid", "behavior users exceed user_count");
    if (user_count - behaviors.adversarial_id_change < 3)
        throw Error("config-invalid", "need at least 3 non-adversarial users");
    if (min_extra_channels < 0 || max_extra_channels < min_extra_channels)
        throw Error("config-invalid", "bad extra-channel range");
    if (min_capacity_sat <= 0 || max_capacity_sat < min_capacity_sat)
        throw Error("config-invalid", "bad capacity range");
    if (max_base_fee_msat < 0 || max_rate_ppm < 0)
        throw Error("config-invalid", "bad fee bounds");
    for (double r : {service_entity_rate, coinjoin_rate})
        if (r < 0.0 || r > 1.0) throw Error("config-invalid", "rates must lie in [0, 1]");
}

LinkLabels GroundTruth::labels() const {
    LinkLabels l;
    l.entity_user = entity_user;
    l.node_user = node_user;
    for (const InjectedLink& link : links) l.injected.emplace_back(link.entity_id, link.nid, link.kind);
    return l;
}

std::pair<Snapshot, GroundTruth> generate(const ScenarioConfig& config) {
    return Builder(config).build();
}

void emit_ground_truth(const GroundTruth& gt, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("io-error", std::string("cannot write ") + name);
        return out;
    };
    {
        auto out = open("gt_entity_user.csv");
        out << "entity_id,user\n";
        for (const auto& [e, u] : gt.entity_user) out << e << "," << u << "\n";
    }
    {
        auto out = open("gt_node_user.csv");
        out << "nid,user\n";
        for (const auto& [n, u] : gt.node_user) out << n << "," << u << "\n";
    }
    {
        auto out = open("gt_patterns.csv");
        out << "instance,kind,entities\n";
        for (std::size_t i = 0; i < gt.patterns.size(); ++i) {
            out << i << "," << to_string(gt.patterns[i].kind) << ",";
            for (std::size_t k = 0; k < gt.patterns[i].entities.size(); ++k)
                out << (k ? ";" : "") << gt.patterns[i].entities[k];
            out << "\n";
        }
    }
    {
        auto out = open("gt_links.csv");
        out << "entity_id,nid,heuristic\n";
        for (const InjectedLink& l : gt.links)
            out << l.entity_id << "," << l.nid << "," << to_string(l.kind) << "\n";
    }
}

GroundTruth load_ground_truth(const std::filesystem::path& dir) {
    GroundTruth gt;
    auto read_lines = [&](const char* name) {
        std::ifstream in(dir / name, std::ios::binary);
        if (!in) throw Error("io-error", std::string("cannot read ") + name);
        std::vector<std::string> lines;
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (first) {  // header
                first = false;
                continue;
            }
            if (!line.empty()) lines.push_back(line);
        }
        return lines;
    };
    for (const std::string& line : read_lines("gt_entity_user.csv")) {
        const auto f = split(line, ',');
        gt.entity_user[std::stoll(f.at(0))] = std::stoll(f.at(1));
    }
    for (const std::string& line : read_lines("gt_node_user.csv")) {
        const auto f = split(line, ',');
        gt.node_user[f.at(0)] = std::stoll(f.at(1));
    }
    for (const std::string& line : read_lines("gt_patterns.csv")) {
        const auto f = split(line, ',');
        PatternInstance inst;
        inst.kind = pattern_kind_from_string(f.at(1)).value();
        for (const std::string& e : split(f.at(2), ';'))
            if (!e.empty()) inst.entities.push_back(std::stoll(e));
        gt.patterns.push_back(std::move(inst));
    }
    for (const std::string& line : read_lines("gt_links.csv")) {
        const auto f = split(line, ',');
        gt.links.push_back({std::stoll(f.at(0)), f.at(1), link_heuristic_from_string(f.at(2)).value()});
    }
    return gt;
}

}  // namespace lnlink
