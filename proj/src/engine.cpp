#include "meshfill/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "meshfill/error.hpp"

namespace meshfill {

std::string Heuristic::label() const {
    switch (kind) {
        case HeuristicKind::best_client: return "best_client";
        case HeuristicKind::greedy_global: return "greedy_global";
        case HeuristicKind::hybrid: {
            char buf[32];
            const auto res = std::to_chars(buf, buf + sizeof buf, threshold);
            return "hybrid:" + std::string(buf, res.ptr);
        }
    }
    return "?";
}

Heuristic Heuristic::parse(std::string_view text) {
    if (text == "best_client" || text == "bc") return best_client();
    if (text == "greedy_global" || text == "gg") return greedy_global();
    for (std::string_view prefix : {"hybrid:", "gg:"}) {
        if (text.substr(0, prefix.size()) != prefix) continue;
        const std::string_view num = text.substr(prefix.size());
        double thr = 0.0;
        const auto res = std::from_chars(num.data(), num.data() + num.size(), thr);
        if (res.ec != std::errc{} || res.ptr != num.data() + num.size() || !(thr > 0.0 && thr < 1.0))
            throw ConfigError("heuristic", "hybrid threshold must be a number in (0, 1), got '" +
                                               std::string(num) + "'");
        return hybrid(thr);
    }
    throw ConfigError("heuristic", "expected best_client|greedy_global|hybrid:<threshold>, got '" +
                                       std::string(text) + "'");
}

void SimConfig::validate() const {
    if (payload_bytes <= 0) throw ConfigError("payload_bytes", "must be positive");
    if (parts < 1) throw ConfigError("parts", "must be at least 1");
    if (payload_bytes % parts != 0)
        throw ConfigError("parts", "payload of " + std::to_string(payload_bytes) +
                                       " bytes is not divisible by " + std::to_string(parts));
    if (!(slot_seconds > 0.0)) throw ConfigError("slot_seconds", "must be positive");
    if (max_slots < 0) throw ConfigError("max_slots", "must be non-negative");
    if (!(node_up_cap > 0.0)) throw ConfigError("node_up_cap", "must be positive");
    if (!(node_down_cap > 0.0)) throw ConfigError("node_down_cap", "must be positive");
    if (upload_budget_factor && !(*upload_budget_factor > 0.0))
        throw ConfigError("budget_factor", "must be positive or unlimited");
    if (heuristic.kind == HeuristicKind::hybrid && !(heuristic.threshold > 0.0 && heuristic.threshold < 1.0))
        throw ConfigError("heuristic", "hybrid threshold must lie in (0, 1)");
    bandwidth.validate();
}

bool NodeState::complete(std::int64_t part_size) const {
    if (is_root) return true;
    return std::all_of(part_bytes.begin(), part_bytes.end(), [&](std::int64_t b) { return b >= part_size; });
}

std::int64_t NodeState::total_bytes() const {
    return std::accumulate(part_bytes.begin(), part_bytes.end(), std::int64_t{0});
}

RunContext RunContext::make(const Topology& t, const SimConfig& cfg) {
    cfg.validate();
    validate(t);
    RunContext ctx;
    ctx.topology = &t;
    ctx.cfg = cfg;
    ctx.links = build_links(t, cfg.bandwidth, derive_seed(cfg.seed, 1));
    ctx.noise_seed = derive_seed(cfg.seed, 2);
    if (cfg.root) {
        if (*cfg.root < 0 || *cfg.root >= t.n) throw ConfigError("root", "node id out of range");
        ctx.root = *cfg.root;
    } else {
        Rng rng(derive_seed(cfg.seed, 3));
        ctx.root = static_cast<NodeId>(rng.uniform_int(0, t.n - 1));
    }
    if (cfg.heuristic.kind != HeuristicKind::best_client && t.n > 1) {
        const auto order = gg_order(t, ctx.root);
        std::vector<double> costs;
        costs.reserve(order.size());
        for (const auto& p : order) {
            ctx.gg_admission.push_back(p.node);
            costs.push_back(p.cost);
        }
        ctx.gg_prefix = cfg.heuristic.kind == HeuristicKind::hybrid
                            ? hybrid_switch_index(costs, cfg.heuristic.threshold)
                            : ctx.gg_admission.size();
    }
    return ctx;
}

bool RunContext::greedy_for_part(std::span<const NodeState> states, int part) const {
    switch (cfg.heuristic.kind) {
        case HeuristicKind::best_client: return false;
        case HeuristicKind::greedy_global: return true;
        case HeuristicKind::hybrid: break;
    }
    const std::int64_t part_size = cfg.part_bytes();
    for (std::size_t k = 0; k < gg_prefix && k < gg_admission.size(); ++k)
        if (!states[static_cast<std::size_t>(gg_admission[k])].serves(part, part_size)) return true;
    return false;
}

std::vector<NodeState> initial_states(const RunContext& ctx) {
    const int n = ctx.topology->n;
    std::vector<NodeState> states(static_cast<std::size_t>(n));
    for (NodeId i = 0; i < n; ++i) {
        auto& s = states[static_cast<std::size_t>(i)];
        s.is_root = i == ctx.root;
        s.part_bytes.assign(static_cast<std::size_t>(ctx.cfg.parts),
                            s.is_root ? ctx.cfg.part_bytes() : std::int64_t{0});
    }
    return states;
}

namespace {

// Capacities and bookkeeping for one slot's admission loop.
class SlotPlanner {
public:
    SlotPlanner(const RunContext& ctx, std::span<const NodeState> states, int slot)
        : ctx_(ctx),
          cfg_(ctx.cfg),
          states_(states),
          slot_(slot),
          n_(ctx.topology->n),
          parts_(ctx.cfg.parts),
          part_size_(ctx.cfg.part_bytes()),
          spare_up_(index(n_), cfg_.node_up_cap),
          budget_rate_(index(n_), std::numeric_limits<double>::infinity()),
          spare_down_(index(n_), cfg_.node_down_cap),
          totals_(index(n_)),
          link_bw_(index(n_) * index(n_), -1.0),
          busy_(index(n_), 0),
          holders_(index(parts_)),
          admitted_(index(parts_), 0),
          exhausted_(index(parts_), 0),
          greedy_(index(parts_), 0),
          greedy_used_(index(parts_), 0) {
        if (cfg_.upload_budget_factor) {
            const double budget = *cfg_.upload_budget_factor * static_cast<double>(cfg_.payload_bytes);
            for (NodeId i = 0; i < n_; ++i) {
                const NodeState& st = states_[index(i)];
                if (st.is_root) continue;
                budget_rate_[index(i)] =
                    std::max(0.0, (budget - static_cast<double>(st.uploaded_bytes)) / cfg_.slot_seconds);
            }
        }
        for (NodeId i = 0; i < n_; ++i) totals_[index(i)] = states_[index(i)].total_bytes();
        for (int p = 0; p < parts_; ++p) {
            for (NodeId i = 0; i < n_; ++i)
                if (states_[index(i)].serves(p, part_size_)) holders_[index(p)].push_back(i);
            greedy_[index(p)] = ctx_.greedy_for_part(states_, p);
        }
    }

    std::vector<Connection> run() {
        for (;;) {
            const int part = rarest_open_part();
            if (part < 0) break;
            const auto client = choose_client(part);
            if (!client) {
                exhausted_[index(part)] = 1;  // capacities only shrink within a slot
                continue;
            }
            connect(*client, part);
            ++admitted_[index(part)];
            if (greedy_[index(part)]) greedy_used_[index(part)] = 1;
        }
        return std::move(plan_);
    }

private:
    static std::size_t index(int i) { return static_cast<std::size_t>(i); }

    // Fewest holders first, where clients already admitted this slot count
    // as holders; ties by part index.
    int rarest_open_part() const {
        int best = -1;
        std::size_t best_key = 0;
        for (int p = 0; p < parts_; ++p) {
            if (exhausted_[index(p)]) continue;
            const std::size_t key = holders_[index(p)].size() + admitted_[index(p)];
            if (best < 0 || key < best_key) {
                best = p;
                best_key = key;
            }
        }
        return best;
    }

    double link(NodeId server, NodeId client) {
        double& bw = link_bw_[index(server) * index(n_) + index(client)];
        if (bw < 0.0) bw = link_slot_bandwidth(ctx_.links, cfg_.bandwidth, ctx_.noise_seed, slot_, server, client);
        return bw;
    }

    bool server_open(NodeId s) const {
        return spare_up_[index(s)] >= kMinRate && budget_rate_[index(s)] >= kMinRate;
    }

    // A client takes one part per slot and draws it from every open server
    // of that part.
    bool admissible(NodeId c, int part) const {
        return !states_[index(c)].serves(part, part_size_) && spare_down_[index(c)] >= kMinRate &&
               !busy_[index(c)];
    }

    std::optional<NodeId> choose_client(int part) {
        open_servers_.clear();
        for (NodeId s : holders_[index(part)])
            if (server_open(s)) open_servers_.push_back(s);
        if (open_servers_.empty()) return std::nullopt;

        if (greedy_[index(part)]) {
            if (greedy_used_[index(part)]) return std::nullopt;
            for (NodeId c : ctx_.gg_admission)
                if (admissible(c, part)) return c;
            return std::nullopt;
        }

        // Downloads already under way are resumed before anyone new starts
        // the part.
        bool resuming = false;
        for (NodeId c = 0; c < n_ && !resuming; ++c)
            resuming = states_[index(c)].part_bytes[index(part)] > 0 && admissible(c, part);

        candidates_.clear();
        progress_part_.clear();
        progress_total_.clear();
        for (NodeId c = 0; c < n_; ++c) {
            if (!admissible(c, part)) continue;
            if (resuming && states_[index(c)].part_bytes[index(part)] == 0) continue;
            candidates_.push_back(c);
            progress_part_.push_back(states_[index(c)].part_bytes[index(part)]);
            progress_total_.push_back(totals_[index(c)]);
        }
        const SelectionContext sel{part, open_servers_, candidates_, progress_part_, progress_total_};
        return best_client_select(sel, *ctx_.topology, cfg_.policy);
    }

    void connect(NodeId client, int part) {
        busy_[index(client)] = 1;
        sources_.assign(open_servers_.begin(), open_servers_.end());
        std::stable_sort(sources_.begin(), sources_.end(),
                         [&](NodeId a, NodeId b) { return link(a, client) > link(b, client); });

        double& down = spare_down_[index(client)];
        for (NodeId s : sources_) {
            if (down < kMinRate) break;
            double& up = spare_up_[index(s)];
            double& budget = budget_rate_[index(s)];
            const double rate = std::min({link(s, client), up, budget, down});
            if (rate < kMinRate) continue;
            plan_.push_back({s, client, part, rate});
            up -= rate;
            budget -= rate;
            down -= rate;
        }
    }

    const RunContext& ctx_;
    const SimConfig& cfg_;
    std::span<const NodeState> states_;
    int slot_;
    int n_;
    int parts_;
    std::int64_t part_size_;

    std::vector<double> spare_up_;
    std::vector<double> budget_rate_;  // bytes/second still allowed by the upload budget
    std::vector<double> spare_down_;
    std::vector<std::int64_t> totals_;
    std::vector<double> link_bw_;       // -1 = not drawn yet
    std::vector<char> busy_;            // client already admitted this slot
    std::vector<std::vector<NodeId>> holders_;
    std::vector<std::size_t> admitted_;
    std::vector<char> exhausted_;
    std::vector<char> greedy_;
    std::vector<char> greedy_used_;

    std::vector<NodeId> open_servers_;
    std::vector<NodeId> candidates_;
    std::vector<std::int64_t> progress_part_;
    std::vector<std::int64_t> progress_total_;
    std::vector<NodeId> sources_;
    std::vector<Connection> plan_;
};

}  // namespace

std::vector<Connection> plan_slot(const RunContext& ctx, std::span<const NodeState> states, int slot) {
    return SlotPlanner(ctx, states, slot).run();
}

std::int64_t apply_slot(std::span<NodeState> states, std::span<const Connection> plan, const SimConfig& cfg) {
    const std::int64_t part_size = cfg.part_bytes();
    std::int64_t moved = 0;
    for (const Connection& c : plan) {
        auto& client = states[static_cast<std::size_t>(c.client)];
        auto& have = client.part_bytes[static_cast<std::size_t>(c.part)];
        const auto offered = static_cast<std::int64_t>(std::floor(c.rate * cfg.slot_seconds + 1e-6));
        const std::int64_t counted = std::clamp(part_size - have, std::int64_t{0}, offered);
        have += counted;
        states[static_cast<std::size_t>(c.server)].uploaded_bytes += counted;
        moved += counted;
    }
    return moved;
}

int filled_count(std::span<const NodeState> states, std::int64_t part_size) {
    return static_cast<int>(
        std::count_if(states.begin(), states.end(), [&](const NodeState& s) { return s.complete(part_size); }));
}

Simulation::Simulation(const Topology& t, const SimConfig& cfg)
    : ctx_(RunContext::make(t, cfg)), states_(initial_states(ctx_)) {
    const int filled = filled_count(states_, ctx_.cfg.part_bytes());
    trajectory_.filled_count.push_back(filled);
    trajectory_.system_bw.push_back(0.0);
    if (filled == t.n) trajectory_.fill_slot = 0;
}

bool Simulation::finished() const {
    return trajectory_.fill_slot.has_value() || slot_ >= ctx_.cfg.max_slots;
}

std::vector<Connection> Simulation::step() {
    auto plan = plan_slot(ctx_, states_, slot_);
    const std::int64_t moved = apply_slot(states_, plan, ctx_.cfg);
    ++slot_;
    const int filled = filled_count(states_, ctx_.cfg.part_bytes());
    trajectory_.filled_count.push_back(filled);
    trajectory_.system_bw.push_back(static_cast<double>(moved) / ctx_.cfg.slot_seconds);
    if (filled == ctx_.topology->n) trajectory_.fill_slot = slot_;
    return plan;
}

Trajectory run_to_fill(const Topology& t, const SimConfig& cfg) {
    Simulation sim(t, cfg);
    while (!sim.finished()) sim.step();
    return sim.trajectory();
}

}  // namespace meshfill
