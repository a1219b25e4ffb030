#include "meshfill/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "meshfill/error.hpp"

namespace meshfill {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view v) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = v.find(',');
        out.push_back(trim(v.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, std::string_view v, const char* expected) {
    T x{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError(key, std::string("expected ") + expected + ", got '" + std::string(v) + "'");
    return x;
}

int parse_int(const std::string& key, std::string_view v) { return parse_number<int>(key, v, "an integer"); }
double parse_real(const std::string& key, std::string_view v) { return parse_number<double>(key, v, "a number"); }
Seed parse_seed(const std::string& key, std::string_view v) {
    return parse_number<Seed>(key, v, "a non-negative integer");
}

// Accepts 5e9 style byte counts as long as the value is integral.
std::int64_t parse_bytes(const std::string& key, std::string_view v) {
    const double x = parse_real(key, v);
    if (!(x >= 1.0 && x < 9.2e18) || std::floor(x) != x)
        throw ConfigError(key, "expected a positive whole number of bytes, got '" + std::string(v) + "'");
    return static_cast<std::int64_t>(x);
}

template <class T>
void rethrow_as(const std::string& key, T&& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        if (e.field() == key) throw;
        throw ConfigError(key, e.what());
    }
}

using Setter = std::function<void(Config&, const std::string&, std::string_view)>;

const std::map<std::string, std::map<std::string, Setter>>& key_table() {
    static const std::map<std::string, std::map<std::string, Setter>> table{
        {"simulation",
         {
             {"topology", [](Config& c, const std::string& k,
                             std::string_view v) { rethrow_as(k, [&] { c.topology = topology_kind_from_string(v); }); }},
             {"nodes", [](Config& c, const std::string& k, std::string_view v) { c.nodes = parse_int(k, v); }},
             {"payload_bytes",
              [](Config& c, const std::string& k, std::string_view v) { c.sim.payload_bytes = parse_bytes(k, v); }},
             {"parts", [](Config& c, const std::string& k, std::string_view v) { c.sim.parts = parse_int(k, v); }},
             {"slot_seconds",
              [](Config& c, const std::string& k, std::string_view v) { c.sim.slot_seconds = parse_real(k, v); }},
             {"max_slots", [](Config& c, const std::string& k, std::string_view v) { c.sim.max_slots = parse_int(k, v); }},
             {"node_up_cap",
              [](Config& c, const std::string& k, std::string_view v) { c.sim.node_up_cap = parse_real(k, v); }},
             {"node_down_cap",
              [](Config& c, const std::string& k, std::string_view v) { c.sim.node_down_cap = parse_real(k, v); }},
             {"budget_factor",
              [](Config& c, const std::string& k, std::string_view v) {
                  rethrow_as(k, [&] { c.sim.upload_budget_factor = parse_budget(v); });
              }},
             {"heuristic",
              [](Config& c, const std::string& k,
                 std::string_view v) { rethrow_as(k, [&] { c.sim.heuristic = Heuristic::parse(v); }); }},
             {"policy",
              [](Config& c, const std::string& k,
                 std::string_view v) { rethrow_as(k, [&] { c.sim.policy = policy_from_string(v); }); }},
             {"root",
              [](Config& c, const std::string& k, std::string_view v) {
                  if (v == "random")
                      c.sim.root.reset();
                  else
                      c.sim.root = parse_int(k, v);
              }},
             {"seed", [](Config& c, const std::string& k, std::string_view v) { c.sim.seed = parse_seed(k, v); }},
         }},
        {"bandwidth",
         {
             {"bw_ref", [](Config& c, const std::string& k, std::string_view v) { c.sim.bandwidth.bw_ref = parse_real(k, v); }},
             {"bw_floor",
              [](Config& c, const std::string& k, std::string_view v) { c.sim.bandwidth.bw_floor = parse_real(k, v); }},
             {"bw_ceil",
              [](Config& c, const std::string& k, std::string_view v) { c.sim.bandwidth.bw_ceil = parse_real(k, v); }},
             {"gen_noise",
              [](Config& c, const std::string& k, std::string_view v) { c.sim.bandwidth.gen_noise = parse_real(k, v); }},
             {"slot_noise",
              [](Config& c, const std::string& k, std::string_view v) { c.sim.bandwidth.slot_noise = parse_real(k, v); }},
         }},
        {"experiment",
         {
             {"topologies",
              [](Config& c, const std::string& k, std::string_view v) {
                  rethrow_as(k, [&] {
                      c.experiment.kinds.clear();
                      for (auto item : split_list(v)) c.experiment.kinds.push_back(topology_kind_from_string(item));
                  });
              }},
             {"part_counts",
              [](Config& c, const std::string& k, std::string_view v) {
                  c.experiment.part_counts.clear();
                  for (auto item : split_list(v)) c.experiment.part_counts.push_back(parse_int(k, item));
              }},
             {"heuristics",
              [](Config& c, const std::string& k, std::string_view v) {
                  rethrow_as(k, [&] {
                      c.experiment.heuristics.clear();
                      for (auto item : split_list(v)) c.experiment.heuristics.push_back(Heuristic::parse(item));
                  });
              }},
             {"policies",
              [](Config& c, const std::string& k, std::string_view v) {
                  rethrow_as(k, [&] {
                      c.experiment.policies.clear();
                      for (auto item : split_list(v)) c.experiment.policies.push_back(policy_from_string(item));
                  });
              }},
             {"budgets",
              [](Config& c, const std::string& k, std::string_view v) {
                  rethrow_as(k, [&] {
                      c.experiment.budgets.clear();
                      for (auto item : split_list(v)) c.experiment.budgets.push_back(parse_budget(item));
                  });
              }},
             {"replications",
              [](Config& c, const std::string& k, std::string_view v) { c.experiment.replications = parse_int(k, v); }},
             {"master_seed",
              [](Config& c, const std::string& k, std::string_view v) { c.experiment.master_seed = parse_seed(k, v); }},
             {"output_dir",
              [](Config& c, const std::string&, std::string_view v) { c.experiment.output_dir = std::string(v); }},
         }},
    };
    return table;
}

std::string line_field(int line) { return "line " + std::to_string(line); }

}  // namespace

std::string budget_label(const Budget& b) {
    if (!b) return "unlimited";
    std::ostringstream os;
    os << *b;
    return os.str();
}

Budget parse_budget(std::string_view text) {
    if (text == "unlimited") return std::nullopt;
    double x = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !(x > 0.0))
        throw ConfigError("budgets", "expected 'unlimited' or a positive multiple of the payload, got '" +
                                         std::string(text) + "'");
    return x;
}

void ExperimentSpec::validate() const {
    if (kinds.empty()) throw ConfigError("topologies", "must list at least one topology");
    if (part_counts.empty()) throw ConfigError("part_counts", "must list at least one part count");
    for (int p : part_counts)
        if (p < 1) throw ConfigError("part_counts", "part counts must be at least 1");
    if (heuristics.empty()) throw ConfigError("heuristics", "must list at least one heuristic");
    if (policies.empty()) throw ConfigError("policies", "must list at least one policy");
    if (budgets.empty()) throw ConfigError("budgets", "must list at least one budget");
    if (replications < 1) throw ConfigError("replications", "must be at least 1");
}

Config parse_config(std::string_view text) {
    Config cfg;
    std::string section = "simulation";
    std::set<std::string> seen;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_field(line_no), "unterminated section header");
            const std::string name(trim(line.substr(1, line.size() - 2)));
            if (!key_table().contains(name))
                throw ConfigError(line_field(line_no),
                                  "unknown section '" + name + "' (expected simulation, bandwidth or experiment)");
            section = name;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_field(line_no), "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_field(line_no), "missing key before '='");
        if (value.empty()) throw ConfigError(key, "missing value on line " + std::to_string(line_no));

        const auto& keys = key_table().at(section);
        const auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError(key, "unknown key in [" + section + "] on line " + std::to_string(line_no));
        if (!seen.insert(section + "." + key).second)
            throw ConfigError(key, "set twice (line " + std::to_string(line_no) + ")");
        it->second(cfg, key, value);
    }

    cfg.sim.validate();
    cfg.experiment.validate();
    if (cfg.nodes < 2) throw ConfigError("nodes", "must be at least 2");
    if (cfg.sim.root && *cfg.sim.root >= cfg.nodes) throw ConfigError("root", "must be below nodes");
    for (int p : cfg.experiment.part_counts)
        if (cfg.sim.payload_bytes % p != 0)
            throw ConfigError("part_counts", "payload is not divisible by " + std::to_string(p));
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

SummaryStats summarize(std::span<const std::optional<int>> fill_slots) {
    if (fill_slots.empty()) throw DomainError("summarize: no runs");
    SummaryStats s;
    s.count = static_cast<int>(fill_slots.size());
    double sum = 0.0;
    int done = 0;
    for (const auto& f : fill_slots) {
        if (!f) {
            ++s.truncated;
            continue;
        }
        sum += *f;
        ++done;
    }
    if (done == 0) {
        s.mean = std::nan("");
        return s;
    }
    s.mean = sum / done;
    if (done > 1) {
        double ss = 0.0;
        for (const auto& f : fill_slots)
            if (f) ss += (*f - s.mean) * (*f - s.mean);
        s.std = std::sqrt(ss / (done - 1));
    }
    return s;
}

std::string format_cell(const SummaryStats& s, int max_slots) {
    if (s.all_truncated()) return ">" + std::to_string(max_slots);
    std::string out = std::to_string(std::lround(s.mean)) + "(" + std::to_string(std::lround(s.std)) + ")";
    if (s.truncated > 0) out += "[" + std::to_string(s.truncated) + ">" + std::to_string(max_slots) + "]";
    return out;
}

Seed run_seed(Seed master_seed, int run) { return derive_seed(master_seed, static_cast<std::uint64_t>(run)); }
Seed topology_seed(Seed seed) { return derive_seed(seed, 0); }

SimConfig cell_config(const SimConfig& base, const Cell& cell, Seed seed) {
    SimConfig cfg = base;
    cfg.parts = cell.parts;
    cfg.heuristic = cell.heuristic;
    cfg.policy = cell.policy;
    cfg.upload_budget_factor = cell.budget;
    cfg.seed = seed;
    return cfg;
}

CellResult run_cell(const Cell& cell, const SimConfig& base, int nodes, int replications, Seed master_seed, int jobs,
                    bool keep_trajectories) {
    if (replications < 1) throw ConfigError("replications", "must be at least 1");
    cell_config(base, cell, 0).validate();

    CellResult result;
    result.fill_slots.resize(static_cast<std::size_t>(replications));
    if (keep_trajectories) result.trajectories.resize(static_cast<std::size_t>(replications));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (int r = next++; r < replications; r = next++) {
            try {
                const Seed seed = run_seed(master_seed, r);
                const Topology topo = generate_topology(cell.kind, nodes, topology_seed(seed));
                Trajectory traj = run_to_fill(topo, cell_config(base, cell, seed));
                result.fill_slots[static_cast<std::size_t>(r)] = traj.fill_slot;
                if (keep_trajectories) result.trajectories[static_cast<std::size_t>(r)] = std::move(traj);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next = replications;
            }
        }
    };

    const int threads = std::clamp(jobs, 1, replications);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    result.stats = summarize(result.fill_slots);
    return result;
}

namespace {

template <class T>
bool contains(const std::vector<T>& v, const T& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

std::string heuristic_column(const Heuristic& h) {
    switch (h.kind) {
        case HeuristicKind::best_client: return "Best Client";
        case HeuristicKind::greedy_global: return "Greedy Global";
        case HeuristicKind::hybrid: break;
    }
    std::ostringstream os;
    os << "Greedy Global " << h.threshold;
    return os.str();
}

}  // namespace

Table build_table(int which, const ExperimentSpec& spec, const SimConfig& base, int nodes, int jobs) {
    spec.validate();
    Table t;
    t.which = which;
    t.max_slots = base.max_slots;

    // Each column is a function that fills in the varying part of a cell,
    // or reports that the experiment leaves it out.
    std::vector<std::function<std::optional<Cell>(Cell)>> columns;
    switch (which) {
        case 1: {
            const std::vector<Heuristic> hs{Heuristic::best_client(), Heuristic::greedy_global(),
                                            Heuristic::hybrid(0.9), Heuristic::hybrid(0.8), Heuristic::hybrid(0.7)};
            for (const Heuristic& h : hs) {
                t.columns.push_back(heuristic_column(h));
                columns.push_back([&spec, &base, h](Cell c) -> std::optional<Cell> {
                    if (!contains(spec.heuristics, h)) return std::nullopt;
                    c.heuristic = h;
                    c.policy = base.policy;
                    return c;
                });
            }
            break;
        }
        case 2: {
            for (Policy p : {Policy::less_of_part, Policy::more_of_part, Policy::less_total, Policy::more_total}) {
                t.columns.push_back("Policy " + std::to_string(policy_number(p)));
                columns.push_back([&spec, p](Cell c) -> std::optional<Cell> {
                    if (!contains(spec.policies, p)) return std::nullopt;
                    c.policy = p;
                    return c;
                });
            }
            break;
        }
        case 3: {
            for (double b : {5.0, 2.0, 1.2}) {
                t.columns.push_back(budget_label(b));
                columns.push_back([&spec, &base, b](Cell c) -> std::optional<Cell> {
                    if (!contains(spec.budgets, Budget{b})) return std::nullopt;
                    c.policy = base.policy;
                    c.budget = b;
                    return c;
                });
            }
            break;
        }
        default: throw ConfigError("which", "table must be 1, 2 or 3, got " + std::to_string(which));
    }

    for (TopologyKind kind : spec.kinds) {
        for (int parts : spec.part_counts) {
            Table::Row row{kind, parts, {}};
            Cell seed_cell;
            seed_cell.kind = kind;
            seed_cell.parts = parts;
            for (const auto& col : columns) {
                const auto cell = col(seed_cell);
                if (!cell) {
                    row.cells.emplace_back();
                    continue;
                }
                row.cells.push_back(run_cell(*cell, base, nodes, spec.replications, spec.master_seed, jobs).stats);
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

void write_table_text(std::ostream& out, const Table& t) {
    constexpr int kLabel = 10;
    constexpr int kParts = 7;
    std::size_t width = 12;
    for (const auto& c : t.columns) width = std::max(width, c.size() + 2);

    out << "Table " << t.which << ": time to fill (slots)\n";
    out << std::left << std::setw(kLabel) << "Topology" << std::setw(kParts) << "Parts";
    for (const auto& c : t.columns) out << std::setw(static_cast<int>(width)) << c;
    out << '\n';
    for (const auto& row : t.rows) {
        out << std::setw(kLabel) << to_string(row.kind) << std::setw(kParts) << row.parts;
        for (const auto& cell : row.cells)
            out << std::setw(static_cast<int>(width)) << (cell ? format_cell(*cell, t.max_slots) : "n/a");
        out << '\n';
    }
    out << std::right;
}

void write_table_csv(std::ostream& out, const Table& t) {
    out << "topology,parts,column,mean,std,count,truncated\n";
    out << std::setprecision(17);
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.cells.size(); ++k) {
            out << to_string(row.kind) << ',' << row.parts << ',' << t.columns[k] << ',';
            const auto& cell = row.cells[k];
            if (!cell)
                out << "n/a,n/a,0,0\n";
            else if (cell->all_truncated())
                out << '>' << t.max_slots << ",," << cell->count << ',' << cell->truncated << '\n';
            else
                out << cell->mean << ',' << cell->std << ',' << cell->count << ',' << cell->truncated << '\n';
        }
    }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
    out << "slot,filled,system_bw_bytes_per_s\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < t.filled_count.size(); ++k)
        out << k << ',' << t.filled_count[k] << ',' << t.system_bw[k] << '\n';
}

Curves average_curves(std::span<const Trajectory> runs) {
    Curves c;
    if (runs.empty()) return c;
    std::size_t len = 0;
    for (const auto& r : runs) len = std::max(len, r.filled_count.size());
    c.filled_mean.assign(len, 0.0);
    c.bw_mean.assign(len, 0.0);
    for (const auto& r : runs) {
        for (std::size_t k = 0; k < len; ++k) {
            const bool inside = k < r.filled_count.size();
            c.filled_mean[k] += inside ? r.filled_count[k] : (r.filled_count.empty() ? 0 : r.filled_count.back());
            c.bw_mean[k] += inside ? r.system_bw[k] : 0.0;
        }
    }
    const double n = static_cast<double>(runs.size());
    for (std::size_t k = 0; k < len; ++k) {
        c.filled_mean[k] /= n;
        c.bw_mean[k] /= n;
    }
    return c;
}

void write_curves_csv(std::ostream& out, const Curves& c) {
    out << "slot,filled_mean,bw_mean\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < c.filled_mean.size(); ++k)
        out << k << ',' << c.filled_mean[k] << ',' << c.bw_mean[k] << '\n';
}

}  // namespace meshfill
