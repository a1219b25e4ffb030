#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "meshfill/error.hpp"
#include "meshfill/harness.hpp"

using namespace meshfill;

namespace {

std::string config_field(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("empty config gives every default") {
    const Config c = parse_config("");
    CHECK(c.sim.payload_bytes == 5'000'000'000);
    CHECK(c.sim.parts == 1);
    CHECK(c.sim.slot_seconds == 60);
    CHECK(c.sim.max_slots == 3000);
    CHECK(c.sim.policy == Policy::more_of_part);
    CHECK_FALSE(c.sim.upload_budget_factor.has_value());
    CHECK(c.nodes == 100);
    CHECK(c.experiment.replications == 100);
    CHECK(c.experiment.kinds.size() == 3u);
    CHECK(c.experiment.part_counts == std::vector<int>{1, 2, 4, 8, 16, 32});
    CHECK(c.experiment.heuristics.size() == 5u);
    CHECK(c.experiment.policies.size() == 4u);
    CHECK(c.experiment.budgets.size() == 4u);
}

TEST_CASE("config values, sections and comments") {
    const Config c = parse_config(
        "# a comment\n"
        "parts = 16   # trailing\n"
        "budget_factor = 1.2\n"
        "heuristic = hybrid:0.8\n"
        "\n"
        "[bandwidth]\n"
        "slot_noise = 0\n"
        "[experiment]\n"
        "topologies = line, random\n"
        "part_counts = 16,32\n"
        "budgets = unlimited, 2\n"
        "policies = 1, more_total\n"
        "replications = 7\n"
        "master_seed = 12345\n");
    CHECK(c.sim.parts == 16);
    CHECK(c.sim.upload_budget_factor == 1.2);
    CHECK(c.sim.heuristic == Heuristic::hybrid(0.8));
    CHECK(c.sim.bandwidth.slot_noise == 0.0);
    CHECK(c.experiment.kinds == std::vector{TopologyKind::line, TopologyKind::random});
    CHECK(c.experiment.part_counts == std::vector<int>{16, 32});
    CHECK(c.experiment.budgets == std::vector<Budget>{std::nullopt, 2.0});
    CHECK(c.experiment.policies == std::vector{Policy::less_of_part, Policy::more_total});
    CHECK(c.experiment.replications == 7);
    CHECK(c.experiment.master_seed == 12345u);
}

TEST_CASE("config errors") {
    CHECK(config_field("parts = 7\n") == "parts");
    CHECK(config_field("colour = blue\n") == "colour");
    CHECK(config_field("[experiment]\nparts = 4\n") == "parts");
    CHECK(config_field("parts = many\n") == "parts");
    CHECK(config_field("policy = 9\n") == "policy");
    CHECK(config_field("budget_factor = -1\n") == "budget_factor");
    CHECK(config_field("[experiment]\nreplications = 0\n") == "replications");
    CHECK(config_field("parts = 2\nparts = 4\n") == "parts");
    CHECK(config_field("\n\njust words\n") == "line 3");
    CHECK(config_field("[nowhere]\n") == "line 1");
    CHECK(config_field("[simulation\n") == "line 1");
    CHECK(config_field("= 3\n") == "line 1");
}

TEST_CASE("summary statistics") {
    const std::vector<std::optional<int>> one{812};
    const auto s1 = summarize(one);
    CHECK(s1.mean == 812);
    CHECK(s1.std == 0);
    CHECK(s1.count == 1);

    const std::vector<std::optional<int>> three{300, 310, 320};
    const auto s3 = summarize(three);
    CHECK(s3.mean == doctest::Approx(310));
    CHECK(s3.std == doctest::Approx(10));
    CHECK(format_cell(s3, 3000) == "310(10)");

    const std::vector<std::optional<int>> mixed{300, std::nullopt, 320};
    const auto sm = summarize(mixed);
    CHECK(sm.mean == doctest::Approx(310));
    CHECK(sm.truncated == 1);
    CHECK(sm.count == 3);
    CHECK(format_cell(sm, 3000) == "310(14)[1>3000]");

    const std::vector<std::optional<int>> none{std::nullopt, std::nullopt};
    const auto sn = summarize(none);
    CHECK(sn.all_truncated());
    CHECK(format_cell(sn, 3000) == ">3000");
    CHECK_THROWS_AS(summarize(std::vector<std::optional<int>>{}), DomainError);
}

TEST_CASE("aggregation ignores completion order") {
    std::vector<std::optional<int>> v{301, 299, std::nullopt, 350, 322, 318, 277};
    const auto ref = summarize(v);
    std::mt19937 g(5);
    for (int k = 0; k < 20; ++k) {
        std::shuffle(v.begin(), v.end(), g);
        const auto s = summarize(v);
        CHECK(s.mean == doctest::Approx(ref.mean).epsilon(1e-14));
        CHECK(s.std == doctest::Approx(ref.std).epsilon(1e-12));
        CHECK(s.truncated == ref.truncated);
    }
}

TEST_CASE("run_cell is independent of the job count") {
    Cell cell;
    cell.kind = TopologyKind::random;
    cell.parts = 4;
    SimConfig base;
    const auto a = run_cell(cell, base, 30, 6, 77, 1);
    const auto b = run_cell(cell, base, 30, 6, 77, 3);
    CHECK(a.fill_slots == b.fill_slots);
    CHECK(a.stats.mean == b.stats.mean);
    CHECK(a.stats.std == b.stats.std);
    CHECK(a.stats.count == 6);
}

TEST_CASE("tables render every requested cell and n/a for the rest") {
    ExperimentSpec spec;
    spec.kinds = {TopologyKind::line};
    spec.part_counts = {16};
    spec.heuristics = {Heuristic::best_client()};
    spec.replications = 2;
    SimConfig base;
    const Table t = build_table(1, spec, base, 20);
    REQUIRE(t.rows.size() == 1u);
    REQUIRE(t.columns.size() == 5u);
    CHECK(t.rows[0].cells[0].has_value());
    for (std::size_t k = 1; k < 5; ++k) CHECK_FALSE(t.rows[0].cells[k].has_value());

    std::ostringstream text, csv;
    write_table_text(text, t);
    write_table_csv(csv, t);
    CHECK(text.str().find("n/a") != std::string::npos);
    CHECK(csv.str().rfind("topology,parts,column,mean,std,count,truncated\n", 0) == 0);
    CHECK(csv.str().find("line,16,Greedy Global,n/a") != std::string::npos);

    // rendered mean(std) agrees with the CSV twin after rounding
    const auto& s = *t.rows[0].cells[0];
    CHECK(text.str().find(format_cell(s, 3000)) != std::string::npos);
    std::istringstream lines(csv.str());
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    std::vector<std::string> f;
    std::stringstream rs(row);
    for (std::string x; std::getline(rs, x, ',');) f.push_back(x);
    REQUIRE(f.size() == 7u);
    CHECK(std::lround(std::stod(f[3])) == std::lround(s.mean));
    CHECK(std::lround(std::stod(f[4])) == std::lround(s.std));

    CHECK_THROWS_AS(build_table(4, spec, base, 20), ConfigError);
}

TEST_CASE("table 3 columns are the budget factors") {
    ExperimentSpec spec;
    spec.kinds = {TopologyKind::random};
    spec.part_counts = {32};
    spec.budgets = {2.0};
    spec.replications = 1;
    const Table t = build_table(3, spec, SimConfig{}, 12);
    CHECK(t.columns == std::vector<std::string>{"5", "2", "1.2"});
    CHECK_FALSE(t.rows[0].cells[0].has_value());
    CHECK(t.rows[0].cells[1].has_value());
}

TEST_CASE("curves are padded and start from the root alone") {
    Cell cell;
    cell.kind = TopologyKind::line;
    cell.parts = 2;
    const auto r = run_cell(cell, SimConfig{}, 20, 4, 3, 1, true);
    REQUIRE(r.trajectories.size() == 4u);
    const Curves c = average_curves(r.trajectories);
    CHECK(c.filled_mean.front() == 1.0);
    CHECK(c.filled_mean.back() == 20.0);
    CHECK(c.bw_mean.front() == 0.0);
    std::size_t longest = 0;
    for (const auto& t : r.trajectories) longest = std::max(longest, t.filled_count.size());
    CHECK(c.filled_mean.size() == longest);

    std::ostringstream os;
    write_curves_csv(os, c);
    CHECK(os.str().rfind("slot,filled_mean,bw_mean\n0,1,0\n", 0) == 0);
}

TEST_CASE("trajectory csv") {
    Trajectory t;
    t.filled_count = {1, 2};
    t.system_bw = {0, 1.5e6};
    t.fill_slot = 1;
    std::ostringstream os;
    write_trajectory_csv(os, t);
    CHECK(os.str() == "slot,filled,system_bw_bytes_per_s\n0,1,0\n1,2,1500000\n");
}

TEST_CASE("P=1 bandwidth curve has a single peak in most runs") {
    Cell cell;
    cell.kind = TopologyKind::line;
    cell.parts = 1;
    const auto r = run_cell(cell, SimConfig{}, 100, 20, 5, 1, true);
    int single = 0;
    for (const auto& t : r.trajectories) {
        const auto& bw = t.system_bw;
        const auto peak = std::max_element(bw.begin(), bw.end()) - bw.begin();
        // rising (never dropping by more than noise) up to the peak, falling after
        bool ok = true;
        double run_max = 0;
        for (long k = 0; k < peak; ++k) {
            run_max = std::max(run_max, bw[k]);
            if (bw[k] < 0.5 * run_max) ok = false;
        }
        double run_min = bw[peak];
        for (std::size_t k = peak; k < bw.size(); ++k) {
            run_min = std::min(run_min, bw[k]);
            if (bw[k] > 1.5 * run_min && bw[k] > 0.1 * bw[peak]) ok = false;
        }
        single += ok;
    }
    CHECK(single >= 18);
}

#ifdef MESHFILL_CLI
namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MESHFILL_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("command line") {
    const auto dir = std::filesystem::temp_directory_path() / "meshfill_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::string out = dir.string();

    CHECK(run_cli("gen-topology --kind triangle --nodes 12 --seed 4 --out " + out) == 0);
    std::ifstream topo(dir / "topology.txt");
    CHECK(read_topology(topo).n == 12);

    CHECK(run_cli("run --kind random --nodes 12 --parts 2 --seed 3 --out " + out) == 0);
    CHECK(slurp(dir / "trajectory.csv").rfind("slot,filled,system_bw_bytes_per_s\n", 0) == 0);

    {
        std::ofstream cfg(dir / "tiny.cfg");
        cfg << "nodes = 12\n[experiment]\ntopologies = random\npart_counts = 2\nreplications = 2\n";
    }
    const std::string cfg = (dir / "tiny.cfg").string();
    CHECK(run_cli("table --which 2 --config " + cfg + " --jobs 2 --out " + out) == 0);
    CHECK(slurp(dir / "table2.csv").find("random,2,Policy 1,") != std::string::npos);
    const std::string first = slurp(dir / "table2.csv");
    CHECK(run_cli("table --which 2 --config " + cfg + " --out " + out) == 0);
    CHECK(slurp(dir / "table2.csv") == first);

    CHECK(run_cli("curves --config " + cfg + " --kind random --parts 2 --reps 2 --out " + out) == 0);
    CHECK(std::filesystem::exists(dir / "curves_random_p2.csv"));

    {
        std::ofstream bad(dir / "bad.cfg");
        bad << "parts = 7\n";
    }
    CHECK(run_cli("run --config " + (dir / "bad.cfg").string()) == 2);
    CHECK(run_cli("run --parts 7") == 2);
    CHECK(run_cli("table --which 5") == 2);
    std::filesystem::remove_all(dir);
}
#endif
