#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qvel/errors.hpp"
#include "qvel/harness.hpp"

using namespace qvel;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("qvel_test_" + std::to_string(std::rand()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& stdout_file) {
    const std::string cmd = std::string(QVEL_CLI_PATH) + " " + args + " > " + stdout_file.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

RunConfig sweep_config() {
    return parse_config_text(R"({
        "params": {"lambda": 10, "mu": 1, "theta": 1, "n_queues": 2},
        "simulate": {"horizon": 150},
        "sweep": {"axes": [{"name": "delta", "values": [0, 0.1, 0.19]},
                           {"name": "delay_offset", "from": 0.05, "to": 0.2, "count": 3}],
                  "simulate": true}
    })");
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config defaults and validation") {
    const auto cfg = parse_config(json::object());
    CHECK(cfg.params == SystemParams{});
    CHECK(cfg.simulate.steps_per_delay == 64);
    CHECK(cfg.analyze.branches == 3);

    CHECK_THROWS_AS(parse_config_text(R"({"params": {"lambda": 10, "lamda": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"extra": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"simulate": {"history": {"kind": "uniform", "eps": 1}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"params": {"mu": -1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"params": {"n_queues": 2.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"params": {"lambda": "10"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"simulate": {"history": {"epsilon": 10}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"sweep": {"axes": [{"name": "gamma", "values": [1]}]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"sweep": {"axes": [{"name": "delta", "values": [1], "count": 2}]}})"),
                    ConfigError);
}

TEST_CASE("config round trip") {
    const auto cfg = sweep_config();
    const auto again = parse_config(to_json(cfg));
    CHECK(to_json(again) == to_json(cfg));
    CHECK(again.params == cfg.params);
    REQUIRE(again.sweep.axes.size() == 2);
    CHECK(again.sweep.axes[1].values == cfg.sweep.axes[1].values);
    CHECK(cfg.sweep.axes[1].values[1] == doctest::Approx(0.125));
}

TEST_CASE("analyze reports") {
    auto rb = analyze_report({1, 1, 1, 2, 0, 0}, 3);
    CHECK(rb["region"] == "RegionB");
    CHECK_FALSE(rb.contains("hopf_points"));
    CHECK_FALSE(rb.contains("omega_cr"));

    auto fig = analyze_report({10, 1, 1, 2, 0, 0.5}, 3);
    CHECK(fig["region"] == "RegionD");
    CHECK(fig["hopf_points"].size() == 3);
    CHECK(fig["hopf_points"][0]["delta_cr"].get<double>() == doctest::Approx(0.3617).epsilon(1e-4));
    const double dm = fig["design"]["delta_max"].get<double>();
    CHECK(dm > 0.0609);
    CHECK(dm < 0.0840);
    CHECK(fig["stable_at_delay"] == false);
    CHECK(fig.contains("amplitude"));
    CHECK(fig.contains("delta_amp"));

    auto rc = analyze_report({10, 1, 1, 2, 0.3, 0.5}, 3);
    CHECK(rc["region"] == "RegionC");
    CHECK(rc["stability"] == "never-stable");
    CHECK_FALSE(rc.contains("hopf_points"));
}

TEST_CASE("sweep grid and thread independence") {
    const auto cfg = sweep_config();
    const auto one = run_sweep(cfg, 1);
    const auto four = run_sweep(cfg, 4);
    REQUIRE(one.size() == 9);
    std::ostringstream a, b;
    write_sweep_csv(a, one);
    write_sweep_csv(b, four);
    CHECK(a.str() == b.str());
    for (const auto& r : one) {
        CHECK(r.error.empty());
        CHECK(r.amp_sim.has_value());
        CHECK(r.amp_o2.has_value());
    }
    // amplitude grows with the delay offset for each weight (last axis varies fastest)
    for (int i = 0; i < 3; ++i) {
        CHECK(*one[3 * i].amp_sim < *one[3 * i + 1].amp_sim);
        CHECK(*one[3 * i + 1].amp_sim < *one[3 * i + 2].amp_sim);
    }
    CHECK(one[3].params.delta == 0.1);

    auto empty = cfg;
    empty.sweep.axes[0].values.clear();
    CHECK_THROWS_AS(run_sweep(empty, 2), ConfigError);
    auto huge = cfg;
    huge.sweep.axes = {{"delta", std::vector<double>(200, 0.1)}, {"mu", std::vector<double>(200, 1.0)}};
    CHECK_THROWS_AS(run_sweep(huge, 2), ConfigError);
}

TEST_CASE("sweep records per-point failures and keeps going") {
    auto cfg = parse_config_text(R"({"sweep": {"axes": [{"name": "lambda", "values": [1, 10]},
                                                       {"name": "delay_offset", "values": [0.1]}]}})");
    const auto rows = run_sweep(cfg, 2);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].error.empty());
    CHECK(rows[1].error.empty());
    std::ostringstream os;
    write_sweep_csv(os, rows);
    CHECK(os.str().rfind("lambda,mu,theta,n_queues,delta,delay,region,omega_cr,delta_cr0,amp_sim,amp_o1,amp_o2,error\n", 0) == 0);
}

TEST_CASE("trajectory CSV") {
    SystemParams p{10, 1, 1, 2, 0, 0.3};
    const auto tr = integrate(p, make_history(EquilibriumPerturbed{}, p), {1, 16});
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,q1,q2,dq1,dq2");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == tr.size());
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("command-line exit codes") {
    TempDir dir;
    const auto out = dir.path / "stdout.txt";

    const auto stable = dir.write("stable.json", R"({"params": {"delay": 0.3}, "simulate": {"horizon": 200}})");
    CHECK(run_cli("simulate --config " + stable.string() + " --out " + (dir.path / "a.csv").string(), out) == 0);
    auto summary = json::parse(slurp(out));
    CHECK(summary["measurement"]["decayed"] == true);
    CHECK(fs::exists(dir.path / "a.csv"));

    const auto cycle = dir.write("cycle.json", R"({"params": {"delay": 0.55}, "simulate": {"horizon": 200}})");
    CHECK(run_cli("simulate --config " + cycle.string() + " --out " + (dir.path / "b.csv").string(), out) == 0);
    summary = json::parse(slurp(out));
    CHECK(summary["measurement"]["decayed"] == false);
    CHECK(summary["measurement"]["amplitude"].get<double>() > 0.0);

    const auto bad = dir.write("bad.json", R"({"params": {"lambda": 10, "bogus": 1}})");
    const auto target = dir.path / "never.csv";
    CHECK(run_cli("simulate --config " + bad.string() + " --out " + target.string(), out) == 1);
    CHECK_FALSE(fs::exists(target));
    CHECK_FALSE(fs::exists(target.string() + ".partial"));
    CHECK(json::parse(slurp(out))["error"]["kind"] == "config");

    CHECK(run_cli("simulate --config " + (dir.path / "missing.json").string(), out) == 1);
    CHECK(run_cli("frobnicate", out) == 1);

    const auto region_b = dir.write("b.json", R"({"params": {"lambda": 1}})");
    CHECK(run_cli("analyze --config " + region_b.string(), out) == 0);
    const auto report = json::parse(slurp(out));
    CHECK(report["region"] == "RegionB");
    CHECK_FALSE(report.contains("hopf_points"));

    const auto empty = dir.write("empty.json", R"({"sweep": {"axes": [{"name": "delta", "values": []}]}})");
    CHECK(run_cli("sweep --config " + empty.string(), out) == 1);

    const auto grid = dir.write("grid.json", R"({"sweep": {"axes": [{"name": "delta", "from": 0, "to": 0.15, "count": 4},
                                                                      {"name": "delay_offset", "values": [0.1, 0.2]}]}})");
    CHECK(run_cli("sweep --threads 3 --config " + grid.string() + " --out " + (dir.path / "g3.csv").string(), out) == 0);
    CHECK(run_cli("sweep --threads 1 --config " + grid.string() + " --out " + (dir.path / "g1.csv").string(), out) == 0);
    CHECK(slurp(dir.path / "g1.csv") == slurp(dir.path / "g3.csv"));
}

}  // TEST_SUITE
