#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli() {
    const char* p = std::getenv("RELDIFF_CLI");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args, const fs::path& log) {
    std::string cmd = "\"" + cli() + "\" " + args + " > \"" + log.string() +
                      "\" 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return -2;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json slurp_json(const fs::path& p) { return json::parse(slurp(p)); }

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::path("cli_tmp") / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("model-check on a passing builtin") {
    auto dir = fresh_dir("check_roup");
    int rc = run("model-check --builtin roup --beta 1 --d 3 --out " + dir.string(),
                 dir / "log.txt");
    CHECK(rc == 0);
    auto rep = slurp_json(dir / "hypothesis.json");
    CHECK(rep.at("passed").get<bool>());
    CHECK(rep.at("reason").get<std::string>() == "ok");
    CHECK(std::abs(rep.at("epsilon_star").get<double>() - 1.0 / std::sqrt(2.0)) <
          1e-9);
    CHECK(slurp(dir / "log.txt").find("PASSED") != std::string::npos);

    auto man = slurp_json(dir / "run.json");
    CHECK(man.at("command").get<std::string>() == "model-check");
    CHECK(man.at("model").get<std::string>() == "roup");
    CHECK(man.contains("tool_version"));
    CHECK(man.contains("wall_time_seconds"));
    for (const auto& f : man.at("outputs"))
        CHECK(fs::exists(dir / f.get<std::string>()));
}

TEST_CASE("model-check failure exits 1 but still writes the report") {
    auto dir = fresh_dir("check_bad");
    {
        std::ofstream out(dir / "bad.json");
        out << R"json({"name": "bad", "d": 3, "beta": 1.0, "epsilon": 0.5,
                   "f": "1", "b": "1", "sigma": "r", "eta": "0"})json";
    }
    int rc = run("model-check --model " + (dir / "bad.json").string() + " --out " +
                     dir.string(),
                 dir / "log.txt");
    CHECK(rc == 1);
    auto rep = slurp_json(dir / "hypothesis.json");
    CHECK(!rep.at("passed").get<bool>());
    CHECK(rep.at("reason").get<std::string>() == "sigma_below_floor");
}

TEST_CASE("usage errors exit 64") {
    auto dir = fresh_dir("usage");
    CHECK(run("frobnicate", dir / "a.txt") == 64);
    CHECK(run("model-check --no-such-flag 3", dir / "b.txt") == 64);
}

TEST_CASE("model selection errors exit 1") {
    auto dir = fresh_dir("modelsel");
    CHECK(run("model-check --out " + dir.string(), dir / "a.txt") == 1);
    CHECK(run("model-check --builtin roup --model x.json --out " + dir.string(),
              dir / "b.txt") == 1);
    {
        std::ofstream out(dir / "m.json");
        out << R"json({"builtin": "roup"})json";
    }
    CHECK(run("model-check --model " + (dir / "m.json").string() +
                  " --beta 2 --out " + dir.string(),
              dir / "c.txt") == 1);
    CHECK(run("model-check --builtin nope --out " + dir.string(), dir / "d.txt") ==
          1);
}

TEST_CASE("single-path simulation writes a trajectory") {
    auto dir = fresh_dir("sim_one");
    int rc = run("simulate --builtin roup --beta 1 --d 3 --seed 5 --dt 1e-2 "
                 "--t-end 1 --checkpoint-every 0.25 --out " +
                     dir.string(),
                 dir / "log.txt");
    CHECK(rc == 0);
    auto csv = slurp(dir / "trajectory.csv");
    CHECK(csv.rfind("t,s,x1,x2,x3,p0,p1,p2,p3\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 5);  // header + checkpoints 0,.25,.5,.75,1
    auto man = slurp_json(dir / "run.json");
    CHECK(man.at("parameters").at("seed").get<std::uint64_t>() == 5);
}

TEST_CASE("ensemble simulation writes snapshots") {
    auto dir = fresh_dir("sim_many");
    int rc = run("simulate --builtin classical_ou --beta 1 --d 2 --paths 3 "
                 "--dt 1e-2 --t-end 1 --checkpoint-every 0.5 --positions --out " +
                     dir.string(),
                 dir / "log.txt");
    CHECK(rc == 0);
    auto csv = slurp(dir / "snapshots.csv");
    CHECK(csv.rfind("time,path,p1,p2,x1,x2\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 3 * 3);  // times {0,.5,1} x 3 paths
}

TEST_CASE("a blown-up path exits 2 with outputs intact") {
    auto dir = fresh_dir("sim_blowup");
    {
        std::ofstream out(dir / "runaway.json");
        out << R"json({"name": "runaway", "d": 1, "beta": 1.0,
                   "f": "1", "b": "-1", "sigma": "0.1", "eta": "0"})json";
    }
    int rc = run("simulate --model " + (dir / "runaway.json").string() +
                     " --dt 0.1 --t-end 800 --out " + dir.string(),
                 dir / "log.txt");
    CHECK(rc == 2);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "run.json"));
    CHECK(slurp(dir / "log.txt").find("non-finite") != std::string::npos);
}

TEST_CASE("equilibrium and sample outputs") {
    auto dir = fresh_dir("eq");
    int rc = run("equilibrium --builtin roup --beta 1 --d 3 --grid 512 --out " +
                     dir.string(),
                 dir / "log.txt");
    CHECK(rc == 0);
    auto csv = slurp(dir / "equilibrium.csv");
    CHECK(csv.rfind("r,mu,G,V,pdf,cdf\n", 0) == 0);
    CHECK(count_lines(csv) >= 513);

    rc = run("sample --builtin roup --beta 1 --d 3 --grid 512 --n 100 --seed 3 "
             "--out " +
                 dir.string(),
             dir / "log2.txt");
    CHECK(rc == 0);
    auto scsv = slurp(dir / "samples.csv");
    CHECK(scsv.rfind("p1,p2,p3\n", 0) == 0);
    CHECK(count_lines(scsv) == 101);
}

TEST_CASE("gap finds the classical relaxation rate") {
    auto dir = fresh_dir("gap_ou");
    int rc = run("gap --builtin classical_ou --beta 1 --d 3 --b 1 --grid 1024 "
                 "--out " +
                     dir.string(),
                 dir / "log.txt");
    CHECK(rc == 0);
    auto g = slurp_json(dir / "gap.json");
    CHECK(std::abs(g.at("lambda1").get<double>() - 1.0) < 0.02);
    CHECK(g.at("converged").get<bool>());
}

TEST_CASE("certify produces a consistent certificate") {
    auto dir = fresh_dir("certify_roup");
    int rc = run("certify --builtin roup --beta 1 --d 3 --out " + dir.string(),
                 dir / "log.txt");
    CHECK(rc == 0);
    auto c = slurp_json(dir / "certify.json");
    CHECK(c.at("consistent").get<bool>());
    const double alpha = c.at("alpha").get<double>();
    const double cc = c.at("c").get<double>();
    const double eps = c.at("epsilon").get<double>();
    CHECK(alpha == cc * eps * eps * eps / 4.0);
    CHECK(1.0 / c.at("c2").get<double>() <=
          c.at("lambda1").get<double>() * (1.0 + 1e-12));
}

TEST_CASE("decay fits the classical rate two") {
    auto dir = fresh_dir("decay_ou");
    int rc = run("decay --builtin classical_ou --beta 1 --d 3 --b 1 --out " +
                     dir.string(),
                 dir / "log.txt");
    CHECK(rc == 0);
    auto d = slurp_json(dir / "decay.json");
    CHECK(d.at("l2_window_found").get<bool>());
    CHECK(std::abs(d.at("fitted_rate_l2").get<double>() - 2.0) < 0.04);
    CHECK(d.at("bound_checked").get<bool>());
    auto csv = slurp(dir / "decay.csv");
    CHECK(csv.rfind("t,l2,tv\n", 0) == 0);
    CHECK(count_lines(csv) > 100);
}

TEST_CASE("seeded commands are byte-reproducible") {
    auto a = fresh_dir("repro_a");
    auto b = fresh_dir("repro_b");
    const std::string sim_args =
        "simulate --builtin dunkel_hanggi --beta 1 --d 3 --paths 4 --seed 11 "
        "--dt 1e-2 --t-end 0.5 --checkpoint-every 0.25 --out ";
    CHECK(run(sim_args + a.string(), a / "log.txt") == 0);
    CHECK(run(sim_args + b.string(), b / "log.txt") == 0);
    CHECK(slurp(a / "snapshots.csv") == slurp(b / "snapshots.csv"));

    const std::string sample_args =
        "sample --builtin roup --beta 1 --d 3 --grid 512 --n 200 --seed 9 --out ";
    CHECK(run(sample_args + a.string(), a / "log2.txt") == 0);
    CHECK(run(sample_args + b.string(), b / "log2.txt") == 0);
    CHECK(slurp(a / "samples.csv") == slurp(b / "samples.csv"));
}
