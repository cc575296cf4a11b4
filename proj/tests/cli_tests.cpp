// End-to-end tests of the contagion binary: exit codes, file outputs, and
// run-to-run determinism.  The binary path arrives via CONTAGION_BIN.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(CONTAGION_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

RunResult run_env(const std::string& env, const std::string& args) {
    const std::string cmd =
        env + " " + std::string(CONTAGION_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string scratch_dir(const std::string& name) {
    static const fs::path root = [] {
        const fs::path p = fs::temp_directory_path() / "ccm_cli_scratch";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    const fs::path dir = root / name;
    fs::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

// Deterministic two-entity quote file, wide enough to survive alignment.
std::string make_quotes(const std::string& dir, std::size_t dates = 40) {
    std::ostringstream csv;
    csv << "date,entity,spread_bps\n";
    for (std::size_t t = 0; t < dates; ++t) {
        char day[16];
        std::snprintf(day, sizeof(day), "2021-%02zu-%02zu", 1 + t / 28, 1 + t % 28);
        csv << day << ",FR," << 80.0 + 7.0 * static_cast<double>(t % 11) << '\n';
        csv << day << ",DE," << 60.0 + 5.0 * static_cast<double>((t * 3) % 13) << '\n';
    }
    const std::string path = dir + "/quotes.csv";
    spit(path, csv.str());
    return path;
}

// Small synthetic intensity panel via the simulate subcommand.
std::string make_panel(const std::string& dir, std::uint64_t seed = 9) {
    const RunResult r = run("simulate --theta 2.5 --lambda0 1 --lambdas 1,0.5,0.25 --n 160 "
                            "--seed " + std::to_string(seed) + " --out " + dir + " --panel");
    REQUIRE(r.code == 0);
    return dir + "/intensities.csv";
}

}  // namespace

TEST_CASE("version and usage errors exit cleanly") {
    CHECK(run("--version").code == 0);
    CHECK(run("--version").out == "0.1.0\n");
    CHECK(run("").code == 1);               // a subcommand is required
    CHECK(run("frobnicate").code == 1);     // unknown subcommand
    CHECK(run("estimate --input /no/such/file.csv --out /tmp/x").code == 1);
    CHECK(run("hac-tau --theta 2 --phi 2 --lambdas 1,1,1 --case sideways").code == 1);
}

TEST_CASE("simulate writes the sample and optional panel") {
    const std::string dir = scratch_dir("simulate");
    const RunResult r = run("simulate --d 3 --theta 2 --lambda0 1 --lambdas 1,0.5,0.25 "
                            "--n 50 --seed 4 --out " + dir + " --panel");
    CHECK(r.code == 0);
    CHECK(fs::exists(dir + "/sample.csv"));
    CHECK(fs::exists(dir + "/intensities.csv"));
    CHECK(fs::exists(dir + "/manifest.json"));

    const std::string sample = slurp(dir + "/sample.csv");
    CHECK(sample.rfind("replication,entity,tau_time,systemic_time\n", 0) == 0);
    // 50 replications x 3 entities + header
    CHECK(std::count(sample.begin(), sample.end(), '\n') == 151);

    const json manifest = json::parse(slurp(dir + "/manifest.json"));
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["flags"]["seed"] == 4);
    CHECK(manifest.contains("started"));
    CHECK(manifest.contains("finished"));

    const json summary = json::parse(r.out);
    CHECK(summary["n"] == 50);
    CHECK(summary["d"] == 3);
}

TEST_CASE("simulate rejects inconsistent or degenerate requests") {
    const std::string dir = scratch_dir("simulate_bad");
    CHECK(run("simulate --d 4 --theta 2 --lambda0 1 --lambdas 1,1 --n 10 --out " + dir)
              .code == 2);
    CHECK(run("simulate --theta 2 --lambda0 0 --lambdas 0,0 --n 10 --out " + dir).code == 2);
    CHECK(run("simulate --theta 2 --lambda0 1 --lambdas 1,1 --n 0 --out " + dir).code == 2);
    CHECK(run("simulate --theta 0.5 --lambda0 1 --lambdas 1,1 --n 10 --out " + dir).code == 2);
    CHECK(run("simulate --theta 2 --lambda0 1 --lambdas 1,oops --n 10 --out " + dir).code == 2);
}

TEST_CASE("ingest converts quotes and reports alignment") {
    const std::string dir = scratch_dir("ingest");
    const std::string quotes = make_quotes(dir);
    const RunResult r = run("ingest --input " + quotes + " --out " + dir + "/out");
    CHECK(r.code == 0);

    const json report = json::parse(r.out);
    CHECK(report["rows_read"] == 80);
    CHECK(report["entities"].size() == 2);
    CHECK(report["entities"]["FR"]["rows_read"] == 40);

    // 80 bps at the default 40% recovery: 0.0080 / 0.6
    const std::string csv = slurp(dir + "/out/intensities.csv");
    CHECK(csv.rfind("date,entity,intensity\n", 0) == 0);
    CHECK(csv.find("2021-01-01,FR,0.013333333333333334") != std::string::npos);
    CHECK(slurp(dir + "/out/ingest_report.json") == r.out);
}

TEST_CASE("ingest rejects thin or invalid inputs") {
    const std::string dir = scratch_dir("ingest_bad");
    spit(dir + "/empty.csv", "date,entity,spread_bps\n");
    CHECK(run("ingest --input " + dir + "/empty.csv --out " + dir + "/o1").code == 2);

    const std::string quotes = make_quotes(dir);
    CHECK(run("ingest --input " + quotes + " --out " + dir + "/o2 --recovery 1.0").code == 2);
    CHECK(run("ingest --input " + quotes + " --out " + dir + "/o3 --policy sideways").code == 1);

    spit(dir + "/junk.csv", "date,entity,spread_bps\n2021-01-01,FR,not_a_number\n");
    CHECK(run("ingest --input " + dir + "/junk.csv --out " + dir + "/o4").code == 2);
}

TEST_CASE("estimate is deterministic and honours the seed flag over the environment") {
    const std::string dir = scratch_dir("estimate");
    const std::string panel = make_panel(dir + "/sim");

    const std::string common = "estimate --input " + panel + " --restarts 6 --seed 5 --out ";
    CHECK(run(common + dir + "/a").code == 0);
    CHECK(run(common + dir + "/b").code == 0);
    CHECK(slurp(dir + "/a/fit.json") == slurp(dir + "/b/fit.json"));
    CHECK(slurp(dir + "/a/tau_matrix.csv") == slurp(dir + "/b/tau_matrix.csv"));

    const json fit = json::parse(slurp(dir + "/a/fit.json"));
    CHECK(fit["labels"] == json::array({"e1", "e2", "e3"}));
    CHECK(fit["alphas"].size() == 3);
    CHECK(fit["theta"].get<double>() >= 1.0);
    CHECK(fit["seed"] == 5);
    CHECK(fit["residuals"].size() == 3);
    CHECK(fit["config"]["distance"] == "quadratic");

    // Environment variable seeds the run when no flag is given; the flag wins.
    const RunResult env_only =
        run_env("CONTAGION_SEED=9", "estimate --input " + panel + " --restarts 2 --out " +
                                        dir + "/env");
    CHECK(env_only.code == 0);
    CHECK(json::parse(slurp(dir + "/env/fit.json"))["seed"] == 9);
    const RunResult both =
        run_env("CONTAGION_SEED=9", "estimate --input " + panel +
                                        " --restarts 2 --seed 3 --out " + dir + "/env2");
    CHECK(both.code == 0);
    CHECK(json::parse(slurp(dir + "/env2/fit.json"))["seed"] == 3);
}

TEST_CASE("estimate with pinned shares fits only theta") {
    const std::string dir = scratch_dir("estimate_fixed");
    const std::string panel = make_panel(dir + "/sim");

    spit(dir + "/shares.json", R"({"e1": 0.5, "e2": 0.6666666666666666, "e3": 0.8})");
    const RunResult r = run("estimate --input " + panel + " --fix-alphas " + dir +
                            "/shares.json --out " + dir + "/fit");
    CHECK(r.code == 0);
    const json fit = json::parse(slurp(dir + "/fit/fit.json"));
    CHECK(fit["alphas"][0].get<double>() == doctest::Approx(0.5));
    CHECK(fit["alphas"][2].get<double>() == doctest::Approx(0.8));
    CHECK(fit["restarts"] == 0);

    spit(dir + "/wrong.json", R"({"e1": 0.5, "e2": 0.6, "zz": 0.8})");
    CHECK(run("estimate --input " + panel + " --fix-alphas " + dir + "/wrong.json --out " +
              dir + "/f2")
              .code == 2);
    spit(dir + "/short.json", R"({"e1": 0.5})");
    CHECK(run("estimate --input " + panel + " --fix-alphas " + dir + "/short.json --out " +
              dir + "/f3")
              .code == 2);
}

TEST_CASE("diagnose writes the report and signals threshold failures") {
    const std::string dir = scratch_dir("diagnose");
    const std::string panel = make_panel(dir + "/sim");
    REQUIRE(run("estimate --input " + panel + " --restarts 6 --seed 5 --out " + dir + "/fit")
                .code == 0);

    const RunResult pass = run("diagnose --input " + panel + " --params " + dir +
                               "/fit/fit.json --format csv --threshold 0.2 --out " + dir +
                               "/ok");
    CHECK(pass.code == 0);
    CHECK(fs::exists(dir + "/ok/systemic.csv"));
    CHECK(fs::exists(dir + "/ok/scatter.csv"));
    CHECK(!fs::exists(dir + "/ok/scatter.svg"));
    CHECK(slurp(dir + "/ok/scatter.csv")
              .rfind("label,alpha,tau_hat,tau_line,residual\n", 0) == 0);
    CHECK(slurp(dir + "/ok/systemic.csv").rfind("date,lambda0_hat\n", 0) == 0);
    const json report = json::parse(slurp(dir + "/ok/report.json"));
    CHECK(report["passed"] == true);
    CHECK(report["points"].size() == 3);
    CHECK(report["rmse"].get<double>() < 0.2);

    // An impossible threshold still produces the full report, exit 3.
    const RunResult fail = run("diagnose --input " + panel + " --params " + dir +
                               "/fit/fit.json --format svg --threshold 1e-12 --out " + dir +
                               "/bad");
    CHECK(fail.code == 3);
    CHECK(fs::exists(dir + "/bad/scatter.svg"));
    CHECK(json::parse(slurp(dir + "/bad/report.json"))["passed"] == false);

    CHECK(run("diagnose --input " + panel + " --params " + dir +
              "/fit/fit.json --format png --out " + dir + "/fmt")
              .code == 1);
}

TEST_CASE("rolling emits one row per window") {
    const std::string dir = scratch_dir("rolling");
    const std::string panel = make_panel(dir + "/sim");

    const RunResult r = run("rolling --input " + panel + " --window 80 --step 40 "
                            "--mode fixed-alpha --restarts 4 --seed 2 --out " + dir + "/out");
    CHECK(r.code == 0);
    const std::string csv = slurp(dir + "/out/rolling.csv");
    CHECK(csv.rfind("window_end,theta,alpha_e1,alpha_e2,alpha_e3,objective\n", 0) == 0);
    // 160 rows, window 80, step 40: windows end at rows 80, 120, 160
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const json summary = json::parse(r.out);
    CHECK(summary["windows"].size() == 3);
    const json& w = summary["windows"];
    CHECK(w[0]["alphas"] == w[1]["alphas"]);
    CHECK(w[1]["alphas"] == w[2]["alphas"]);

    CHECK(run("rolling --input " + panel + " --window 500 --step 40 --out " + dir + "/o2")
              .code == 2);
}

TEST_CASE("hac-tau prints both routes and their gap") {
    const RunResult r = run("hac-tau --theta 2 --phi 2 --lambdas 1,1,1 --case inner");
    CHECK(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["tau"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(doc["tau_quadrature"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
    CHECK(std::abs(doc["difference"].get<double>()) < 1e-6);
    CHECK(doc["case"] == "inner");

    // Outer systemic shock with no shared idiosyncratic rate: tau collapses
    // to the inner-level bound (theta-1)/theta.
    const RunResult outer = run("hac-tau --theta 3 --phi 1.5 --lambdas 1,1,0 --case outer");
    CHECK(outer.code == 0);
    CHECK(json::parse(outer.out)["tau"].get<double>() ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-10));

    CHECK(run("hac-tau --theta 1.5 --phi 2 --lambdas 1,1,1 --case inner").code == 2);
    CHECK(run("hac-tau --theta 2 --phi 1 --lambdas 1,1 --case inner").code == 2);
}

TEST_CASE("pipeline outputs are byte-stable across runs") {
    const std::string dir = scratch_dir("pipeline");
    for (const std::string run_id : {"r1", "r2"}) {
        const std::string base = dir + "/" + run_id;
        REQUIRE(run("simulate --theta 3 --lambda0 1 --lambdas 1,0.5,0.7 --n 200 --seed 42 "
                    "--out " + base + "/sim --panel")
                    .code == 0);
        REQUIRE(run("estimate --input " + base + "/sim/intensities.csv --restarts 6 "
                    "--seed 42 --out " + base + "/fit")
                    .code == 0);
        const int diag = run("diagnose --input " + base + "/sim/intensities.csv --params " +
                             base + "/fit/fit.json --format svg --out " + base + "/diag")
                             .code;
        REQUIRE((diag == 0 || diag == 3));
    }
    for (const std::string file :
         {"sim/sample.csv", "sim/intensities.csv", "fit/fit.json", "fit/tau_matrix.csv",
          "diag/report.json", "diag/scatter.svg", "diag/systemic.csv"}) {
        INFO(file);
        CHECK(slurp(dir + "/r1/" + file) == slurp(dir + "/r2/" + file));
    }
}
