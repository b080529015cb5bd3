#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// Exercises the installed binary end to end; MINREP_CLI_PATH comes from the
// build system.

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(MINREP_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof buf, pipe))
        out.append(buf, got);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("minrep_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

json load_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

// drops the fields that legitimately vary between identical runs
json strip_volatile(json j) {
    if (j.is_object()) {
        j.erase("timestamp");
        j.erase("runtime_s");
        for (auto& [k, v] : j.items()) v = strip_volatile(v);
    } else if (j.is_array()) {
        for (auto& v : j) v = strip_volatile(v);
    }
    return j;
}

}  // namespace

TEST_CASE("constants command prints the table and the product identity") {
    RunResult r = run_cli("constants --p 4 --q 2");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["eps_sign"]["value"] == -1.0);
    CHECK(j["delta"]["value"] == 1.0);
    CHECK(j["c1_c3_identity_pass"] == true);
    CHECK(j["c1"].contains("expr"));

    json j44 = json::parse(run_cli("constants --p 4 --q 4").out);
    CHECK(j44["eps_sign"]["value"] == 1.0);
    CHECK(j44["delta"]["value"] == 1.0);
    json j24 = json::parse(run_cli("constants --p 2 --q 4").out);
    CHECK(j24["delta"]["value"] == -1.0);
}

TEST_CASE("invalid signatures are usage errors") {
    CHECK(run_cli("constants --p 2 --q 3").exit_code == 2);  // odd sum
    CHECK(run_cli("constants --p 2 --q 2").exit_code == 2);  // excluded
    CHECK(run_cli("verify --p 2 --q 3 --suite geometry").exit_code == 2);
}

TEST_CASE("verify writes a schema-versioned report with anchored records") {
    fs::path out = fresh_dir("verify");
    RunResult r = run_cli("verify --suite geometry --p 3 --q 3 --out " +
                          out.string());
    CHECK(r.exit_code == 0);
    json rep = load_json(out / "report.json");
    CHECK(rep["schema_version"] == 1);
    CHECK(rep["passed"] == true);
    REQUIRE(rep["suites"].size() == 1);
    const json& checks = rep["suites"][0]["checks"];
    CHECK(checks.size() > 0);
    for (const json& c : checks) {
        CHECK(c["anchor"].get<std::string>().size() > 0);
        CHECK(c.contains("residual"));
        CHECK(c.contains("tol"));
        CHECK(c.contains("criterion"));
    }
    // CSV artifact alongside
    std::ifstream csv(out / "checks.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "suite,id,criterion,informational,pass,residual,tol");
}

TEST_CASE("verify output is deterministic given the seed") {
    fs::path o1 = fresh_dir("det1"), o2 = fresh_dir("det2");
    CHECK(run_cli("verify --suite geometry --p 4 --q 2 --seed 77 --out " +
                  o1.string())
              .exit_code == 0);
    CHECK(run_cli("verify --suite geometry --p 4 --q 2 --seed 77 --out " +
                  o2.string())
              .exit_code == 0);
    json a = strip_volatile(load_json(o1 / "report.json"));
    json b = strip_volatile(load_json(o2 / "report.json"));
    CHECK(a.dump() == b.dump());
}

TEST_CASE("synth emits probe CSV; empty probe list is header-only") {
    fs::path out = fresh_dir("synth");
    RunResult r = run_cli("synth --p 3 --q 3 --line 1,0,2 --count 4 --out " +
                          out.string());
    CHECK(r.exit_code == 0);
    std::ifstream csv(out / "synth.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "z1,z2,z3,z4,re,im");
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        auto pos = line.rfind(',');
        auto pos2 = line.rfind(',', pos - 1);
        double re = std::stod(line.substr(pos2 + 1, pos - pos2 - 1));
        CHECK(std::isfinite(re));
    }
    CHECK(rows == 4);

    fs::path out2 = fresh_dir("synth_empty");
    CHECK(run_cli("synth --p 3 --q 3 --out " + out2.string()).exit_code == 0);
    std::ifstream csv2(out2 / "synth.csv");
    std::getline(csv2, line);
    CHECK(line == "z1,z2,z3,z4,re,im");
    CHECK(!std::getline(csv2, line));
}

TEST_CASE("plot-data compares synthesis against the closed form") {
    fs::path out = fresh_dir("plot");
    CHECK(run_cli("plot-data --p 3 --q 3 --grid 3 --out " + out.string())
              .exit_code == 0);
    std::ifstream csv(out / "generator_comparison.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "r,rho,synthesized,closed_form");
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> v;
        while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
        REQUIRE(v.size() == 4);
        // quadrature-limited agreement between synthesis and closed form
        CHECK(std::abs(v[2] - v[3]) <= 1e-6 + 1e-4 * std::abs(v[3]));
    }
    CHECK(rows == 9);
}

TEST_CASE("config file loads and flags override it") {
    fs::path dir = fresh_dir("config");
    fs::path cfgfile = dir / "run.cfg";
    {
        std::ofstream f(cfgfile);
        f << "# comment\np = 2\nq = 4\nseed = 99\ntol_scale = 2.0\n";
    }
    RunResult shown =
        run_cli("--config " + cfgfile.string() + " --show-config");
    CHECK(shown.exit_code == 0);
    CHECK(shown.out.find("p=2") != std::string::npos);
    CHECK(shown.out.find("q=4") != std::string::npos);
    CHECK(shown.out.find("seed=99") != std::string::npos);
    CHECK(shown.out.find("tol_scale=2") != std::string::npos);

    // explicit flags win over the file
    RunResult over = run_cli("--config " + cfgfile.string() +
                             " constants --p 3 --q 3");
    CHECK(over.exit_code == 0);
    json j = json::parse(over.out);
    CHECK(j["p"] == 3);
    CHECK(j["q"] == 3);

    // unknown keys are rejected
    {
        std::ofstream f(cfgfile, std::ios::trunc);
        f << "nodes = 7\n";
    }
    CHECK(run_cli("--config " + cfgfile.string() + " --show-config")
              .exit_code == 2);
}

TEST_CASE("bare invocation prints usage and fails") {
    RunResult r = run_cli("");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("Usage") != std::string::npos);
}
