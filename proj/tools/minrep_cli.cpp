// Command-line front end: verification runs with JSON/CSV reports, direct
// synthesis of solutions at probe points, the normalization-constant table,
// and plot-ready comparison grids.

#include "minrep/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace minrep;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;

struct CliConfig {
    int p = 0;  // 0 = every default signature
    int q = 0;
    std::string suite = "all";
    unsigned long seed = 1234;
    double tol_scale = 1.0;
    std::string out = ".";
};

// Flat key=value file; '#' starts a comment.  Unknown keys are rejected so
// typos surface instead of silently using defaults.
void load_config_file(const std::string& path, CliConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("config", "cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError(
                "config", path + ":" + std::to_string(lineno) +
                              ": expected key=value");
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string()
                                          : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "p")
            cfg.p = std::stoi(val);
        else if (key == "q")
            cfg.q = std::stoi(val);
        else if (key == "suite")
            cfg.suite = val;
        else if (key == "seed")
            cfg.seed = std::stoul(val);
        else if (key == "tol_scale")
            cfg.tol_scale = std::stod(val);
        else if (key == "out")
            cfg.out = val;
        else
            throw CLI::ValidationError(
                "config", path + ":" + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
    }
}

void print_config(const CliConfig& cfg) {
    std::cout << "p=" << cfg.p << "\n"
              << "q=" << cfg.q << "\n"
              << "suite=" << cfg.suite << "\n"
              << "seed=" << cfg.seed << "\n"
              << "tol_scale=" << cfg.tol_scale << "\n"
              << "out=" << cfg.out << "\n";
}

VerifyConfig make_verify_config(const CliConfig& cli) {
    VerifyConfig cfg = VerifyConfig::defaults();
    cfg.seed = cli.seed;
    cfg.tol_scale = cli.tol_scale;
    if (cli.p != 0 || cli.q != 0) {
        if (cli.p == 0 || cli.q == 0)
            throw CLI::ValidationError("--p/--q",
                                       "set both or neither of p and q");
        cfg.signatures = {Signature::create(cli.p, cli.q)};
    }
    return cfg;
}

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

json to_json(const CheckRecord& c) {
    json values = json::object();
    for (const CheckValue& v : c.values) values[v.name] = v.value;
    return json{{"id", c.id},
                {"anchor", c.anchor},
                {"relation", c.relation},
                {"criterion", c.criterion},
                {"informational", c.informational},
                {"pass", c.pass},
                {"residual", c.residual},
                {"tol", c.tol},
                {"values", values},
                {"runtime_s", c.runtime_s}};
}

int cmd_verify(const CliConfig& cli) {
    VerifyConfig cfg = make_verify_config(cli);
    std::vector<std::string> suites;
    if (cli.suite == "all") {
        suites = suite_names();
    } else {
        std::stringstream ss(cli.suite);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) suites.push_back(item);
    }

    fs::create_directories(cli.out);
    json jsuites = json::array();
    std::ofstream csv(fs::path(cli.out) / "checks.csv");
    csv << "suite,id,criterion,informational,pass,residual,tol\n";
    bool all_pass = true;
    for (const std::string& name : suites) {
        SuiteReport rep = run_suite(name, cfg);
        json jchecks = json::array();
        for (const CheckRecord& c : rep.checks) {
            jchecks.push_back(to_json(c));
            csv << rep.suite << "," << c.id << "," << c.criterion << ","
                << (c.informational ? 1 : 0) << "," << (c.pass ? 1 : 0) << ","
                << std::setprecision(17) << c.residual << "," << c.tol
                << "\n";
            if (!c.informational && !c.pass) {
                all_pass = false;
                std::cout << "FAIL " << c.id << " [" << c.anchor
                          << "] residual " << c.residual << " tol " << c.tol
                          << "\n";
                for (const CheckValue& v : c.values)
                    std::cout << "     " << v.name << " = " << v.value << "\n";
            }
        }
        jsuites.push_back(json{{"suite", rep.suite},
                               {"passed", rep.passed()},
                               {"runtime_s", rep.runtime_s},
                               {"checks", jchecks}});
        std::cout << "suite " << rep.suite << ": " << rep.checks.size()
                  << " checks, "
                  << (rep.passed() ? "all gated checks pass"
                                   : "FAILURES present")
                  << "\n";
    }
    json report{{"schema_version", kSchemaVersion},
                {"timestamp", iso_timestamp()},
                {"config",
                 {{"p", cli.p},
                  {"q", cli.q},
                  {"suite", cli.suite},
                  {"seed", cli.seed},
                  {"tol_scale", cli.tol_scale}}},
                {"suites", jsuites},
                {"passed", all_pass}};
    std::ofstream out(fs::path(cli.out) / "report.json");
    out << report.dump(2) << "\n";
    std::cout << (all_pass ? "PASS" : "FAIL") << "; report written to "
              << (fs::path(cli.out) / "report.json").string() << "\n";
    return all_pass ? 0 : 1;
}

int cmd_constants(const CliConfig& cli) {
    int p = cli.p ? cli.p : 3, q = cli.q ? cli.q : 3;
    Signature sig = Signature::create(p, q);
    Constants k = constants(sig);
    double check = k.c1 * k.c3 * std::pow(2.0, sig.n - 2.0);
    json j{
        {"schema_version", kSchemaVersion},
        {"p", p},
        {"q", q},
        {"n", sig.n},
        {"eps_sign", {{"value", k.eps_sign}, {"expr", "(-1)^{(p-q)/2}"}}},
        {"delta",
         {{"value", k.delta},
          {"expr", "+1 for p-q = 0,2 mod 8; -1 for p-q = 4,6 mod 8"}}},
        {"c1",
         {{"value", k.c1},
          {"expr", "Gamma((n-1-eps)/4) / (2^{n/2} pi^{(n+1)/2})"}}},
        {"c2",
         {{"value", k.c2},
          {"expr",
           "4 delta pi^{n/2} Gamma((n-1+eps)/4) / Gamma(n/2-1)"}}},
        {"c3",
         {{"value", k.c3},
          {"expr", "pi^{n/2} Gamma((n-1+eps)/4) / Gamma(n/2-1)"}}},
        {"synthesis_inverse_const",
         {{"value", k.thm55_const},
          {"expr",
           "(2 pi)^{n/2} 2^{-(p-5)/2} Gamma((q-1)/2) / Gamma((n-2)/2)"}}},
        {"synthesis_const",
         {{"value", k.prop56_const},
          {"expr",
           "Gamma((n-2)/2) / (2^{(q+3)/2} pi^{n/2} Gamma((q-1)/2))"}}},
        {"c1_c3_times_2^{n-2}", check},
        {"c1_c3_identity_pass", std::abs(check - 1.0) < 1e-12}};
    std::cout << j.dump(2) << "\n";
    return std::abs(check - 1.0) < 1e-12 ? 0 : 1;
}

int cmd_synth(const CliConfig& cli, double wplus, double wminus,
              const std::string& line, int line_count) {
    int p = cli.p ? cli.p : 3, q = cli.q ? cli.q : 3;
    Signature sig = Signature::create(p, q);
    BiRadial phi;
    phi.plus_profile = [wplus](double r) { return std::exp(-wplus * r * r); };
    phi.minus_profile = [wminus](double r) {
        return std::exp(-wminus * r * r);
    };
    auto f = biradial_synthesis(sig, phi);

    std::vector<Vec> probes;
    if (!line.empty()) {
        // axis,start,end : probes on one coordinate axis
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> parts;
        while (std::getline(ss, tok, ',')) parts.push_back(std::stod(tok));
        if (parts.size() != 3 || parts[0] < 1 || parts[0] > sig.n)
            throw CLI::ValidationError("--line",
                                       "expected axis,start,end with "
                                       "1 <= axis <= n");
        int axis = int(parts[0]) - 1;
        for (int i = 0; i < line_count; ++i) {
            Vec z = Vec::Zero(sig.n);
            z[axis] = parts[1] + (parts[2] - parts[1]) * i /
                                     std::max(1, line_count - 1);
            probes.push_back(z);
        }
    }
    fs::create_directories(cli.out);
    std::ofstream csv(fs::path(cli.out) / "synth.csv");
    for (int j = 1; j <= sig.n; ++j) csv << "z" << j << ",";
    csv << "re,im\n";
    csv << std::setprecision(17);
    for (const Vec& z : probes) {
        double r = z.head(sig.p - 1).norm();
        double rho = z.tail(sig.q - 1).norm();
        Cplx v = f(r, rho);
        for (int j = 0; j < sig.n; ++j) csv << z[j] << ",";
        csv << v.real() << "," << v.imag() << "\n";
    }
    std::cout << "wrote " << probes.size() << " probes to "
              << (fs::path(cli.out) / "synth.csv").string() << "\n";
    return 0;
}

int cmd_plot_data(const CliConfig& cli, int grid) {
    int p = cli.p ? cli.p : 3, q = cli.q ? cli.q : 3;
    Signature sig = Signature::create(p, q);
    if (sig.p < sig.q)
        throw CLI::ValidationError(
            "--p/--q", "generating-function comparison needs p >= q; use the "
                       "swapped signature");
    Constants k = constants(sig);
    const double c =
        k.prop56_const * std::pow(2.0, (5.0 - 2.0 * sig.p - sig.q) / 2.0);
    Quad1D rule = radial_log_rule(1e-7, 25.0, 400);
    const double knu = (sig.q - 3.0) / 2.0;

    fs::create_directories(cli.out);
    std::ofstream csv(fs::path(cli.out) / "generator_comparison.csv");
    csv << "r,rho,synthesized,closed_form\n" << std::setprecision(17);
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            double r = 0.2 + 2.2 * i / std::max(1, grid - 1);
            double rho = 0.2 + 2.2 * j / std::max(1, grid - 1);
            std::vector<double> terms(rule.nodes.size());
            for (int a = 0; a < rule.nodes.size(); ++a) {
                double s = rule.nodes[a];
                terms[a] = rule.weights[a] * std::pow(s, sig.n - 3.0) *
                           std::pow(s, (3.0 - sig.q) / 2.0) *
                           bessel_k(knu, 2.0 * s) *
                           sphere_plane_wave(sig.p - 1, s * r) *
                           sphere_plane_wave(sig.q - 1, s * rho);
            }
            double synth = 0.5 * std::pow(2.0 * M_PI, -double(sig.n)) *
                           pairwise_sum(terms);
            Vec z = Vec::Zero(sig.n);
            z[0] = r;
            z[sig.n - 1] = rho;
            // parity sign of the even closed form past the equator
            double corr =
                k.eps_sign < 0 && 1.0 + (r * r - rho * rho) / 4.0 < 0.0
                    ? -1.0
                    : 1.0;
            csv << r << "," << rho << "," << synth << ","
                << c * corr * generating_f0(sig, z) << "\n";
        }
    }
    std::cout << "wrote "
              << (fs::path(cli.out) / "generator_comparison.csv").string()
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification and synthesis harness"};
    app.require_subcommand(0, 1);

    CliConfig cfg;
    std::string config_path;
    bool show_config = false;
    // the config file loads before parsing so explicit flags override it
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    if (!config_path.empty()) {
        try {
            load_config_file(config_path, cfg);
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
    }
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_flag("--show-config", show_config,
                 "print the effective configuration and exit");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--p", cfg.p, "first signature index");
        sub->add_option("--q", cfg.q, "second signature index");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--tol-scale", cfg.tol_scale,
                        "multiplier on every tolerance");
    };

    CLI::App* verify = app.add_subcommand("verify", "run verification suites");
    add_common(verify);
    verify->add_option("--suite", cfg.suite,
                       "suite name, comma list, or 'all'");

    CLI::App* constants_cmd =
        app.add_subcommand("constants", "print the normalization constants");
    add_common(constants_cmd);

    double wplus = 1.0, wminus = 1.0;
    std::string line;
    int line_count = 0;
    CLI::App* synth =
        app.add_subcommand("synth", "synthesize a solution at probe points");
    add_common(synth);
    synth->add_option("--plus-width", wplus, "Gaussian width, + radius");
    synth->add_option("--minus-width", wminus, "Gaussian width, - radius");
    synth->add_option("--line", line, "probe line axis,start,end");
    synth->add_option("--count", line_count, "number of probes on the line");

    int grid = 12;
    CLI::App* plot = app.add_subcommand(
        "plot-data", "emit the generating-function comparison grid");
    add_common(plot);
    plot->add_option("--grid", grid, "grid points per radius");

    CLI11_PARSE(app, argc, argv);

    if (show_config) {
        print_config(cfg);
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }
    try {
        if (verify->parsed()) return cmd_verify(cfg);
        if (constants_cmd->parsed()) return cmd_constants(cfg);
        if (synth->parsed()) return cmd_synth(cfg, wplus, wminus, line,
                                              line_count);
        if (plot->parsed()) return cmd_plot_data(cfg, grid);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
