// Runs every acceptance criterion at full scale and prints one line each.
// Usage: ferrospin_acceptance [report-dir]

#include "ferrospin/harness.hpp"
#include "ferrospin/io.hpp"
#include "ferrospin/report.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <unistd.h>

#ifndef FERROSPIN_CLI_PATH
#error "FERROSPIN_CLI_PATH must name the command-line binary"
#endif

namespace fs = std::filesystem;
using namespace ferrospin;

namespace {

struct Criterion {
    std::string id;
    std::string name;
    std::function<Report()> run;
};

SuiteOptions with_max_n(std::size_t max_n) {
    SuiteOptions o;
    o.max_n = max_n;
    return o;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) files[fs::relative(entry.path(), dir).string()] = read_file(entry.path().string());
    }
    return files;
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

// Each invocation runs twice in fresh directories; every file it writes,
// including captured stdout, must match byte for byte.
Report determinism() {
    Report rep;
    rep.title = "determinism";
    const fs::path root = fs::temp_directory_path() / ("ferrospin_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string instance = (root / "instance.json").string();
    const std::string rbm = (root / "rbm.json").string();
    write_file(instance, R"({"n": 6, "lambda": [0.8, 1.2, 0.5, 1.0, 0.9, 1.4],
 "edges": [{"u": 0, "v": 3, "beta": 1.0, "gamma": 2.0}, {"u": 0, "v": 4, "beta": 0.9, "gamma": 2.5},
           {"u": 1, "v": 4, "beta": 1.0, "gamma": 1.7}, {"u": 1, "v": 5, "beta": 0.8, "gamma": 3.0},
           {"u": 2, "v": 5, "beta": 1.0, "gamma": 2.2}, {"u": 2, "v": 3, "beta": 0.95, "gamma": 1.9}]})");
    write_file(rbm, R"({"n0": 2, "n1": 3, "W": [[0.5, 0.2, 0.9], [0.1, 0.7, 0.4]], "theta": [0.1, -0.2, 0.3, 0.0, -0.1]})");

    const std::vector<std::string> commands{
        "sample --instance " + quoted(instance) + " --schedule glauber --steps 2000 --seed 7 --out out.csv",
        "sample --instance " + quoted(instance) + " --schedule alternating-scan --steps 500 --seed 7 --record-every 5",
        "sample --rbm " + quoted(rbm) + " --schedule field --theta 0.3 --steps 800 --seed 11 --out out.csv",
        "sample --instance " + quoted(instance) + " --schedule heat-bath --block-size 2 --steps 600 --seed 3",
        "exact --instance " + quoted(instance) + " --out out.json",
        "saw --instance " + quoted(instance) + " --vertex 2 --pin 3=1,4=0 --out out.json",
        "region --instance " + quoted(instance) + " --all-centers --d1 2 --d2 3 --out region",
        "verify --suite stationarity --quick --seed 5 --out report",
        "verify --suite coupling --quick --seed 5 --out report",
        "sweep --family path star --sizes 4 6 --beta 1 --gamma 3 --out out.csv",
    };
    for (std::size_t i = 0; i < commands.size(); ++i) {
        std::map<std::string, std::string> runs[2];
        int codes[2] = {0, 0};
        for (int r = 0; r < 2; ++r) {
            const fs::path dir = root / ("cmd" + std::to_string(i) + "_" + std::to_string(r));
            fs::create_directories(dir);
            const std::string cmd = "cd " + quoted(dir.string()) + " && " + quoted(FERROSPIN_CLI_PATH) + " " +
                                    commands[i] + " > stdout.txt 2> stderr.txt";
            codes[r] = std::system(cmd.c_str());
            runs[r] = snapshot(dir);
        }
        ReportRow row;
        row.instance = "invocation " + std::to_string(i);
        row.op = "cli";
        row.relation = commands[i].substr(0, commands[i].find(' ')) + ": exit 0 twice, " +
                       std::to_string(runs[0].size()) + " files byte-identical";
        std::size_t bytes = 0;
        for (const auto& [name, body] : runs[0]) {
            if (name != "stderr.txt") bytes += body.size();
        }
        row.pass = codes[0] == 0 && codes[1] == 0 && runs[0] == runs[1] && bytes > 0;
        row.lhs = row.pass ? 0.0 : 1.0;
        rep.add(row);
    }
    fs::remove_all(root);
    return rep;
}

} // namespace

int main(int argc, char** argv) {
    const std::string report_dir = argc > 1 ? argv[1] : "";
    if (!report_dir.empty()) fs::create_directories(report_dir);

    const std::vector<Criterion> criteria{
        {"AC1", "SAW oracle equivalence, all connected graphs n <= 7",
         [] { return check_saw_oracle(with_max_n(7)); }},
        {"AC2", "pinning conditionals, 200 pairs, n <= 7", [] { return check_pinning_conditionals(with_max_n(7)); }},
        {"AC3", "stationarity and detailed balance, n <= 10", [] { return check_stationarity(with_max_n(10)); }},
        {"AC4", "relaxation inequality and scan step bound, n <= 10",
         [] { return check_relaxation(with_max_n(10)); }},
        {"AC5", "monotone coupling safety, 50 instances x 1e4 steps",
         [] { return check_coupling_monotonicity(with_max_n(10)); }},
        {"AC6", "censoring dominance, n <= 5, 200 events", [] { return check_censoring_dominance(with_max_n(5)); }},
        {"AC7", "potential machinery, 20 regimes", [] { return check_potential(SuiteOptions{}); }},
        {"AC8", "region construction, 100 graphs n <= 200", [] { return check_regions(SuiteOptions{}); }},
        {"AC9", "universal pinning dominance and monotone potential",
         [] { return check_universal_pinning(SuiteOptions{}); }},
        {"AC10", "influence and decay", [] { return check_influence(SuiteOptions{}); }},
        {"AC11", "coupling failure vs exact TV, 40 instances n <= 6",
         [] { return check_coupling_mixing(with_max_n(6)); }},
        {"AC12", "field-dynamics product inequality, 20 instances n <= 4",
         [] { return check_field_boost(with_max_n(4)); }},
        {"AC13", "CLI determinism", determinism},
    };

    std::size_t failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Report rep;
        std::string error;
        try {
            rep = c.run();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = error.empty() && !rep.rows.empty() && rep.all_pass();
        if (!pass) ++failed;
        char line[512];
        std::snprintf(line, sizeof line, "%-5s %s  %-55s rows=%zu failed=%zu worst_slack=%s  %.1fs", c.id.c_str(),
                      pass ? "PASS" : "FAIL", c.name.c_str(), rep.rows.size(), rep.failures(),
                      format_double(rep.worst_slack()).c_str(), secs);
        std::cout << line << std::endl;
        if (!error.empty()) std::cout << "      error: " << error << std::endl;
        for (const auto& r : rep.rows) {
            if (!r.pass) {
                std::cout << "      " << r.instance << " | " << r.op << " | " << r.relation
                          << " | lhs=" << format_double(r.lhs) << " rhs=" << format_double(r.rhs) << std::endl;
            }
        }
        if (!report_dir.empty()) emit_report(rep, (fs::path(report_dir) / c.id).string());
    }
    std::cout << (failed == 0 ? "all 13 criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
