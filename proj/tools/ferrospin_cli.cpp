// ferrospin command-line front end.
//
// Exit codes: 0 success, 1 input or regime error, 2 capacity error,
// 3 verification failure.

#include "ferrospin/errors.hpp"
#include "ferrospin/exact.hpp"
#include "ferrospin/harness.hpp"
#include "ferrospin/io.hpp"
#include "ferrospin/model.hpp"
#include "ferrospin/regions.hpp"
#include "ferrospin/report.hpp"
#include "ferrospin/samplers.hpp"
#include "ferrospin/sawtree.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = ferrospin;
using nlohmann::ordered_json;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitCapacity = 2;
constexpr int kExitVerify = 3;

struct Source {
    std::string instance;
    std::string rbm;
};

struct Loaded {
    fs::TwoSpinSystem system;
    std::optional<fs::Bipartition> parts; // from the RBM layers when given
};

Loaded load(const Source& src) {
    if (!src.instance.empty() && !src.rbm.empty()) throw fs::InputError("give either --instance or --rbm, not both");
    if (!src.rbm.empty()) {
        const auto rbm = fs::load_rbm(src.rbm);
        return {fs::rbm_to_two_spin(rbm), rbm.bipartition()};
    }
    if (src.instance.empty()) throw fs::InputError("an instance is required (--instance or --rbm)");
    return {fs::load_instance(src.instance), std::nullopt};
}

void add_source(CLI::App* cmd, Source& src) {
    cmd->add_option("--instance", src.instance, "Two-spin instance JSON");
    cmd->add_option("--rbm", src.rbm, "RBM JSON");
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        fs::write_file(out, text);
    }
}

std::vector<fs::Block> consecutive_blocks(std::size_t n, std::size_t size) {
    if (size == 0) throw fs::InputError("--block-size must be >= 1");
    std::vector<fs::Block> blocks;
    for (std::size_t v = 0; v < n; v += size) {
        fs::Block b;
        for (std::size_t w = v; w < std::min(n, v + size); ++w) b.push_back(w);
        blocks.push_back(std::move(b));
    }
    return blocks;
}

struct ScheduleArgs {
    std::string kind = "glauber";
    std::size_t block_size = 1;
    double theta = 0.5;
};

void add_schedule(CLI::App* cmd, ScheduleArgs& s) {
    cmd->add_option("--schedule", s.kind, "glauber | heat-bath | systematic-scan | alternating-scan | field")
        ->capture_default_str();
    cmd->add_option("--block-size", s.block_size, "Block size for heat-bath and systematic-scan")
        ->capture_default_str();
    cmd->add_option("--theta", s.theta, "Field dynamics selection probability")->capture_default_str();
}

fs::UpdateSchedule make_schedule(const ScheduleArgs& s, const Loaded& in) {
    const std::size_t n = in.system.size();
    switch (fs::parse_schedule_kind(s.kind)) {
    case fs::ScheduleKind::Glauber: return fs::UpdateSchedule::glauber(n);
    case fs::ScheduleKind::HeatBath: return fs::UpdateSchedule::heat_bath(consecutive_blocks(n, s.block_size));
    case fs::ScheduleKind::SystematicScan:
        return fs::UpdateSchedule::systematic_scan(consecutive_blocks(n, s.block_size));
    case fs::ScheduleKind::AlternatingScan: {
        auto parts = in.parts ? in.parts : fs::two_coloring(in.system);
        if (!parts || !fs::is_independent_set(in.system, parts->part0) ||
            !fs::is_independent_set(in.system, parts->part1)) {
            throw fs::InputError("parts not independent sets");
        }
        return fs::UpdateSchedule::alternating_scan(*parts);
    }
    case fs::ScheduleKind::FieldDynamics: return fs::UpdateSchedule::field(s.theta);
    }
    throw fs::InputError("unknown schedule");
}

fs::Pinning parse_pinning(const std::string& text) {
    fs::Pinning pin;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw fs::InputError("pin '" + item + "' must look like v=s");
        try {
            const auto v = std::stoull(item.substr(0, eq));
            const auto s = std::stoi(item.substr(eq + 1));
            if (s != 0 && s != 1) throw fs::InputError("pinned spin must be 0 or 1");
            pin[v] = static_cast<fs::Spin>(s);
        } catch (const std::logic_error&) {
            throw fs::InputError("bad pin '" + item + "'");
        }
    }
    return pin;
}

std::string summary_line(const fs::Report& rep) {
    std::ostringstream s;
    s << rep.title << ": " << rep.rows.size() << " rows, " << rep.failures() << " failed, worst slack "
      << fs::format_double(rep.worst_slack()) << '\n';
    return s.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ferrospin: ferromagnetic two-spin systems, samplers and exact checks"};
    app.set_config("--config", "", "TOML config file; flags override it");
    app.require_subcommand(1);

    // sample
    Source sample_src;
    ScheduleArgs sample_sched;
    std::size_t steps = 1000;
    std::uint64_t seed = 1;
    std::size_t record_every = 1;
    std::string sample_out;
    auto* sample = app.add_subcommand("sample", "Run a chain from all-ones and write its trajectory CSV");
    add_source(sample, sample_src);
    add_schedule(sample, sample_sched);
    sample->add_option("--steps", steps, "Number of steps")->capture_default_str();
    sample->add_option("--seed", seed, "Random seed")->capture_default_str();
    sample->add_option("--record-every", record_every, "Row spacing in the CSV")->capture_default_str();
    sample->add_option("--out", sample_out, "CSV path (stdout when omitted)");

    // exact
    Source exact_src;
    ScheduleArgs exact_sched;
    double exact_eps = fs::default_eps();
    std::string exact_out;
    auto* exact = app.add_subcommand("exact", "Exact Gibbs marginals, spectral gap and mixing time");
    add_source(exact, exact_src);
    add_schedule(exact, exact_sched);
    exact->add_option("--eps", exact_eps, "TV threshold for the mixing time")->capture_default_str();
    exact->add_option("--out", exact_out, "JSON path (stdout when omitted)");

    // saw
    Source saw_src;
    std::size_t saw_vertex = 0;
    std::string saw_pin;
    std::string saw_out;
    auto* saw = app.add_subcommand("saw", "Marginal of a vertex through its self-avoiding-walk tree");
    add_source(saw, saw_src);
    saw->add_option("--vertex", saw_vertex, "Root vertex")->capture_default_str();
    saw->add_option("--pin", saw_pin, "Pinning as v=s,v=s,...");
    saw->add_option("--out", saw_out, "JSON path (stdout when omitted)");

    // region
    Source region_src;
    std::optional<std::size_t> region_center;
    bool all_centers = false;
    std::optional<std::size_t> d1;
    std::optional<std::size_t> d2;
    double c_d = 4.0;
    std::string region_out;
    auto* region = app.add_subcommand("region", "Build and verify the neighbourhood region of a vertex");
    add_source(region, region_src);
    region->add_option("--center", region_center, "Centre vertex");
    region->add_flag("--all-centers", all_centers, "One region per vertex, in vertex order");
    region->add_option("--d1", d1, "Depth budget (default from n)");
    region->add_option("--d2", d2, "Degree budget (default from n)");
    region->add_option("--c-d", c_d, "Constant in the default d1")->capture_default_str();
    region->add_option("--out", region_out, "JSON path, or prefix with --all-centers (stdout when omitted)");

    // verify
    std::string suite;
    fs::SuiteOptions vopts;
    std::string verify_out;
    auto* verify = app.add_subcommand("verify", "Run a verification suite and write its report");
    verify->add_option("--suite", suite, "Suite name")
        ->required()
        ->check(CLI::IsMember(fs::suite_names()));
    verify->add_option("--max-n", vopts.max_n, "Largest exhaustive instance size")->capture_default_str();
    verify->add_option("--seed", vopts.seed, "Random seed")->capture_default_str();
    verify->add_option("--instances", vopts.instances, "Instances per check (0 = suite default)");
    verify->add_option("--trials", vopts.trials, "Coupling trials (0 = suite default)");
    verify->add_option("--eps", vopts.eps, "TV threshold (0 = 1/(4e))");
    verify->add_option("--lambda-frac", vopts.lambda_frac, "Potential suite: lambda / lambda_c");
    verify->add_flag("--quick", vopts.quick, "Smaller smoke-test sizes");
    verify->add_option("--out", verify_out, "Report prefix: writes PREFIX.csv and PREFIX.json");

    // sweep
    std::vector<std::string> families{"path", "star", "edgeless", "complete-bipartite"};
    std::vector<std::size_t> sizes{2, 4, 6, 8, 10, 12};
    double sweep_beta = 1.0;
    double sweep_gamma = 2.0;
    std::optional<double> sweep_lambda;
    double lambda0_frac = 0.9;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "All-to-one influence across graph families and sizes");
    sweep->add_option("--family", families, "Families: path star edgeless complete-bipartite cycle complete");
    sweep->add_option("--sizes", sizes, "Vertex counts");
    sweep->add_option("--beta", sweep_beta)->capture_default_str();
    sweep->add_option("--gamma", sweep_gamma)->capture_default_str();
    sweep->add_option("--lambda", sweep_lambda, "Field (default: --lambda0-frac times lambda0)");
    sweep->add_option("--lambda0-frac", lambda0_frac)->capture_default_str();
    sweep->add_option("--out", sweep_out, "CSV path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*sample) {
            const auto in = load(sample_src);
            const auto schedule = make_schedule(sample_sched, in);
            const auto traj = fs::run_chain(in.system, schedule, steps, seed, record_every);
            emit(sample_out, fs::trajectory_csv(traj));
            if (!sample_out.empty()) {
                const auto& last = traj.rows.back();
                std::cout << "steps=" << last.step << " hamming_weight=" << last.hamming_weight
                          << " coupled=" << last.coupled << '\n';
            }
        } else if (*exact) {
            const auto in = load(exact_src);
            const auto schedule = make_schedule(exact_sched, in);
            const auto table = fs::gibbs_distribution(in.system);
            const fs::Matrix p = schedule.kernel(in.system);
            const bool reversible = schedule.kind == fs::ScheduleKind::Glauber ||
                                    schedule.kind == fs::ScheduleKind::HeatBath ||
                                    schedule.kind == fs::ScheduleKind::FieldDynamics;
            const auto spec = fs::spectral_report(
                p, table.prob, reversible ? fs::ChainKind::Reversible : fs::ChainKind::Nonreversible);
            ordered_json j;
            j["instance_hash"] = fs::instance_hash(in.system);
            j["n"] = in.system.size();
            j["schedule"] = schedule.describe();
            j["log_partition"] = table.log_partition;
            std::vector<double> p1;
            for (std::size_t v = 0; v < in.system.size(); ++v) p1.push_back(table.marginal(v, 1));
            j["marginal_p1"] = p1;
            j["spectral_gap"] = spec.spectral_gap;
            j["relaxation_time"] = spec.relaxation_time;
            j["eps"] = exact_eps;
            j["mixing_time"] = fs::exact_mixing_time(p, table.prob, exact_eps);
            emit(exact_out, j.dump(2) + "\n");
        } else if (*saw) {
            const auto in = load(saw_src);
            if (saw_vertex >= in.system.size()) throw fs::InputError("vertex out of range");
            const auto pin = parse_pinning(saw_pin);
            for (const auto& [v, s] : pin) {
                if (v >= in.system.size()) throw fs::InputError("pinned vertex out of range");
                if (v == saw_vertex) throw fs::InputError("the root vertex cannot be pinned");
            }
            std::vector<std::size_t> boundary;
            for (const auto& [v, s] : pin) boundary.push_back(v);
            const auto tree = fs::build_saw_tree(in.system, saw_vertex, boundary);
            const auto m = fs::saw_marginal(in.system, saw_vertex, pin);
            ordered_json j;
            j["instance_hash"] = fs::instance_hash(in.system);
            j["vertex"] = saw_vertex;
            j["tree_nodes"] = tree.size();
            j["p0"] = m.p0;
            j["p1"] = m.p1;
            if (in.system.size() <= fs::kMaxTableVertices) {
                const double brute = fs::conditional_marginal(in.system, pin, saw_vertex, 1);
                j["brute_force_p1"] = brute;
                j["abs_error"] = std::abs(brute - m.p1);
            }
            emit(saw_out, j.dump(2) + "\n");
        } else if (*region) {
            const auto in = load(region_src);
            const std::size_t n = in.system.size();
            auto params = fs::RegionParams::from_n(n, c_d);
            if (d1) params.d1 = *d1;
            if (d2) params.d2 = *d2;
            params.validate();
            std::vector<std::size_t> centers;
            if (all_centers) {
                for (std::size_t v = 0; v < n; ++v) centers.push_back(v);
            } else {
                if (!region_center) throw fs::InputError("--center or --all-centers is required");
                centers.push_back(*region_center);
            }
            for (auto v : centers) {
                if (v >= n) throw fs::InputError("center " + std::to_string(v) + " out of range");
            }
            bool ok = true;
            for (auto v : centers) {
                const auto reg = fs::construct_region(in.system, v, params);
                const auto check = fs::verify_region(in.system, reg);
                ok = ok && check.ok();
                auto j = ordered_json::parse(fs::region_json(reg));
                ordered_json vj;
                vj["size_ok"] = check.size_ok;
                vj["size_bound"] = check.size_bound;
                vj["paths_ok"] = check.paths_ok;
                vj["complete"] = check.complete;
                vj["leaves_checked"] = check.leaves_checked;
                vj["witness"] = check.witness;
                j["verification"] = vj;
                const std::string text = j.dump(2) + "\n";
                if (all_centers && !region_out.empty() && region_out != "-") {
                    fs::write_file(region_out + "_" + std::to_string(v) + ".json", text);
                } else {
                    emit(region_out, text);
                }
            }
            return ok ? 0 : kExitVerify;
        } else if (*verify) {
            const auto rep = fs::run_suite(suite, vopts);
            if (!verify_out.empty()) fs::emit_report(rep, verify_out);
            std::cout << summary_line(rep);
            for (const auto& r : rep.rows) {
                if (!r.pass) std::cout << "FAIL " << r.instance << ' ' << r.op << ": " << r.relation << '\n';
            }
            return rep.all_pass() ? 0 : kExitVerify;
        } else if (*sweep) {
            const double lam = sweep_lambda ? *sweep_lambda : lambda0_frac * fs::lambda0(sweep_beta, sweep_gamma);
            const auto rows = fs::influence_regime_sweep(families, sizes, sweep_beta, sweep_gamma, lam);
            std::ostringstream csv;
            csv << "family,n,beta,gamma,lambda,influence\n";
            for (const auto& r : rows) {
                csv << r.family << ',' << r.n << ',' << fs::format_double(sweep_beta) << ','
                    << fs::format_double(sweep_gamma) << ',' << fs::format_double(r.lambda) << ','
                    << fs::format_double(r.influence) << '\n';
            }
            emit(sweep_out, csv.str());
        }
    } catch (const fs::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const fs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}
