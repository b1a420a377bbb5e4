#pragma once

#include "ferrospin/exact.hpp"
#include "ferrospin/model.hpp"
#include "ferrospin/random.hpp"
#include "ferrospin/report.hpp"
#include "ferrospin/samplers.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ferrospin {

// ---- graphs and instances ----

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

EdgeList path_graph(std::size_t n);
EdgeList cycle_graph(std::size_t n);
EdgeList star_graph(std::size_t leaves); // centre is vertex 0
EdgeList complete_graph(std::size_t n);
EdgeList complete_bipartite(std::size_t a, std::size_t b); // sides 0..a-1 and a..a+b-1
EdgeList random_graph(std::size_t n, double p, RandomSource& rng);
// Random spanning tree plus extra G(n, p) edges.
EdgeList random_connected_graph(std::size_t n, double p, RandomSource& rng);
EdgeList random_tree(std::size_t n, RandomSource& rng);
// Sides 0..n0-1 and n0..n0+n1-1.
EdgeList random_bipartite_graph(std::size_t n0, std::size_t n1, double p, RandomSource& rng);
bool is_connected(std::size_t n, const EdgeList& edges);

TwoSpinSystem uniform_system(std::size_t n, const EdgeList& edges, double beta, double gamma, double lambda);
// beta_e ~ U[0.5, 1], gamma_e ~ U(1/beta_e + 0.1, 5], lambda_v ~ U(0, lambda_bound).
TwoSpinSystem random_system(std::size_t n, const EdgeList& edges, double lambda_bound, RandomSource& rng);
// beta ~ U[0.5, 1], gamma ~ U(1/beta + 0.1, 5], lambda_bound = fraction * lambda_c.
ParamClass random_class(RandomSource& rng, double lambda_c_fraction);
// Edges with beta_e <= beta, gamma_e >= gamma, 1 < beta_e gamma_e <= beta gamma;
// lambda_v ~ U(0, lambda_bound).
TwoSpinSystem random_class_system(std::size_t n, const EdgeList& edges, const ParamClass& pc, RandomSource& rng);
std::pair<double, double> random_class_edge(const ParamClass& pc, RandomSource& rng);

// ---- statistics ----

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};
// Wilson score interval; z = 2.5758 gives 99% coverage.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 2.5758293035489004);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// ---- relations between exact quantities ----

// T_rel(Q) <= 2 / gap(Glauber) for the alternating-scan kernel Q.
ReportRow verify_relaxation_inequality(const TwoSpinSystem& system, const Bipartition& parts,
                                       const std::string& instance);
// Running ceil(T_rel(Q) log(4e^2 / (eps^2 mu(x)))) scans from x gives TV <= eps.
ReportRow verify_scan_mixing_bound(const TwoSpinSystem& system, const Bipartition& parts, std::uint64_t start,
                                   double eps, const std::string& instance);
// Upper, lower and boosting relations between the Glauber gap and t_mix.
std::vector<ReportRow> verify_gap_mixing_relations(const TwoSpinSystem& system, double eps,
                                                   const std::string& instance);

struct CouplingEstimate {
    std::vector<std::optional<std::size_t>> times; // nullopt = did not meet within the cap
    std::size_t t_hat = 0; // first t whose 99% upper bound on P[T > t] is below eps
    bool censored = false; // no such t up to the cap; t_hat is then cap + 1

    double failure_rate(std::size_t t) const;
};
CouplingEstimate coupling_mixing_estimate(const TwoSpinSystem& system, const UpdateSchedule& schedule, double eps,
                                          std::size_t trials, std::size_t cap, std::uint64_t seed);

struct FieldBoost {
    double gap_glauber = 0.0;
    double gap_field = 0.0;
    double gap_min = 0.0; // min Glauber gap of (theta*mu)^sigma over pinnings
    double lhs() const { return gap_glauber; }
    double rhs() const { return gap_field * gap_min; }
};
// Glauber under a pinning still picks from all n vertices.
double pinned_glauber_gap(const TwoSpinSystem& system, const Pinning& pinning);
FieldBoost field_boost_check(const TwoSpinSystem& system, double theta);

struct SweepRow {
    std::string family;
    std::size_t n = 0;
    double lambda = 0.0;
    double influence = 0.0; // max over v of the all-to-one influence
};
// Families: path, star, edgeless, complete-bipartite; uniform parameters.
std::vector<SweepRow> influence_regime_sweep(const std::vector<std::string>& families,
                                             const std::vector<std::size_t>& sizes, double beta, double gamma,
                                             double lambda);
EdgeList family_graph(const std::string& family, std::size_t n);

struct DecayProbe {
    std::vector<double> lengths;
    std::vector<double> discrepancy; // |R_0^{X_l=0} - R_0^{X_l=1}| on a path, R = p0/p1
    LinearFit fit;                   // log discrepancy against length
};
DecayProbe decay_probe(double beta, double gamma, double lambda, std::size_t min_len, std::size_t max_len);

// ---- suites ----

struct SuiteOptions {
    std::size_t max_n = 7;
    std::uint64_t seed = 1;
    std::size_t instances = 0; // 0 picks the suite default
    std::size_t trials = 0;    // 0 picks the suite default
    double eps = 0.0;          // 0 picks 1/(4e)
    bool quick = false;        // smaller sizes for smoke runs
    double lambda_frac = 0.0;  // potential suite: lambda_bound / lambda_c, 0 draws per regime
};

double default_eps();

Report check_saw_oracle(const SuiteOptions& opts);
Report check_pinning_conditionals(const SuiteOptions& opts);
Report check_stationarity(const SuiteOptions& opts);
Report check_relaxation(const SuiteOptions& opts);
Report check_coupling_monotonicity(const SuiteOptions& opts);
Report check_censoring_dominance(const SuiteOptions& opts);
Report check_potential(const SuiteOptions& opts);
Report check_regions(const SuiteOptions& opts);
Report check_universal_pinning(const SuiteOptions& opts);
Report check_influence(const SuiteOptions& opts);
Report check_coupling_mixing(const SuiteOptions& opts);
Report check_field_boost(const SuiteOptions& opts);

// Rooted unlabeled trees with exactly `nodes` nodes as parent arrays
// (parent[0] = npos, parent[i] < i).
std::vector<std::vector<std::size_t>> rooted_tree_shapes(std::size_t nodes);

std::vector<std::string> suite_names();
// saw-oracle, stationarity, coupling, relaxation, potential, region, field,
// influence.
Report run_suite(const std::string& name, const SuiteOptions& opts);

} // namespace ferrospin
