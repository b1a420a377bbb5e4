#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ferrospin {

using Spin = std::uint8_t;
using Configuration = std::vector<Spin>;

// Partial assignment of spins, keyed by vertex.
using Pinning = std::map<std::size_t, Spin>;

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

struct EdgeParams {
    std::size_t u = 0;
    std::size_t v = 0;
    double beta = 1.0;
    double gamma = 1.0;
};

// Edge stored with u < v and parameters in log space.
struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double log_beta = 0.0;
    double log_gamma = 0.0;

    double beta() const;
    double gamma() const;
    std::size_t other(std::size_t w) const { return w == u ? v : u; }
};

struct Incidence {
    std::size_t vertex;
    std::size_t edge;
};

class TwoSpinSystem {
public:
    TwoSpinSystem() = default;

    static TwoSpinSystem from_values(std::size_t n, const std::vector<double>& lambda,
                                     const std::vector<EdgeParams>& edges);
    static TwoSpinSystem from_logs(std::size_t n, std::vector<double> log_lambda,
                                   std::vector<Edge> edges);

    std::size_t size() const { return log_lambda_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t e) const { return edges_[e]; }
    const std::vector<Incidence>& neighbors(std::size_t v) const { return adjacency_[v]; }
    std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }
    std::size_t max_degree() const;

    double lambda(std::size_t v) const;
    double log_lambda(std::size_t v) const { return log_lambda_[v]; }
    const std::vector<double>& log_lambdas() const { return log_lambda_; }

    std::optional<std::size_t> find_edge(std::size_t u, std::size_t v) const;

    double log_weight(const Configuration& config) const;
    // Bit v of mask is the spin of vertex v. Requires size() <= 63.
    double log_weight_mask(std::uint64_t mask) const;
    double weight(const Configuration& config) const;

private:
    void build_adjacency();

    std::vector<double> log_lambda_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> adjacency_;
};

struct Bipartition {
    std::vector<std::size_t> part0;
    std::vector<std::size_t> part1;
};

// Returns a proper two-colouring if the graph is bipartite; part0 holds the
// vertices coloured like the smallest vertex of each component.
std::optional<Bipartition> two_coloring(const TwoSpinSystem& system);
bool is_independent_set(const TwoSpinSystem& system, const std::vector<std::size_t>& set);

// Bipartite RBM: vertices 0..n0-1 form V0, n0..n0+n1-1 form V1.
struct RbmParams {
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    std::vector<std::vector<double>> weights; // symmetric, (n0+n1) x (n0+n1)
    std::vector<double> theta;

    std::size_t size() const { return n0 + n1; }
    Bipartition bipartition() const;
    void validate() const;
};

TwoSpinSystem rbm_to_two_spin(const RbmParams& rbm);

// Each unordered pair counted once.
double energy(const RbmParams& rbm, const Configuration& config);

struct PinnedSystem {
    TwoSpinSystem system;
    std::vector<std::size_t> to_original;   // reduced index -> original vertex
    std::vector<std::size_t> from_original; // original vertex -> reduced index or npos
};

// Conditional system on the unpinned vertices.
PinnedSystem apply_pinning(const TwoSpinSystem& system, const Pinning& pinning);

struct ParamClass {
    double beta = 1.0;
    double gamma = 1.0;
    double lambda_bound = 1.0;

    void validate() const;
};

double lambda0(double beta, double gamma);
double lambda_c(double beta, double gamma);
inline double lambda0(const ParamClass& pc) { return lambda0(pc.beta, pc.gamma); }
inline double lambda_c(const ParamClass& pc) { return lambda_c(pc.beta, pc.gamma); }

// Empty string when the system is in the class, otherwise the first violation.
std::string class_violation(const TwoSpinSystem& system, const ParamClass& pc);
bool classify(const TwoSpinSystem& system, const ParamClass& pc);

// lambda'_v = lambda_v * theta_v.
TwoSpinSystem tilt(const TwoSpinSystem& system, const std::vector<double>& theta);
TwoSpinSystem tilt(const TwoSpinSystem& system, double theta);

std::size_t hamming_weight(const Configuration& config);
Configuration mask_to_config(std::uint64_t mask, std::size_t n);
std::uint64_t config_to_mask(const Configuration& config);

} // namespace ferrospin
