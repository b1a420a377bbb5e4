#pragma once

#include "ferrospin/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ferrospin {

inline constexpr std::size_t kMaxTableVertices = 20;
inline constexpr std::size_t kMaxMatrixVertices = 12;

// Gibbs distribution indexed by bit mask (bit v = spin of v).
struct DistributionTable {
    std::size_t n = 0;
    std::vector<double> prob;
    double log_partition = 0.0;

    double marginal(std::size_t v, Spin s) const;
};

std::vector<double> log_weight_table(const TwoSpinSystem& system,
                                     std::size_t cap = kMaxTableVertices);
DistributionTable gibbs_distribution(const TwoSpinSystem& system,
                                     std::size_t cap = kMaxTableVertices);

// P(X_v = s | pinning) by direct summation over consistent configurations.
double conditional_marginal(const TwoSpinSystem& system, const Pinning& pinning, std::size_t v,
                            Spin s, std::size_t cap = kMaxTableVertices);

double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

// P[X_v = 1 | X_u = 1] - P[X_v = 1 | X_u = 0].
double influence_pair(const DistributionTable& table, std::size_t u, std::size_t v);
// sum_u |P[X_v = 0 | X_u = 0] - P[X_v = 0 | X_u = 1]| for every v.
std::vector<double> all_to_one_influences(const DistributionTable& table);
double all_to_one_influence(const DistributionTable& table, std::size_t v);

using Matrix = Eigen::MatrixXd;
using Block = std::vector<std::size_t>;

// Non-lazy single-site heat-bath Glauber dynamics.
Matrix glauber_matrix(const TwoSpinSystem& system);
// Resample the block from its conditional given the rest.
Matrix block_update_matrix(const TwoSpinSystem& system, const Block& block);
// Blocks applied in the given order: P_{blocks[0]} * P_{blocks[1]} * ...
Matrix scan_matrix(const TwoSpinSystem& system, const std::vector<Block>& blocks);
// Uniformly random block per step.
Matrix heat_bath_matrix(const TwoSpinSystem& system, const std::vector<Block>& blocks);
// Half-step t updates part (t mod 2) starting from t = 1, so one full scan
// updates part1 then part0.
Matrix alternating_scan_matrix(const TwoSpinSystem& system, const Bipartition& parts);
std::vector<Block> censor_blocks(const std::vector<Block>& blocks, const std::vector<std::size_t>& keep);
Matrix field_dynamics_matrix(const TwoSpinSystem& system, double theta);

// Q*(x, y) = mu(y) Q(y, x) / mu(x).
Matrix time_reversal(const Matrix& p, const std::vector<double>& mu);
// R(Q) = Q Q*.
Matrix multiplicative_reversiblization(const Matrix& p, const std::vector<double>& mu);

// || mu P - mu ||_1.
double stationarity_residual(const Matrix& p, const std::vector<double>& mu);
// max_{x,y} |mu(x) P(x,y) - mu(y) P(y,x)|.
double detailed_balance_residual(const Matrix& p, const std::vector<double>& mu);

enum class ChainKind { Reversible, Nonreversible };

struct SpectralReport {
    std::vector<double> eigenvalues; // descending, of P or of R(P)
    double lambda2 = 0.0;
    // 1 - lambda2 of P (reversible) or of R(P) (nonreversible).
    double spectral_gap = 0.0;
    // 1/gap, or 1/(1 - sqrt(1 - gap(R(P)))) for nonreversible chains.
    double relaxation_time = 0.0;
    double asymmetry = 0.0;
};

SpectralReport spectral_report(const Matrix& p, const std::vector<double>& mu, ChainKind kind);

std::vector<double> evolve(const std::vector<double>& dist, const Matrix& p, std::size_t steps);
// TV(P^t(x, .), mu) for the point mass at x.
double tv_from(const Matrix& p, const std::vector<double>& mu, std::uint64_t x, std::size_t steps);
// max_x TV(P^t(x, .), mu) for t = 0..max_t.
std::vector<double> worst_tv_profile(const Matrix& p, const std::vector<double>& mu, std::size_t max_t);

// Smallest t >= 0 with max_x TV(P^t(x, .), mu) < eps. Throws CapacityError
// when cap steps are not enough.
std::size_t exact_mixing_time(const Matrix& p, const std::vector<double>& mu, double eps,
                              std::size_t cap = 100000);
// Per start x: smallest t with TV(P^t(x, .), mu) < eps.
std::vector<std::size_t> per_start_mixing_times(const Matrix& p, const std::vector<double>& mu, double eps,
                                                std::size_t cap = 100000);

} // namespace ferrospin
