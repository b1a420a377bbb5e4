#include "ferrospin/exact.hpp"

#include "ferrospin/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>

namespace ferrospin {

namespace {

void check_table_size(std::size_t n, std::size_t cap) {
    if (n > cap) {
        throw CapacityError("exact enumeration needs n <= " + std::to_string(cap) + ", got " +
                            std::to_string(n));
    }
}

void check_matrix_size(const TwoSpinSystem& system) {
    if (system.size() > kMaxMatrixVertices) {
        throw CapacityError("transition matrices need n <= " + std::to_string(kMaxMatrixVertices) +
                            ", got " + std::to_string(system.size()));
    }
    if (system.size() == 0) throw InputError("transition matrices need at least one vertex");
}

std::uint64_t block_mask(const Block& block, std::size_t n) {
    std::uint64_t m = 0;
    for (auto v : block) {
        if (v >= n) throw InputError("block vertex " + std::to_string(v) + " out of range");
        m |= std::uint64_t{1} << v;
    }
    return m;
}

double log_sum_exp(const std::vector<double>& xs) {
    if (xs.empty()) return -INFINITY;
    const double m = *std::max_element(xs.begin(), xs.end());
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

// Adds scale * (conditional law of the masked bits given the rest of x) into row.
void add_block_law(Matrix& p, std::uint64_t row, std::uint64_t x, std::uint64_t mask,
                   const std::vector<double>& logw, double scale) {
    const std::uint64_t outside = x & ~mask;
    std::vector<std::uint64_t> targets;
    std::vector<double> lw;
    std::uint64_t sub = 0;
    do {
        targets.push_back(outside | sub);
        lw.push_back(logw[outside | sub]);
        sub = (sub - mask) & mask;
    } while (sub != 0);
    const double z = log_sum_exp(lw);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        p(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(targets[i])) +=
            scale * std::exp(lw[i] - z);
    }
}

Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

void check_dims(const Matrix& p, const std::vector<double>& mu) {
    if (p.rows() != p.cols() || p.rows() != static_cast<Eigen::Index>(mu.size())) {
        throw InputError("matrix and distribution sizes disagree");
    }
}

// Propagates a set of row distributions by P, using a sparse copy when P is sparse.
class Propagator {
public:
    explicit Propagator(const Matrix& p) : dense_(p) {
        const auto nnz = (p.array() != 0.0).count();
        sparse_ok_ = static_cast<double>(nnz) < 0.25 * static_cast<double>(p.size());
        if (sparse_ok_) sparse_ = p.sparseView();
    }

    void step(Matrix& rows) const {
        if (sparse_ok_) {
            rows = (rows * sparse_).eval();
        } else {
            rows = (rows * dense_).eval();
        }
    }

private:
    const Matrix& dense_;
    Eigen::SparseMatrix<double, Eigen::ColMajor> sparse_;
    bool sparse_ok_ = false;
};

double worst_row_tv(const Matrix& rows, const std::vector<double>& mu) {
    const auto m = as_vector(mu).transpose();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        worst = std::max(worst, 0.5 * (rows.row(i) - m).cwiseAbs().sum());
    }
    return worst;
}

} // namespace

double DistributionTable::marginal(std::size_t v, Spin s) const {
    if (v >= n) throw InputError("vertex out of range");
    double p1 = 0.0;
    for (std::uint64_t x = 0; x < prob.size(); ++x) {
        if ((x >> v) & 1U) p1 += prob[x];
    }
    return s == 1 ? p1 : 1.0 - p1;
}

std::vector<double> log_weight_table(const TwoSpinSystem& system, std::size_t cap) {
    check_table_size(system.size(), std::min(cap, kMaxTableVertices));
    const std::uint64_t count = std::uint64_t{1} << system.size();
    std::vector<double> logw(count);
    for (std::uint64_t x = 0; x < count; ++x) logw[x] = system.log_weight_mask(x);
    return logw;
}

DistributionTable gibbs_distribution(const TwoSpinSystem& system, std::size_t cap) {
    DistributionTable t;
    t.n = system.size();
    t.prob = log_weight_table(system, cap);
    t.log_partition = log_sum_exp(t.prob);
    for (auto& x : t.prob) x = std::exp(x - t.log_partition);
    return t;
}

double conditional_marginal(const TwoSpinSystem& system, const Pinning& pinning, std::size_t v,
                            Spin s, std::size_t cap) {
    check_table_size(system.size(), std::min(cap, kMaxTableVertices));
    if (v >= system.size()) throw InputError("vertex out of range");
    std::uint64_t fixed_mask = 0;
    std::uint64_t fixed_bits = 0;
    for (const auto& [u, spin] : pinning) {
        if (u >= system.size()) throw InputError("pinned vertex out of range");
        fixed_mask |= std::uint64_t{1} << u;
        if (spin) fixed_bits |= std::uint64_t{1} << u;
    }
    std::vector<double> all;
    std::vector<double> hit;
    const std::uint64_t count = std::uint64_t{1} << system.size();
    for (std::uint64_t x = 0; x < count; ++x) {
        if ((x & fixed_mask) != fixed_bits) continue;
        const double lw = system.log_weight_mask(x);
        all.push_back(lw);
        if (((x >> v) & 1U) == s) hit.push_back(lw);
    }
    if (hit.empty()) return 0.0;
    return std::exp(log_sum_exp(hit) - log_sum_exp(all));
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InputError("distributions have different supports");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

double influence_pair(const DistributionTable& table, std::size_t u, std::size_t v) {
    if (u >= table.n || v >= table.n) throw InputError("vertex out of range");
    double pu1 = 0.0;
    double pu1v1 = 0.0;
    double pu0v1 = 0.0;
    for (std::uint64_t x = 0; x < table.prob.size(); ++x) {
        const bool xu = (x >> u) & 1U;
        const bool xv = (x >> v) & 1U;
        if (xu) pu1 += table.prob[x];
        if (xu && xv) pu1v1 += table.prob[x];
        if (!xu && xv) pu0v1 += table.prob[x];
    }
    return pu1v1 / pu1 - pu0v1 / (1.0 - pu1);
}

std::vector<double> all_to_one_influences(const DistributionTable& table) {
    const std::size_t n = table.n;
    // joint[u][v] = P(X_u = 1, X_v = 1); diagonal holds P(X_u = 1).
    std::vector<double> joint(n * n, 0.0);
    for (std::uint64_t x = 0; x < table.prob.size(); ++x) {
        const double p = table.prob[x];
        for (std::size_t u = 0; u < n; ++u) {
            if (!((x >> u) & 1U)) continue;
            for (std::size_t v = 0; v < n; ++v) {
                if ((x >> v) & 1U) joint[u * n + v] += p;
            }
        }
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t u = 0; u < n; ++u) {
            if (u == v) continue;
            const double pu1 = joint[u * n + u];
            const double pv1 = joint[v * n + v];
            const double p11 = joint[u * n + v];
            const double p01 = pv1 - p11; // X_u = 0, X_v = 1
            const double v0_given_u1 = 1.0 - p11 / pu1;
            const double v0_given_u0 = 1.0 - p01 / (1.0 - pu1);
            out[v] += std::abs(v0_given_u0 - v0_given_u1);
        }
    }
    return out;
}

double all_to_one_influence(const DistributionTable& table, std::size_t v) {
    if (v >= table.n) throw InputError("vertex out of range");
    return all_to_one_influences(table)[v];
}

Matrix glauber_matrix(const TwoSpinSystem& system) {
    check_matrix_size(system);
    const std::size_t n = system.size();
    const auto logw = log_weight_table(system);
    const auto count = static_cast<Eigen::Index>(logw.size());
    Matrix p = Matrix::Zero(count, count);
    for (Eigen::Index x = 0; x < count; ++x) {
        double stay = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            const auto y = static_cast<Eigen::Index>(static_cast<std::uint64_t>(x) ^ (std::uint64_t{1} << v));
            // Probability the heat-bath update lands on y's value at v.
            const double move = 1.0 / (1.0 + std::exp(logw[x] - logw[y]));
            p(x, y) = move / static_cast<double>(n);
            stay += (1.0 - move) / static_cast<double>(n);
        }
        p(x, x) = stay;
    }
    return p;
}

Matrix block_update_matrix(const TwoSpinSystem& system, const Block& block) {
    check_matrix_size(system);
    const auto logw = log_weight_table(system);
    const std::uint64_t mask = block_mask(block, system.size());
    const auto count = static_cast<Eigen::Index>(logw.size());
    Matrix p = Matrix::Zero(count, count);
    for (Eigen::Index x = 0; x < count; ++x) {
        add_block_law(p, static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(x), mask, logw, 1.0);
    }
    return p;
}

Matrix scan_matrix(const TwoSpinSystem& system, const std::vector<Block>& blocks) {
    check_matrix_size(system);
    const auto count = static_cast<Eigen::Index>(std::uint64_t{1} << system.size());
    Matrix p = Matrix::Identity(count, count);
    for (const auto& b : blocks) {
        const Eigen::SparseMatrix<double> step = block_update_matrix(system, b).sparseView();
        p = (p * step).eval();
    }
    return p;
}

Matrix heat_bath_matrix(const TwoSpinSystem& system, const std::vector<Block>& blocks) {
    check_matrix_size(system);
    if (blocks.empty()) throw InputError("heat-bath dynamics needs at least one block");
    const auto count = static_cast<Eigen::Index>(std::uint64_t{1} << system.size());
    Matrix p = Matrix::Zero(count, count);
    for (const auto& b : blocks) p += block_update_matrix(system, b);
    return p / static_cast<double>(blocks.size());
}

Matrix alternating_scan_matrix(const TwoSpinSystem& system, const Bipartition& parts) {
    if (!is_independent_set(system, parts.part0) || !is_independent_set(system, parts.part1)) {
        throw InputError("parts not independent sets");
    }
    return scan_matrix(system, {parts.part1, parts.part0});
}

std::vector<Block> censor_blocks(const std::vector<Block>& blocks, const std::vector<std::size_t>& keep) {
    std::vector<Block> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) {
        Block c;
        for (auto v : b) {
            if (std::find(keep.begin(), keep.end(), v) != keep.end()) c.push_back(v);
        }
        out.push_back(std::move(c));
    }
    return out;
}

Matrix field_dynamics_matrix(const TwoSpinSystem& system, double theta) {
    check_matrix_size(system);
    if (!(theta > 0.0 && theta <= 1.0)) throw InputError("field dynamics needs theta in (0, 1]");
    const std::size_t n = system.size();
    const auto logw = log_weight_table(tilt(system, theta));
    const auto count = static_cast<Eigen::Index>(logw.size());
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    Matrix p = Matrix::Zero(count, count);
    for (Eigen::Index xi = 0; xi < count; ++xi) {
        const auto x = static_cast<std::uint64_t>(xi);
        const std::uint64_t zeros = full & ~x;
        const int nz = std::popcount(zeros);
        std::uint64_t a = 0;
        do {
            const int k = std::popcount(a);
            const double pa = std::pow(theta, k) * std::pow(1.0 - theta, nz - k);
            if (pa > 0.0) add_block_law(p, x, x, x | a, logw, pa);
            a = (a - zeros) & zeros;
        } while (a != 0);
    }
    return p;
}

Matrix time_reversal(const Matrix& p, const std::vector<double>& mu) {
    check_dims(p, mu);
    const auto n = p.rows();
    Matrix r(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = 0; y < n; ++y) r(x, y) = mu[y] * p(y, x) / mu[x];
    }
    return r;
}

Matrix multiplicative_reversiblization(const Matrix& p, const std::vector<double>& mu) {
    return p * time_reversal(p, mu);
}

double stationarity_residual(const Matrix& p, const std::vector<double>& mu) {
    check_dims(p, mu);
    const Eigen::RowVectorXd m = as_vector(mu).transpose();
    return (m * p - m).cwiseAbs().sum();
}

double detailed_balance_residual(const Matrix& p, const std::vector<double>& mu) {
    check_dims(p, mu);
    double worst = 0.0;
    for (Eigen::Index x = 0; x < p.rows(); ++x) {
        for (Eigen::Index y = x + 1; y < p.cols(); ++y) {
            worst = std::max(worst, std::abs(mu[x] * p(x, y) - mu[y] * p(y, x)));
        }
    }
    return worst;
}

SpectralReport spectral_report(const Matrix& p, const std::vector<double>& mu, ChainKind kind) {
    check_dims(p, mu);
    const Matrix target = kind == ChainKind::Reversible ? p : multiplicative_reversiblization(p, mu);
    const auto n = target.rows();
    Eigen::VectorXd root = as_vector(mu).cwiseSqrt();
    Matrix a = root.asDiagonal() * target * root.cwiseInverse().asDiagonal();
    SpectralReport rep;
    rep.asymmetry = (a - a.transpose()).cwiseAbs().maxCoeff();
    Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
    const Eigen::VectorXd ev = solver.eigenvalues();
    rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), std::greater<>());
    rep.lambda2 = n > 1 ? rep.eigenvalues[1] : 0.0;
    rep.spectral_gap = 1.0 - rep.lambda2;
    if (kind == ChainKind::Reversible) {
        rep.relaxation_time = 1.0 / rep.spectral_gap;
    } else {
        const double contraction = std::sqrt(std::max(0.0, 1.0 - rep.spectral_gap));
        rep.relaxation_time = 1.0 / (1.0 - contraction);
    }
    return rep;
}

std::vector<double> evolve(const std::vector<double>& dist, const Matrix& p, std::size_t steps) {
    if (p.rows() != static_cast<Eigen::Index>(dist.size())) throw InputError("size mismatch in evolve");
    Matrix row = as_vector(dist).transpose();
    Propagator prop(p);
    for (std::size_t t = 0; t < steps; ++t) prop.step(row);
    return {row.data(), row.data() + row.size()};
}

double tv_from(const Matrix& p, const std::vector<double>& mu, std::uint64_t x, std::size_t steps) {
    check_dims(p, mu);
    std::vector<double> start(mu.size(), 0.0);
    start.at(x) = 1.0;
    return tv_distance(evolve(start, p, steps), mu);
}

std::vector<double> worst_tv_profile(const Matrix& p, const std::vector<double>& mu, std::size_t max_t) {
    check_dims(p, mu);
    Matrix rows = Matrix::Identity(p.rows(), p.cols());
    Propagator prop(p);
    std::vector<double> out;
    out.push_back(worst_row_tv(rows, mu));
    for (std::size_t t = 1; t <= max_t; ++t) {
        prop.step(rows);
        out.push_back(worst_row_tv(rows, mu));
    }
    return out;
}

std::size_t exact_mixing_time(const Matrix& p, const std::vector<double>& mu, double eps, std::size_t cap) {
    check_dims(p, mu);
    if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0, 1)");
    Matrix rows = Matrix::Identity(p.rows(), p.cols());
    Propagator prop(p);
    for (std::size_t t = 0; t <= cap; ++t) {
        if (worst_row_tv(rows, mu) < eps) return t;
        prop.step(rows);
    }
    throw CapacityError("mixing time exceeds the step cap of " + std::to_string(cap));
}

std::vector<std::size_t> per_start_mixing_times(const Matrix& p, const std::vector<double>& mu, double eps,
                                                std::size_t cap) {
    check_dims(p, mu);
    if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0, 1)");
    const auto m = as_vector(mu).transpose();
    Matrix rows = Matrix::Identity(p.rows(), p.cols());
    Propagator prop(p);
    std::vector<std::size_t> out(mu.size(), npos);
    std::size_t remaining = mu.size();
    for (std::size_t t = 0; t <= cap; ++t) {
        for (Eigen::Index i = 0; i < rows.rows(); ++i) {
            if (out[i] != npos) continue;
            if (0.5 * (rows.row(i) - m).cwiseAbs().sum() < eps) {
                out[i] = t;
                --remaining;
            }
        }
        if (remaining == 0) return out;
        prop.step(rows);
    }
    throw CapacityError("mixing time exceeds the step cap of " + std::to_string(cap));
}

} // namespace ferrospin
