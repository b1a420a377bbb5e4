#pragma once

#include "ferrospin/model.hpp"
#include "ferrospin/random.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace ferrospin::testing {

// Plain-product enumerator kept separate from the library's log-space code.
struct RawSystem {
    std::size_t n = 0;
    std::vector<double> lambda;
    std::vector<EdgeParams> edges;

    TwoSpinSystem build() const { return TwoSpinSystem::from_values(n, lambda, edges); }

    double weight(std::uint64_t mask) const {
        double w = 1.0;
        for (std::size_t v = 0; v < n; ++v) {
            if (!((mask >> v) & 1U)) w *= lambda[v];
        }
        for (const auto& e : edges) {
            const bool su = (mask >> e.u) & 1U;
            const bool sv = (mask >> e.v) & 1U;
            if (!su && !sv) w *= e.beta;
            if (su && sv) w *= e.gamma;
        }
        return w;
    }

    std::vector<double> distribution() const {
        std::vector<double> p(std::size_t{1} << n);
        double z = 0.0;
        for (std::uint64_t m = 0; m < p.size(); ++m) z += p[m] = weight(m);
        for (auto& x : p) x /= z;
        return p;
    }

    // P(X_v = 1 | pinned vertices), pinned given as (mask of pinned, their spins).
    double conditional_one(std::size_t v, std::uint64_t pinned, std::uint64_t spins) const {
        double num = 0.0;
        double den = 0.0;
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
            if ((m & pinned) != (spins & pinned)) continue;
            const double w = weight(m);
            den += w;
            if ((m >> v) & 1U) num += w;
        }
        return num / den;
    }
};

inline RawSystem single_edge(double beta, double gamma, double lambda) {
    return {2, {lambda, lambda}, {{0, 1, beta, gamma}}};
}

inline RawSystem triangle(double beta, double gamma, double lambda) {
    return {3, {lambda, lambda, lambda}, {{0, 1, beta, gamma}, {1, 2, beta, gamma}, {0, 2, beta, gamma}}};
}

// Ferromagnetic parameters on the given edges: beta in [0.5, 1], gamma in
// (1/beta + 0.1, 5], lambda in (0, 3).
inline RawSystem random_raw(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                            RandomSource& rng) {
    RawSystem s;
    s.n = n;
    for (std::size_t v = 0; v < n; ++v) s.lambda.push_back(0.05 + 2.9 * rng.uniform());
    for (auto [u, v] : edges) {
        const double b = 0.5 + 0.5 * rng.uniform();
        const double lo = 1.0 / b + 0.1;
        s.edges.push_back({u, v, b, lo + (5.0 - lo) * rng.uniform()});
    }
    return s;
}

} // namespace ferrospin::testing
