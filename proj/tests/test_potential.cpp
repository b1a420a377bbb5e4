#include "ferrospin/errors.hpp"
#include "ferrospin/harness.hpp"
#include "ferrospin/potential.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ferrospin;

namespace {

// Closed form of the integral: phi = 1/t below x1 and above x2, and
// 1/(y log(lambda/y)) in between, whose antiderivative is -log log(lambda/y).
double closed_big_phi(const PotentialParams& pp, double x) {
    if (pp.constant) return x / pp.t;
    const double ll = std::log(pp.lambda);
    auto anti = [&](double y) { return -std::log(ll - std::log(y)); };
    double total = std::min(x, pp.x1) / pp.t;
    if (x > pp.x1) total += anti(std::min(x, pp.x2)) - anti(pp.x1);
    if (x > pp.x2) total += (x - pp.x2) / pp.t;
    return total;
}

ParamClass regime(double beta, double gamma, double frac) {
    return {beta, gamma, frac * lambda_c(beta, gamma)};
}

} // namespace

TEST(Potential, RejectsFieldAtCriticalPoint) {
    EXPECT_THROW(derive_potential({1.0, 4.0, 16.0}), RegimeError);
    EXPECT_THROW(derive_potential({1.0, 1.0, 0.5}), InputError);
}

TEST(Potential, ConstantBranch) {
    const auto pp = derive_potential({1.0, 4.0, 1.0});
    ASSERT_TRUE(pp.constant);
    EXPECT_GE(pp.t, 1.0 / std::exp(1.0));
    EXPECT_DOUBLE_EQ(pp.c_min, 1.0 / pp.t);
    EXPECT_DOUBLE_EQ(pp.c_max, 1.0 / pp.t);
    for (double x : {0.0, 0.1, 0.5, 0.99}) {
        EXPECT_DOUBLE_EQ(phi(pp, x), 1.0 / pp.t);
        EXPECT_NEAR(big_phi(pp, x), x / pp.t, 1e-12);
    }
}

TEST(Potential, AlphaAndTValidAcrossRegimes) {
    RandomSource rng(71);
    for (int rep = 0; rep < 100; ++rep) {
        const auto pc = random_class(rng, 0.01 + 0.98 * rng.uniform());
        const auto pp = derive_potential(pc);
        EXPECT_GT(pp.alpha, 0.0);
        EXPECT_LT(pp.alpha, 1.0);
        EXPECT_GT(pp.t, 0.0);
        if (!pp.constant) {
            EXPECT_LT(pp.x1, pp.lambda / std::exp(1.0));
            EXPECT_GT(pp.x2, pp.lambda / std::exp(1.0));
        }
    }
}

TEST(Potential, EdgeFunctionBelowOneMinusAlpha) {
    for (const auto& pc : {regime(1.0, 4.0, 0.99), regime(0.6, 2.5, 0.5), regime(0.9, 1.5, 0.9)}) {
        const auto pp = derive_potential(pc);
        for (int k = 1; k < 10000; ++k) {
            const double x = pp.lambda * k / 10000.0;
            ASSERT_LE(g_edge(pp.lambda, pc.beta, pc.gamma, x), 1.0 - pp.alpha + 1e-12) << x;
        }
    }
}

TEST(Potential, PhiWithinBounds) {
    const auto pp = derive_potential(regime(0.7, 3.0, 0.95));
    EXPECT_DOUBLE_EQ(big_phi(pp, 0.0), 0.0);
    for (int k = 0; k < 10000; ++k) {
        const double x = pp.lambda * k / 10000.0;
        EXPECT_GE(phi(pp, x), pp.c_min - 1e-15);
        EXPECT_LE(phi(pp, x), pp.c_max + 1e-15);
    }
    EXPECT_THROW(phi(pp, pp.lambda), InputError);
}

TEST(Potential, IntegralMatchesClosedForm) {
    for (const auto& pc : {regime(1.0, 4.0, 0.99), regime(0.5646, 1.8924, 0.775), regime(0.8, 2.0, 0.3),
                           regime(0.95, 5.0, 0.9)}) {
        const auto pp = derive_potential(pc);
        for (double f : {1e-6, 0.01, 0.2, 0.37, 0.5, 0.8, 0.999}) {
            const double x = f * pp.lambda;
            const double want = closed_big_phi(pp, x);
            EXPECT_NEAR(big_phi(pp, x), want, 1e-9 * std::max(1.0, want)) << pc.beta << " " << pc.gamma << " " << f;
        }
    }
}

TEST(Potential, HugeFieldRegimeStaysFinite) {
    const auto pp = derive_potential(regime(0.5646, 1.8924, 0.775));
    EXPECT_GT(pp.lambda, 1e15);
    EXPECT_GT(pp.x0, 0.0);
    EXPECT_LT(pp.x0, 1.0);
    EXPECT_LT(pp.x1, pp.x2);
    EXPECT_TRUE(std::isfinite(big_phi(pp, 0.5 * pp.lambda)));
}

TEST(DecayFactor, EmptyAndSmallField) {
    const auto pp = derive_potential(regime(0.8, 3.0, 0.9));
    EXPECT_DOUBLE_EQ(decay_factor(pp, 1.0, {}, {}, {}), 0.0);
    const std::vector<double> x{0.3 * pp.lambda}, b{0.8}, g{3.0};
    const double c1 = decay_factor(pp, 1e-6, x, b, g);
    const double c2 = decay_factor(pp, 2e-6, x, b, g);
    EXPECT_NEAR(c2 / c1, 2.0, 1e-3);
}

TEST(DecayFactor, BelowOneMinusAlphaOnGrid) {
    RandomSource rng(72);
    for (int rep = 0; rep < 10; ++rep) {
        const auto pc = random_class(rng, 0.2 + 0.79 * rng.uniform());
        const auto pp = derive_potential(pc);
        for (std::size_t d = 1; d <= 6; ++d) {
            std::vector<double> x(d), b(d, pc.beta), g(d, pc.gamma);
            for (int k = 0; k < 2000; ++k) {
                for (auto& xi : x) xi = pp.lambda * (0.5 + rng.below(1000)) / 1000.0;
                const double lu = pp.lambda * (0.5 + rng.below(1000)) / 1000.0;
                ASSERT_LE(decay_factor(pp, lu, x, b, g), 1.0 - pp.alpha + 1e-9);
            }
        }
    }
}

TEST(DecayFactor, PartialsMatchFiniteDifferences) {
    const std::vector<double> x{0.4, 1.3, 0.7}, b{0.9, 0.8, 1.0}, g{2.0, 3.0, 2.5};
    for (std::size_t i = 0; i < 3; ++i) {
        auto xp = x, xm = x;
        xp[i] += 1e-6;
        xm[i] -= 1e-6;
        const double fd = (recursion_value(1.5, xp, b, g) - recursion_value(1.5, xm, b, g)) / 2e-6;
        EXPECT_NEAR(recursion_partial(1.5, x, b, g, i), std::abs(fd), 1e-7);
    }
}

TEST(TrivialBound, Examples) {
    const auto pp = derive_potential(regime(0.8, 3.0, 0.9));
    EXPECT_NEAR(trivial_term_bound(pp, 0.7, 1), trivial_constant(pp) * 0.7, 1e-15);
    const double q = (pp.beta * pp.lambda + 1.0) / (pp.lambda + pp.gamma);
    ASSERT_LT(q, 1.0);
    for (std::size_t d = 1; d < 8; ++d) {
        EXPECT_NEAR(trivial_term_bound(pp, 0.7, d + 1) / trivial_term_bound(pp, 0.7, d), q, 1e-14);
    }
}

TEST(TrivialBound, DominatesSingleTerms) {
    RandomSource rng(73);
    const auto pp = derive_potential(regime(0.8, 3.0, 0.9));
    for (int rep = 0; rep < 5000; ++rep) {
        const std::size_t d = 1 + rng.below(6);
        std::vector<double> x(d), b(d, pp.beta), g(d, pp.gamma);
        for (auto& xi : x) xi = pp.lambda * (1.0 - rng.uniform());
        const double lu = pp.lambda * (1.0 - rng.uniform());
        const std::size_t i = rng.below(d);
        EXPECT_LE(decay_term(pp, lu, x, b, g, i), trivial_term_bound(pp, lu, d) + 1e-12);
    }
}
