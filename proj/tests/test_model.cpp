#include "ferrospin/errors.hpp"
#include "ferrospin/exact.hpp"
#include "ferrospin/harness.hpp"
#include "ferrospin/io.hpp"
#include "ferrospin/model.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ferrospin;
using ferrospin::testing::RawSystem;

namespace {

RbmParams pair_rbm(double w, double theta0, double theta1) {
    RbmParams r;
    r.n0 = 1;
    r.n1 = 1;
    r.weights = {{0.0, w}, {w, 0.0}};
    r.theta = {theta0, theta1};
    return r;
}

} // namespace

TEST(RbmMapping, SinglePairGivesUnitBetaAndExpGamma) {
    const auto s = rbm_to_two_spin(pair_rbm(0.7, 0.0, 0.0));
    ASSERT_EQ(s.edges().size(), 1u);
    EXPECT_DOUBLE_EQ(s.edge(0).beta(), 1.0);
    EXPECT_NEAR(s.edge(0).gamma(), std::exp(0.7), 1e-15);
    EXPECT_DOUBLE_EQ(s.lambda(0), 1.0);
    EXPECT_DOUBLE_EQ(s.lambda(1), 1.0);
}

TEST(RbmMapping, ZeroWeightsGiveEdgelessUnitFields) {
    RbmParams r;
    r.n0 = 2;
    r.n1 = 3;
    r.weights.assign(5, std::vector<double>(5, 0.0));
    r.theta.assign(5, 0.0);
    const auto s = rbm_to_two_spin(r);
    EXPECT_TRUE(s.edges().empty());
    for (std::size_t v = 0; v < 5; ++v) EXPECT_DOUBLE_EQ(s.lambda(v), 1.0);
}

TEST(RbmMapping, ThetaLog2HalvesField) {
    const auto s = rbm_to_two_spin(pair_rbm(0.0, std::log(2.0), 0.0));
    EXPECT_NEAR(s.lambda(0), 0.5, 1e-15);
}

TEST(RbmMapping, RejectsWeightInsideOneSide) {
    RbmParams r;
    r.n0 = 2;
    r.n1 = 0;
    r.weights = {{0.0, 1.0}, {1.0, 0.0}};
    r.theta = {0.0, 0.0};
    EXPECT_THROW(r.validate(), InputError);
}

TEST(RbmMapping, GibbsLawMatchesExpEnergy) {
    RbmParams r;
    r.n0 = 2;
    r.n1 = 2;
    r.weights.assign(4, std::vector<double>(4, 0.0));
    const double w[2][2] = {{0.4, 1.1}, {0.3, 0.9}};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) r.weights[i][2 + j] = r.weights[2 + j][i] = w[i][j];
    }
    r.theta = {-0.2, 0.5, 0.1, -0.7};
    const auto table = gibbs_distribution(rbm_to_two_spin(r));
    std::vector<double> boltz(16);
    double z = 0.0;
    for (std::uint64_t m = 0; m < 16; ++m) z += boltz[m] = std::exp(energy(r, mask_to_config(m, 4)));
    for (std::uint64_t m = 0; m < 16; ++m) EXPECT_NEAR(table.prob[m], boltz[m] / z, 1e-14);
}

TEST(Energy, Examples) {
    EXPECT_DOUBLE_EQ(energy(pair_rbm(1.5, 0.0, 0.0), {0, 0}), 0.0);
    RbmParams single;
    single.n0 = 1;
    single.weights = {{0.0}};
    single.theta = {0.3};
    EXPECT_DOUBLE_EQ(energy(single, {1}), 0.3);
    EXPECT_DOUBLE_EQ(energy(pair_rbm(1.5, 0.0, 0.0), {1, 1}), 1.5);
}

TEST(Weight, Examples) {
    const auto single = TwoSpinSystem::from_values(1, {0.5}, {});
    EXPECT_DOUBLE_EQ(single.weight({0}), 0.5);
    EXPECT_DOUBLE_EQ(single.weight({1}), 1.0);

    const auto edge = ferrospin::testing::single_edge(1.0, 2.0, 1.0).build();
    EXPECT_NEAR(edge.weight({0, 0}), 1.0, 1e-15);
    EXPECT_NEAR(edge.weight({0, 1}), 1.0, 1e-15);
    EXPECT_NEAR(edge.weight({1, 0}), 1.0, 1e-15);
    EXPECT_NEAR(edge.weight({1, 1}), 2.0, 1e-15);

    const auto tri = ferrospin::testing::triangle(1.0, 2.0, 1.0).build();
    EXPECT_NEAR(tri.weight({1, 1, 1}), 8.0, 1e-14);
}

TEST(Weight, LogWeightMatchesPlainProduct) {
    RandomSource rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const auto raw = ferrospin::testing::random_raw(6, random_connected_graph(6, 0.4, rng), rng);
        const auto sys = raw.build();
        for (std::uint64_t m = 0; m < 64; ++m) {
            EXPECT_NEAR(std::exp(sys.log_weight_mask(m)), raw.weight(m), 1e-12 * raw.weight(m));
        }
    }
}

TEST(Construction, RejectsBadInput) {
    EXPECT_THROW(TwoSpinSystem::from_values(2, {1.0}, {}), InputError);
    EXPECT_THROW(TwoSpinSystem::from_values(1, {0.0}, {}), InputError);
    EXPECT_THROW(TwoSpinSystem::from_values(2, {1.0, 1.0}, {{0, 0, 1.0, 2.0}}), InputError);
    EXPECT_THROW(TwoSpinSystem::from_values(2, {1.0, 1.0}, {{0, 1, 1.0, 2.0}, {1, 0, 1.0, 2.0}}), InputError);
    EXPECT_THROW(TwoSpinSystem::from_values(2, {1.0, 1.0}, {{0, 2, 1.0, 2.0}}), InputError);
}

TEST(Pinning, EdgeExamples) {
    const auto edge = ferrospin::testing::single_edge(1.0, 2.0, 1.0).build();
    const auto one = apply_pinning(edge, {{1, 1}});
    ASSERT_EQ(one.system.size(), 1u);
    EXPECT_NEAR(one.system.lambda(0), 0.5, 1e-15);
    EXPECT_EQ(one.to_original[0], 0u);
    EXPECT_EQ(one.from_original[1], npos);
    const auto zero = apply_pinning(edge, {{1, 0}});
    EXPECT_NEAR(zero.system.lambda(0), 1.0, 1e-15);
}

TEST(Pinning, TriangleHalvesRemainingFields) {
    const auto raw = ferrospin::testing::triangle(1.0, 2.0, 1.0);
    const auto pinned = apply_pinning(raw.build(), {{0, 1}});
    ASSERT_EQ(pinned.system.size(), 2u);
    EXPECT_EQ(pinned.system.edges().size(), 1u);
    EXPECT_NEAR(pinned.system.lambda(0), 0.5, 1e-15);
    EXPECT_NEAR(pinned.system.lambda(1), 0.5, 1e-15);
    const auto table = gibbs_distribution(pinned.system);
    for (std::size_t r = 0; r < 2; ++r) {
        EXPECT_NEAR(table.marginal(r, 1), raw.conditional_one(pinned.to_original[r], 1, 1), 1e-14);
    }
}

TEST(Pinning, ConditionalTablesMatchBruteForce) {
    RandomSource rng(5);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 2 + rng.below(6);
        const auto raw = ferrospin::testing::random_raw(n, random_graph(n, 0.5, rng), rng);
        std::uint64_t pinned = 0;
        std::uint64_t spins = 0;
        Pinning pin;
        for (std::size_t v = 0; v + 1 < n; ++v) {
            if (rng.bernoulli(0.4)) {
                const Spin s = rng.bernoulli(0.5) ? 1 : 0;
                pin[v] = s;
                pinned |= std::uint64_t{1} << v;
                if (s) spins |= std::uint64_t{1} << v;
            }
        }
        const auto ps = apply_pinning(raw.build(), pin);
        const auto table = gibbs_distribution(ps.system);
        for (std::size_t r = 0; r < ps.system.size(); ++r) {
            const double want = raw.conditional_one(ps.to_original[r], pinned, spins);
            EXPECT_NEAR(table.marginal(r, 1), want, 1e-12 * want);
        }
    }
}

TEST(Thresholds, Examples) {
    EXPECT_DOUBLE_EQ(lambda0(1.0, 4.0), 2.0);
    EXPECT_NEAR(lambda_c(1.0, 4.0), 16.0, 1e-12);
    EXPECT_THROW(lambda_c(1.0, 1.0), RegimeError);
}

TEST(Thresholds, CriticalFieldExceedsLambda0) {
    RandomSource rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double b = 0.05 + 0.95 * rng.uniform();
        const double g = (1.0 / b) * (1.0 + 1e-3 + 5.0 * rng.uniform());
        EXPECT_GE(lambda_c(b, g), lambda0(b, g) * (1.0 - 1e-12)) << b << " " << g;
    }
}

TEST(Classify, Examples) {
    const ParamClass pc{0.8, 3.0, 2.0};
    const auto ok = TwoSpinSystem::from_values(3, {1.0, 1.0, 1.0}, {{0, 1, 0.8, 3.0}, {1, 2, 0.8, 3.0}});
    EXPECT_TRUE(classify(ok, pc));
    const auto flat = TwoSpinSystem::from_values(2, {1.0, 1.0}, {{0, 1, 0.5, 2.0}});
    EXPECT_FALSE(classify(flat, pc));
    const auto strong = TwoSpinSystem::from_values(2, {1.0, 1.0}, {{0, 1, 0.8, 3.5}});
    EXPECT_FALSE(classify(strong, pc));
    EXPECT_FALSE(class_violation(strong, pc).empty());
    const auto hot = TwoSpinSystem::from_values(1, {2.5}, {});
    EXPECT_FALSE(classify(hot, pc));
}

TEST(Tilt, Examples) {
    const auto raw = ferrospin::testing::triangle(0.9, 2.0, 1.3);
    const auto s = raw.build();
    const auto same = tilt(s, 1.0);
    for (std::size_t v = 0; v < 3; ++v) EXPECT_DOUBLE_EQ(same.lambda(v), s.lambda(v));
    EXPECT_NEAR(tilt(TwoSpinSystem::from_values(1, {2.0}, {}), 0.25).lambda(0), 0.5, 1e-15);
}

TEST(Tilt, TableIsReweightedBruteForce) {
    RandomSource rng(8);
    const auto raw = ferrospin::testing::random_raw(4, cycle_graph(4), rng);
    const std::vector<double> theta{0.3, 1.7, 0.9, 0.5};
    const auto table = gibbs_distribution(tilt(raw.build(), theta));
    std::vector<double> want(16);
    double z = 0.0;
    for (std::uint64_t m = 0; m < 16; ++m) {
        double w = raw.weight(m);
        for (std::size_t v = 0; v < 4; ++v) {
            if (!((m >> v) & 1U)) w *= theta[v];
        }
        z += want[m] = w;
    }
    for (std::uint64_t m = 0; m < 16; ++m) EXPECT_NEAR(table.prob[m], want[m] / z, 1e-14);
}

TEST(TwoColoring, BipartiteAndNot) {
    const auto path = uniform_system(4, path_graph(4), 1.0, 2.0, 1.0);
    const auto parts = two_coloring(path);
    ASSERT_TRUE(parts.has_value());
    EXPECT_TRUE(is_independent_set(path, parts->part0));
    EXPECT_TRUE(is_independent_set(path, parts->part1));
    EXPECT_EQ(parts->part0.size() + parts->part1.size(), 4u);
    EXPECT_FALSE(two_coloring(ferrospin::testing::triangle(1.0, 2.0, 1.0).build()).has_value());
}

TEST(InstanceIo, RoundTripAndStableHash) {
    RandomSource rng(2);
    const auto s = ferrospin::testing::random_raw(5, random_connected_graph(5, 0.5, rng), rng).build();
    const auto back = parse_instance(instance_to_json(s));
    EXPECT_EQ(instance_hash(s), instance_hash(back));
    EXPECT_EQ(instance_hash(s), instance_hash(s));
    EXPECT_EQ(instance_hash(s).size(), 16u);
    for (std::uint64_t m = 0; m < 32; ++m) EXPECT_NEAR(s.log_weight_mask(m), back.log_weight_mask(m), 1e-12);
}

TEST(InstanceIo, RejectsNonFerromagneticEdge) {
    const std::string text = R"({"n": 2, "lambda": [1, 1], "edges": [{"u": 0, "v": 1, "beta": 0.5, "gamma": 2}]})";
    EXPECT_THROW(parse_instance(text), InputError);
    EXPECT_THROW(parse_instance("{not json"), InputError);
    EXPECT_THROW(load_instance("/nonexistent/instance.json"), InputError);
}

TEST(InstanceIo, RbmCrossBlock) {
    const auto r = parse_rbm(R"({"n0": 1, "n1": 2, "W": [[0.5, 1.0]], "theta": [0, 0, 0]})");
    EXPECT_EQ(r.size(), 3u);
    EXPECT_DOUBLE_EQ(r.weights[0][2], 1.0);
    EXPECT_DOUBLE_EQ(r.weights[2][0], 1.0);
    EXPECT_DOUBLE_EQ(r.weights[1][2], 0.0);
}
