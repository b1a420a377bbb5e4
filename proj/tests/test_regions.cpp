#include "ferrospin/errors.hpp"
#include "ferrospin/exact.hpp"
#include "ferrospin/harness.hpp"
#include "ferrospin/regions.hpp"
#include "ferrospin/sawtree.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

using namespace ferrospin;

namespace {

Region manual_region(std::size_t center, std::vector<std::size_t> members, std::vector<std::size_t> boundary,
                     std::size_t d1, std::size_t d2) {
    Region r;
    r.center = center;
    r.members = std::move(members);
    r.boundary = std::move(boundary);
    r.d1 = d1;
    r.d2 = d2;
    return r;
}

// P(X_center = 1 | boundary = mask) on the subgraph induced by members and
// boundary, by direct summation.
double induced_center_marginal(const TwoSpinSystem& s, const Region& r, std::uint64_t mask) {
    std::vector<std::size_t> verts = r.members;
    verts.insert(verts.end(), r.boundary.begin(), r.boundary.end());
    std::vector<std::size_t> index(s.size(), npos);
    for (std::size_t i = 0; i < verts.size(); ++i) index[verts[i]] = i;
    std::vector<double> lambda;
    for (auto v : verts) lambda.push_back(s.lambda(v));
    std::vector<EdgeParams> edges;
    for (const auto& e : s.edges()) {
        if (index[e.u] != npos && index[e.v] != npos) edges.push_back({index[e.u], index[e.v], e.beta(), e.gamma()});
    }
    const auto sub = TwoSpinSystem::from_values(verts.size(), lambda, edges);
    Pinning pin;
    for (std::size_t i = 0; i < r.boundary.size(); ++i) pin[index[r.boundary[i]]] = (mask >> i) & 1U;
    return conditional_marginal(sub, pin, index[r.center], 1);
}

bool reference_good(const TwoSpinSystem& s, const Region& r, std::size_t n_global, std::uint64_t mask) {
    for (auto u : r.members) {
        std::size_t count = 0, ones = 0;
        for (const auto& inc : s.neighbors(u)) {
            const auto it = std::find(r.boundary.begin(), r.boundary.end(), inc.vertex);
            if (it == r.boundary.end()) continue;
            ++count;
            ones += (mask >> (it - r.boundary.begin())) & 1U;
        }
        if (3 * count > r.d2 &&
            static_cast<double>(ones) < static_cast<double>(count) / std::log(static_cast<double>(n_global)) + 2.0) {
            return false;
        }
    }
    return true;
}

WeightedTree star_tree(const std::vector<double>& gammas, double beta) {
    std::vector<EdgeParams> edges;
    std::vector<std::size_t> leaves;
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        edges.push_back({0, i + 1, beta, gammas[i]});
        leaves.push_back(i + 1);
    }
    const auto s = TwoSpinSystem::from_values(gammas.size() + 1, std::vector<double>(gammas.size() + 1, 1.0), edges);
    return weight_tree(build_saw_tree(s, 0, leaves), s);
}

} // namespace

TEST(RegionParams, FromN) {
    const auto p = RegionParams::from_n(1000, 4.0);
    EXPECT_EQ(p.d1, static_cast<std::size_t>(std::ceil(4.0 * std::log(std::log(1000.0)))));
    EXPECT_EQ(p.d2, static_cast<std::size_t>(std::ceil(std::pow(std::log(1000.0), 3))));
    EXPECT_THROW((RegionParams{0, 3}.validate()), InputError);
}

TEST(Region, StarTraces) {
    const auto star = uniform_system(6, star_graph(5), 1.0, 2.0, 1.0);
    const auto wide = construct_region(star, 0, {3, 10});
    EXPECT_EQ(wide.members, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
    EXPECT_TRUE(wide.boundary.empty());
    const auto narrow = construct_region(star, 0, {3, 4});
    EXPECT_EQ(narrow.members, (std::vector<std::size_t>{0}));
    EXPECT_EQ(narrow.boundary, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
    EXPECT_TRUE(verify_region(star, wide).ok());
    EXPECT_TRUE(verify_region(star, narrow).ok());
}

TEST(Region, PathWithLargeD1IsWholeComponent) {
    const auto path = uniform_system(8, path_graph(8), 1.0, 2.0, 1.0);
    const auto r = construct_region(path, 3, {50, 10});
    EXPECT_EQ(r.members.size(), 8u);
    EXPECT_TRUE(r.boundary.empty());
}

TEST(Region, CorruptedRegionFailsWithWitness) {
    const auto star = uniform_system(6, star_graph(5), 1.0, 2.0, 1.0);
    auto bad = construct_region(star, 0, {3, 10});
    bad.members.pop_back();
    bad.boundary = {5};
    const auto ver = verify_region(star, bad);
    EXPECT_FALSE(ver.paths_ok);
    EXPECT_FALSE(ver.ok());
    EXPECT_EQ(ver.witness, (std::vector<std::size_t>{0, 5}));
}

TEST(Region, RandomGraphsVerify) {
    RandomSource rng(61);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 10 + rng.below(90);
        const auto s = uniform_system(n, random_connected_graph(n, 3.0 / static_cast<double>(n), rng), 1.0, 2.0, 1.0);
        const RegionParams p{1 + rng.below(4), 2 + rng.below(29)};
        const auto r = construct_region(s, rng.below(n), p);
        EXPECT_TRUE(std::is_sorted(r.members.begin(), r.members.end()));
        EXPECT_TRUE(r.contains(r.center));
        for (auto b : r.boundary) EXPECT_FALSE(r.contains(b));
        EXPECT_TRUE(verify_region(s, r).ok());
    }
}

TEST(GoodBoundary, ThresholdArithmetic) {
    // ln 21 ~ 3.04, so nine boundary neighbours need at least 9/ln 21 + 2 ~ 4.96 ones.
    const auto star = uniform_system(10, star_graph(9), 1.0, 2.0, 1.0);
    const BoundaryModel model(star, manual_region(0, {0}, {1, 2, 3, 4, 5, 6, 7, 8, 9}, 1, 9), 21);
    EXPECT_TRUE(model.is_good(0b000011111));
    EXPECT_FALSE(model.is_good(0b000001111));
    EXPECT_TRUE(model.is_good(0b111111111));
    const BoundaryModel light(star, manual_region(0, {0}, {1, 2, 3, 4, 5, 6, 7, 8, 9}, 1, 30), 21);
    EXPECT_TRUE(light.is_good(0));
}

TEST(Influence, SingleEdgeIsOneSixth) {
    const auto edge = ferrospin::testing::single_edge(1.0, 2.0, 1.0).build();
    const BoundaryModel model(edge, manual_region(0, {0}, {1}, 1, 9), 100);
    EXPECT_NEAR(influence_a_u(model, 1), 1.0 / 6.0, 1e-14);
    EXPECT_NEAR(assm_sum(model), 1.0 / 6.0, 1e-14);
}

TEST(Influence, DisconnectedBoundaryVertexIsZero) {
    const auto s = TwoSpinSystem::from_values(3, {1.0, 1.0, 1.0}, {{0, 1, 1.0, 2.0}});
    const BoundaryModel model(s, manual_region(0, {0}, {1, 2}, 1, 9), 100);
    EXPECT_DOUBLE_EQ(influence_a_u(model, 2), 0.0);
    const BoundaryModel alone(s, manual_region(2, {2}, {}, 1, 9), 100);
    EXPECT_DOUBLE_EQ(assm_sum(alone), 0.0);
}

TEST(Influence, RandomTreesMatchDoubleEnumeration) {
    RandomSource rng(62);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 3 + rng.below(8);
        const auto s = random_system(n, random_tree(n, rng), 3.0, rng);
        const auto r = construct_region(s, rng.below(n), {1 + rng.below(2), 2 + rng.below(4)});
        if (r.boundary.empty() || r.boundary.size() > 12 || r.members.size() > 12) continue;
        const std::size_t n_global = 20;
        const BoundaryModel model(s, r, n_global);
        for (std::size_t i = 0; i < r.boundary.size(); ++i) {
            double want = 0.0;
            for (std::uint64_t m = 0; m < (std::uint64_t{1} << r.boundary.size()); ++m) {
                if (!reference_good(s, r, n_global, m)) continue;
                const double on = induced_center_marginal(s, r, m | (std::uint64_t{1} << i));
                const double off = induced_center_marginal(s, r, m & ~(std::uint64_t{1} << i));
                want = std::max(want, std::abs(on - off));
            }
            EXPECT_NEAR(influence_a_u(model, r.boundary[i]), want, 1e-12);
        }
    }
}

TEST(Influence, StarSumGrowsWithCoupling) {
    double prev = 0.0;
    for (double gamma : {2.0, 4.0, 8.0, 16.0}) {
        const auto star = uniform_system(7, star_graph(6), 1.0, gamma, 0.2);
        const BoundaryModel model(star, manual_region(0, {0}, {1, 2, 3, 4, 5, 6}, 1, 30), 50);
        const double sum = assm_sum(model);
        EXPECT_TRUE(std::isfinite(sum));
        EXPECT_GT(sum, prev);
        prev = sum;
    }
}

TEST(Closure, PathShapes) {
    const auto star = uniform_system(10, star_graph(9), 1.0, 2.0, 1.0);
    const BoundaryModel model(star, manual_region(0, {0}, {1, 2, 3, 4, 5, 6, 7, 8, 9}, 1, 9), 21);
    EXPECT_TRUE(model.closure_path(0b110011111, 0b110011111).empty());
    EXPECT_EQ(model.closure_path(0b110011111, 0b111011111), (std::vector<std::uint64_t>{0b111011111}));
    const auto good = model.good_masks();
    RandomSource rng(63);
    for (int rep = 0; rep < 200; ++rep) {
        const auto a = good[rng.below(good.size())];
        const auto b = good[rng.below(good.size())];
        const auto rep_ab = shortest_path_closure_check(model, a, b);
        EXPECT_TRUE(rep_ab.all_good);
        EXPECT_EQ(rep_ab.path.size(), static_cast<std::size_t>(std::popcount(a ^ b)));
        if (!rep_ab.path.empty()) { EXPECT_EQ(rep_ab.path.back(), b); }
    }
    EXPECT_THROW(shortest_path_closure_check(model, 0, 0b111111111), InputError);
}

TEST(UniversalPinning, SmallDegreeGetsInfinity) {
    const auto t = star_tree({2.0, 3.0}, 1.0);
    const auto star = universal_pinning(t, 20, 9);
    ASSERT_EQ(star.size(), 2u);
    for (const auto& [id, r] : star) EXPECT_TRUE(r.infinite);
}

TEST(UniversalPinning, HeavyNodeZerosSmallestCoupling) {
    // ln 20 ~ 2.996, so floor(9 / ln 20) = 3 children take ratio 0.
    const std::vector<double> gammas{5.0, 2.0, 7.0, 3.0, 9.0, 2.5, 8.0, 6.0, 4.0};
    const auto t = star_tree(gammas, 1.0);
    const auto star = universal_pinning(t, 20, 9);
    ASSERT_EQ(star.size(), 9u);
    std::vector<double> zero_gammas;
    for (const auto& [id, r] : star) {
        if (!r.infinite && r.value == 0.0) zero_gammas.push_back(t.nodes[id].gamma);
    }
    std::sort(zero_gammas.begin(), zero_gammas.end());
    const std::vector<double> want{2.0, 2.5, 3.0};
    ASSERT_EQ(zero_gammas.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(zero_gammas[i], want[i], 1e-12);
    EXPECT_FALSE(is_good_tree_pinning(t, star, 20, 9));
}

TEST(UniversalPinning, DominatesGoodPinningsOnSmallTrees) {
    RandomSource rng(64);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> gammas;
        for (int i = 0; i < 6; ++i) gammas.push_back(2.0 + 3.0 * rng.uniform());
        const auto t = star_tree(gammas, 0.8);
        const auto star = universal_pinning(t, 8, 6);
        for (const auto& sigma : good_tree_pinnings(t, 8, 6)) {
            EXPECT_GE(sigma_star_dominance_slack(t, sigma, star, 1, Ratio::inf(), 1), -1e-10);
            EXPECT_GE(sigma_star_dominance_slack(t, sigma, star, 1, Ratio::of(0.0), 1), -1e-10);
        }
    }
}

TEST(MonotonePotential, SingleBoundaryLeafIsTight) {
    const auto s = uniform_system(3, path_graph(3), 0.9, 2.0, 1.0);
    const auto t = weight_tree(build_saw_tree(s, 0, {2}), s);
    const auto leaves = tree_boundary_leaves(t);
    ASSERT_EQ(leaves.size(), 1u);
    const ParamClass pc{0.9, 2.0, 0.9 * lambda0(0.9, 2.0)};
    const auto check = verify_monotone_potential(t, leaves[0], {}, pc, 8, 6);
    EXPECT_NEAR(check.slack(), 0.0, 1e-14);
}

TEST(MonotonePotential, RejectsFieldAboveLambda0) {
    const auto s = uniform_system(3, path_graph(3), 0.9, 2.0, 1.0);
    const auto t = weight_tree(build_saw_tree(s, 0, {2}), s);
    const ParamClass pc{0.9, 2.0, 1.1 * lambda0(0.9, 2.0)};
    EXPECT_THROW(verify_monotone_potential(t, tree_boundary_leaves(t)[0], {}, pc, 8, 6), RegimeError);
}

TEST(RatioMonotonicity, NonNegativeOnAdmissibleTuples) {
    RandomSource rng(65);
    for (int rep = 0; rep < 20000; ++rep) {
        const double beta = 0.2 + 0.8 * rng.uniform();
        const double gamma = (1.0 / beta) * (1.0 + 4.0 * rng.uniform()) + 1e-9;
        const double lam = lambda0(beta, gamma) * rng.uniform();
        double x = lam * rng.uniform(), y = lam * rng.uniform();
        if (x < y) std::swap(x, y);
        const double xp = x * rng.uniform();
        const double lo = xp * y / x;
        const double yp = lo + (std::min(y, xp) - lo) * rng.uniform();
        if (!(y > 0.0 && yp > 0.0 && xp > yp)) continue;
        EXPECT_GE(ratio_monotonicity_slack(beta, gamma, x, y, xp, yp), -1e-12);
    }
}

TEST(RegionJson, ContainsMembers) {
    const auto star = uniform_system(6, star_graph(5), 1.0, 2.0, 1.0);
    const auto j = region_json(construct_region(star, 0, {3, 4}));
    EXPECT_NE(j.find("\"boundary\":[1,2,3,4,5]"), std::string::npos);
}
