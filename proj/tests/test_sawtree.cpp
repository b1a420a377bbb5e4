#include "ferrospin/errors.hpp"
#include "ferrospin/exact.hpp"
#include "ferrospin/harness.hpp"
#include "ferrospin/sawtree.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ferrospin;

namespace {

std::vector<std::size_t> children_preimages(const SawTree& t, std::size_t id) {
    std::vector<std::size_t> out;
    for (std::size_t c : t.nodes[id].children) out.push_back(t.nodes[c].preimage);
    return out;
}

// Leaf ids of the weighted tree keyed to a given ratio.
RatioPinning all_leaves(const WeightedTree& t, Ratio r) {
    RatioPinning pins;
    for (std::size_t id = 0; id < t.size(); ++id) {
        if (id != t.root && t.is_leaf(id)) pins[id] = r;
    }
    return pins;
}

} // namespace

TEST(SawTree, PathIsItsOwnTree) {
    const auto s = uniform_system(3, path_graph(3), 1.0, 2.0, 1.0);
    const auto t = build_saw_tree(s, 0, {});
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t.walk(2), (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(t.nodes[2].kind, NodeKind::FreeLeaf);
    EXPECT_TRUE(verify_saw_structure(t, s).empty());
}

TEST(SawTree, TriangleHasTwoCycleClosers) {
    const auto s = ferrospin::testing::triangle(1.0, 2.0, 1.0).build();
    const auto t = build_saw_tree(s, 0, {});
    EXPECT_EQ(t.size(), 7u);
    EXPECT_EQ(children_preimages(t, t.root), (std::vector<std::size_t>{1, 2}));
    std::size_t closers = 0;
    for (std::size_t id = 0; id < t.size(); ++id) {
        if (t.nodes[id].kind != NodeKind::CycleClosing) continue;
        ++closers;
        EXPECT_EQ(t.nodes[id].preimage, 0u);
        const auto w = t.walk(id);
        ASSERT_EQ(w.size(), 4u);
        // Pinned 0 exactly when the vertex after the first visit exceeds the
        // last vertex before the return.
        EXPECT_EQ(*t.nodes[id].pin, w[1] > w[2] ? 0 : 1);
    }
    EXPECT_EQ(closers, 2u);
    EXPECT_TRUE(verify_saw_structure(t, s).empty());
}

TEST(SawTree, CycleBoundaryInterceptsBothBranches) {
    const auto s = uniform_system(4, cycle_graph(4), 1.0, 2.0, 1.0);
    auto t = build_saw_tree(s, 0, {2});
    EXPECT_EQ(t.size(), 5u);
    std::size_t copies = 0;
    for (const auto& node : t.nodes) {
        EXPECT_NE(node.kind, NodeKind::CycleClosing);
        if (node.kind == NodeKind::BoundaryCopy) {
            ++copies;
            EXPECT_EQ(node.preimage, 2u);
        }
    }
    EXPECT_EQ(copies, 2u);
    pin_saw_tree(t, {{2, 1}});
    for (const auto& node : t.nodes) {
        if (node.kind == NodeKind::BoundaryCopy) { EXPECT_EQ(node.pin, Spin{1}); }
    }
}

TEST(SawTree, CapacityError) {
    const auto s = uniform_system(7, complete_graph(7), 1.0, 2.0, 1.0);
    SawOptions opt;
    opt.max_nodes = 100;
    EXPECT_THROW(build_saw_tree(s, 0, {}, opt), CapacityError);
}

TEST(Recursion, Examples) {
    EXPECT_DOUBLE_EQ(tree_recursion_step(1.7, {}).value, 1.7);
    EXPECT_NEAR(tree_recursion_step(1.0, {{Ratio::of(1.0), 1.0, 2.0}}).value, 2.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(recursion_factor(Ratio::inf(), 0.5, 3.0), 0.5);
    EXPECT_DOUBLE_EQ(recursion_factor(Ratio::of(0.0), 0.5, 4.0), 0.25);
    EXPECT_DOUBLE_EQ(Ratio::inf().p0(), 1.0);
    EXPECT_DOUBLE_EQ(Ratio::from_spin(1).p1(), 1.0);
}

TEST(Prune, FoldsPinnedLeavesIntoFields) {
    const auto s = ferrospin::testing::single_edge(1.0, 2.0, 1.0).build();
    auto one = build_saw_tree(s, 0, {1});
    pin_saw_tree(one, {{1, 1}});
    const auto p1 = prune_pinned_leaves(one, s);
    ASSERT_EQ(p1.size(), 1u);
    EXPECT_NEAR(p1.nodes[p1.root].lambda, 0.5, 1e-15);

    auto zero = build_saw_tree(s, 0, {1});
    pin_saw_tree(zero, {{1, 0}});
    EXPECT_NEAR(prune_pinned_leaves(zero, s).nodes[0].lambda, 1.0, 1e-15);
}

TEST(Prune, TrianglePreservesRootMarginal) {
    const auto s = ferrospin::testing::triangle(0.8, 2.5, 1.3).build();
    const auto t = build_saw_tree(s, 0, {});
    const auto direct = root_ratio(weight_tree(t, s), spin_pins_as_ratios(t));
    const auto pruned = root_ratio(prune_pinned_leaves(t, s), {});
    ASSERT_FALSE(direct.infinite);
    EXPECT_NEAR(direct.value, pruned.value, 1e-12 * direct.value);
}

TEST(RootRatio, SingleNodeIsField) {
    const auto s = TwoSpinSystem::from_values(1, {2.5}, {});
    const auto w = weight_tree(build_saw_tree(s, 0, {}), s);
    EXPECT_DOUBLE_EQ(root_ratio(w, {}).value, 2.5);
}

TEST(RootRatio, InfiniteLeavesMatchAllZeroSpins) {
    const auto s = uniform_system(6, star_graph(5), 0.7, 2.0, 1.1);
    const std::vector<std::size_t> leaves{1, 2, 3, 4, 5};
    auto t = build_saw_tree(s, 0, leaves);
    Pinning zeros;
    for (std::size_t v : leaves) zeros[v] = 0;
    pin_saw_tree(t, zeros);
    const auto w = weight_tree(t, s);
    const auto via_inf = root_ratio(w, all_leaves(w, Ratio::inf()));
    const double p1 = conditional_marginal(s, zeros, 0, 1);
    EXPECT_NEAR(via_inf.p1(), p1, 1e-13);
}

TEST(RootRatio, MonotoneInPinnedRatios) {
    RandomSource rng(31);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 2 + rng.below(9);
        const auto s = random_system(n, random_tree(n, rng), 3.0, rng);
        const auto w = weight_tree(build_saw_tree(s, 0, {}), s);
        RatioPinning pins;
        for (std::size_t id = 1; id < w.size(); ++id) {
            if (w.is_leaf(id)) pins[id] = Ratio::of(5.0 * rng.uniform());
        }
        if (pins.empty()) continue;
        const double base = root_ratio(w, pins).value;
        for (auto& [id, r] : pins) {
            const Ratio keep = r;
            r = Ratio::of(keep.value * 1.5 + 0.1);
            EXPECT_GE(root_ratio(w, pins).value, base * (1.0 - 1e-14));
            r = Ratio::inf();
            EXPECT_GE(root_ratio(w, pins).value, base * (1.0 - 1e-14));
            r = keep;
        }
    }
}

TEST(SawMarginal, TreeEqualsConditional) {
    RandomSource rng(33);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.below(8);
        const auto s = random_system(n, random_tree(n, rng), 3.0, rng);
        const std::size_t v = rng.below(n);
        const Pinning pin{{(v + 1) % n, static_cast<Spin>(rep % 2)}};
        const auto m = saw_marginal(s, v, pin);
        EXPECT_NEAR(m.p1, conditional_marginal(s, pin, v, 1), 1e-12);
    }
}

TEST(SawMarginal, TriangleMatchesEnumeration) {
    const auto raw = ferrospin::testing::triangle(1.0, 2.0, 1.0);
    for (std::size_t v = 0; v < 3; ++v) {
        EXPECT_NEAR(saw_marginal(raw.build(), v, {}).p1, raw.conditional_one(v, 0, 0), 1e-14);
    }
    EXPECT_NEAR(raw.conditional_one(0, 0, 0), 13.0 / 18.0, 1e-15);
}

TEST(SawMarginal, RandomGraphsMatchEnumeration) {
    RandomSource rng(34);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 2 + rng.below(5);
        const auto raw = ferrospin::testing::random_raw(n, random_connected_graph(n, 0.5, rng), rng);
        const auto s = raw.build();
        const std::size_t v = rng.below(n);
        Pinning pin;
        std::uint64_t pinned = 0, spins = 0;
        for (std::size_t u = 0; u < n; ++u) {
            if (u != v && rng.bernoulli(0.3)) {
                pin[u] = rng.bernoulli(0.5) ? 1 : 0;
                pinned |= std::uint64_t{1} << u;
                if (pin[u]) spins |= std::uint64_t{1} << u;
            }
        }
        EXPECT_NEAR(saw_marginal(s, v, pin).p1, raw.conditional_one(v, pinned, spins), 1e-11);
    }
}

// Flipping every cycle-closing pin amounts to reversing the neighbour order,
// which is still exact. Pinning all closers alike is not.
TEST(SawMarginal, SwappedCycleRuleIsReversedOrder) {
    const ferrospin::testing::RawSystem raw{3, {1.0, 0.3, 2.5}, {{0, 1, 1.0, 2.0}, {1, 2, 0.6, 4.0}, {0, 2, 0.9, 1.5}}};
    const auto s = raw.build();
    for (std::size_t v = 0; v < 3; ++v) {
        auto t = build_saw_tree(s, v, {});
        for (auto& node : t.nodes) {
            if (node.kind == NodeKind::CycleClosing) node.pin = Spin(1 - *node.pin);
        }
        const double swapped = root_ratio(weight_tree(t, s), spin_pins_as_ratios(t)).p1();
        EXPECT_NEAR(swapped, raw.conditional_one(v, 0, 0), 1e-12);
    }
}

TEST(SawMarginal, UniformCyclePinsBreakTriangle) {
    const ferrospin::testing::RawSystem raw{3, {1.0, 0.3, 2.5}, {{0, 1, 1.0, 2.0}, {1, 2, 0.6, 4.0}, {0, 2, 0.9, 1.5}}};
    const auto s = raw.build();
    for (Spin fixed : {Spin(0), Spin(1)}) {
        auto t = build_saw_tree(s, 0, {});
        for (auto& node : t.nodes) {
            if (node.kind == NodeKind::CycleClosing) node.pin = fixed;
        }
        const double wrong = root_ratio(weight_tree(t, s), spin_pins_as_ratios(t)).p1();
        EXPECT_GT(std::abs(wrong - raw.conditional_one(0, 0, 0)), 1e-5);
    }
}
