#pragma once

#include "ferrospin/model.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ferrospin {

enum class NodeKind : std::uint8_t {
    Internal,
    FreeLeaf,     // walk ended at a degree-1 vertex
    BoundaryCopy, // copy of a boundary vertex
    CycleClosing, // walk returned to a vertex already on it
    Truncated,    // depth cap reached before the walk ended
};

struct SawNode {
    std::size_t preimage = 0;
    std::size_t parent = npos;
    std::size_t parent_edge = npos; // edge index in the source system
    std::size_t depth = 0;
    std::vector<std::size_t> children;
    NodeKind kind = NodeKind::Internal;
    std::optional<Spin> pin;
};

struct SawOptions {
    std::size_t max_nodes = 4'000'000;
    std::size_t max_depth = npos;
};

struct SawTree {
    std::size_t root = 0;
    std::vector<SawNode> nodes;
    std::vector<char> is_boundary; // indexed by vertex of the source system

    std::size_t size() const { return nodes.size(); }
    bool is_leaf(std::size_t id) const { return nodes[id].children.empty(); }
    // Preimages from the root down to id.
    std::vector<std::size_t> walk(std::size_t id) const;
};

// Tree of self-avoiding walks from v. Walks stop at boundary vertices and at
// the first repeated vertex. A cycle-closing copy of v_i reached from
// v_{l-1} is pinned to 0 when v_{i+1} > v_{l-1} and to 1 otherwise.
SawTree build_saw_tree(const TwoSpinSystem& system, std::size_t v,
                       const std::vector<std::size_t>& boundary, const SawOptions& options = {});

// Pins every boundary copy whose preimage appears in the pinning.
void pin_saw_tree(SawTree& tree, const Pinning& boundary_spins);

// Empty when every non-leaf has its graph degree and every leaf is a boundary
// copy, a cycle-closer or a degree-1 vertex.
std::string verify_saw_structure(const SawTree& tree, const TwoSpinSystem& system);

// Ratio R = p0 / p1, with an explicit infinity.
struct Ratio {
    double value = 0.0;
    bool infinite = false;

    static Ratio inf() { return {0.0, true}; }
    static Ratio of(double x) { return {x, false}; }
    static Ratio from_spin(Spin s) { return s == 0 ? inf() : of(0.0); }
    double p1() const { return infinite ? 0.0 : 1.0 / (1.0 + value); }
    double p0() const { return infinite ? 1.0 : value / (1.0 + value); }
};

struct WeightedNode {
    std::size_t source = npos; // SAW node this came from
    std::size_t preimage = 0;
    std::size_t parent = npos;
    std::vector<std::size_t> children;
    std::size_t depth = 0;
    double lambda = 1.0;
    double beta = 1.0;  // edge to parent
    double gamma = 1.0; // edge to parent
    NodeKind kind = NodeKind::Internal;
};

struct WeightedTree {
    std::size_t root = 0;
    std::vector<WeightedNode> nodes;

    std::size_t size() const { return nodes.size(); }
    bool is_leaf(std::size_t id) const { return nodes[id].children.empty(); }
};

// Keyed by weighted-tree node id.
using RatioPinning = std::map<std::size_t, Ratio>;

// Same shape as the SAW tree, with parameters attached.
WeightedTree weight_tree(const SawTree& tree, const TwoSpinSystem& system);
// Spin pins of the SAW tree as ratio pins on weight_tree(tree, system).
RatioPinning spin_pins_as_ratios(const SawTree& tree);

// Removes pinned leaves and folds them into their parents' fields:
// spin 0 multiplies lambda_u by beta_e, spin 1 by 1/gamma_e.
WeightedTree prune_pinned_leaves(const SawTree& tree, const TwoSpinSystem& system);

struct ChildInput {
    Ratio x;
    double beta = 1.0;
    double gamma = 1.0;
};

// F_u(x) = lambda_u * prod (beta_i x_i + 1) / (x_i + gamma_i).
Ratio tree_recursion_step(double lambda_u, const std::vector<ChildInput>& children);
double recursion_factor(const Ratio& x, double beta, double gamma);

// Ratios at every node; unpinned leaves take R = lambda.
std::vector<Ratio> node_ratios(const WeightedTree& tree, const RatioPinning& pins);
Ratio root_ratio(const WeightedTree& tree, const RatioPinning& pins);

struct Marginal {
    double p0 = 0.0;
    double p1 = 0.0;
};

// Marginal of v given a pinning, through the SAW tree.
Marginal saw_marginal(const TwoSpinSystem& system, std::size_t v, const Pinning& pinning,
                      const SawOptions& options = {});

} // namespace ferrospin
