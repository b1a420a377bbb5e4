#pragma once

#include "ferrospin/model.hpp"
#include "ferrospin/sawtree.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ferrospin {

struct RegionParams {
    std::size_t d1 = 1;
    std::size_t d2 = 1;

    // d1 = ceil(c_d ln ln n), d2 = ceil((ln n)^3), each at least 1.
    static RegionParams from_n(std::size_t n, double c_d = 4.0);
    void validate() const;
};

struct Region {
    std::size_t center = 0;
    std::vector<std::size_t> members;  // sorted, contains center
    std::vector<std::size_t> boundary; // sorted outer vertex boundary
    std::size_t d1 = 1;
    std::size_t d2 = 1;
    std::size_t explored_nodes = 0;

    bool contains(std::size_t v) const;
};

// Depth-first truncation of the cycle-free SAW tree: stop at a node once the
// child counts summed along its walk reach d1, keeping its children when
// there are fewer than d2 of them.
Region construct_region(const TwoSpinSystem& system, std::size_t v, const RegionParams& params,
                        std::size_t node_cap = 10'000'000);

struct RegionVerification {
    bool size_ok = false;
    double size_bound = 0.0;
    bool paths_ok = true;
    bool complete = true; // false when the node cap stopped the walk
    std::size_t leaves_checked = 0;
    std::vector<std::size_t> witness; // walk to the first failing boundary copy

    bool ok() const { return size_ok && paths_ok; }
};

// Checks |S| <= e^d1 d2 and, for every boundary copy in T_SAW(G, v, boundary),
// that the S-children counts of its proper ancestors (parent excluded) sum to
// at least d1 or some ancestor has at least d2 non-cycle-closing children.
RegionVerification verify_region(const TwoSpinSystem& system, const Region& region,
                                 std::size_t node_cap = 2'000'000);

std::string region_json(const Region& region);

// Boundary conditions on a region, indexed by position in region.boundary:
// bit i of a mask is the spin of boundary[i].
struct BoundaryModel {
    const TwoSpinSystem* system = nullptr;
    Region region;
    std::size_t n_global = 0;
    // For each member, positions of its boundary neighbours.
    std::vector<std::vector<std::size_t>> member_boundary;

    BoundaryModel(const TwoSpinSystem& system, Region region, std::size_t n_global);

    // Members u with |N(u) in boundary| > d2/3 need at least |N|/ln n + 2 ones.
    bool is_good(std::uint64_t mask) const;
    std::vector<std::uint64_t> good_masks() const;
    // P(X_center = 1 | boundary = mask).
    double center_marginal(std::uint64_t mask) const;
    // Masks along the closure path: flips 0->1 first, then 1->0, each in
    // increasing boundary order. Excludes the start.
    std::vector<std::uint64_t> closure_path(std::uint64_t from, std::uint64_t to) const;

private:
    TwoSpinSystem inner_; // members only, center-relative indices
    std::vector<std::size_t> inner_index_;
    std::size_t center_inner_ = 0;
};

// a_u = max over good sigma of TV(mu_v^{sigma, u<-0}, mu_v^{sigma, u<-1}).
double influence_a_u(const BoundaryModel& model, std::size_t boundary_vertex);
double assm_sum(const BoundaryModel& model);
std::string assm_csv(const BoundaryModel& model);

struct ClosureReport {
    std::vector<std::uint64_t> path;
    bool all_good = true;
    std::size_t first_bad = npos;
};

// Requires both endpoints good; throws InputError otherwise.
ClosureReport shortest_path_closure_check(const BoundaryModel& model, std::uint64_t sigma, std::uint64_t tau);

// Tree-side boundary conditions. Lambda is the set of BoundaryCopy leaves;
// pinnings map them to ratios 0 or infinity.
std::vector<std::size_t> tree_boundary_leaves(const WeightedTree& tree);
// Non-leaf u with |N_Lambda(u)| > d2/3 needs at least |N|/ln n + 1 zeros.
bool is_good_tree_pinning(const WeightedTree& tree, const RatioPinning& pins, std::size_t n_global,
                          std::size_t d2);
// All good pinnings of Lambda; needs |Lambda| <= 20.
std::vector<RatioPinning> good_tree_pinnings(const WeightedTree& tree, std::size_t n_global, std::size_t d2);

// sigma*: for each non-leaf u, its Lambda-children get infinity when there are
// at most d2/3 of them; otherwise the floor(|N|/ln n) with smallest
// beta*gamma (ties by node id) get 0 and the rest infinity.
RatioPinning universal_pinning(const WeightedTree& tree, std::size_t n_global, std::size_t d2);

// sigma* on Lambda nodes above level k, base on the rest, then w <- c.
RatioPinning mix_with_universal(const WeightedTree& tree, const RatioPinning& base, const RatioPinning& star,
                                std::size_t k, std::size_t w, Ratio c);

// min over non-leaf u of R_u^{tau, w<-c} - R_u^{sigma, w<-c}, where tau mixes
// sigma* above level k with sigma.
double sigma_star_dominance_slack(const WeightedTree& tree, const RatioPinning& sigma, const RatioPinning& star,
                                  std::size_t w, Ratio c, std::size_t k);

struct MonotoneCheck {
    double discrepancy_rho = 0.0;   // |R^{rho, w<-inf} - R^{rho, w<-0}| at the root
    double discrepancy_sigma = 0.0; // same with sigma* above the level of w
    double collapsed_rho = 0.0;     // rho side recomputed on the level-k collapse
    double slack() const { return discrepancy_sigma - discrepancy_rho; }
};

// Needs pc.lambda_bound < lambda0(pc); throws RegimeError otherwise.
MonotoneCheck verify_monotone_potential(const WeightedTree& tree, std::size_t w, const RatioPinning& rho,
                                        const ParamClass& pc, std::size_t n_global, std::size_t d2);

// Tree where every non-w node at the level of w is replaced by a leaf whose
// ratio is pinned to its computed value; w stays free.
struct CollapsedTree {
    WeightedTree tree;
    RatioPinning pins;
    std::size_t w = npos;
};
CollapsedTree collapse_level(const WeightedTree& tree, const RatioPinning& pins, std::size_t w);

// Left side minus right side of the two-point ratio inequality for
// lambda >= x > y > 0, lambda >= x' > y' > 0, x >= x', y >= y', x/y >= x'/y'.
double ratio_monotonicity_slack(double beta, double gamma, double x, double y, double xp, double yp);

} // namespace ferrospin
