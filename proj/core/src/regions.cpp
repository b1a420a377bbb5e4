#include "ferrospin/regions.hpp"

#include "ferrospin/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace ferrospin {

namespace {

double log_n(std::size_t n_global) {
    if (n_global < 2) throw InputError("the global vertex count must be at least 2");
    return std::log(static_cast<double>(n_global));
}

// Strictly more than d2/3, in integers.
bool heavy(std::size_t count, std::size_t d2) { return 3 * count > d2; }

class RegionBuilder {
public:
    RegionBuilder(const TwoSpinSystem& system, const RegionParams& params, std::size_t cap)
        : system_(system), params_(params), cap_(cap), on_path_(system.size(), 0), member_(system.size(), 0) {}

    void dfs(std::size_t x, std::size_t degsum_before) {
        if (++explored_ > cap_) throw CapacityError("region construction exceeded its node cap");
        member_[x] = 1;
        on_path_[x] = 1;
        std::vector<std::size_t> children;
        for (const auto& inc : system_.neighbors(x)) {
            if (!on_path_[inc.vertex]) children.push_back(inc.vertex);
        }
        const std::size_t degsum = degsum_before + children.size();
        if (!children.empty()) {
            if (degsum >= params_.d1) {
                if (children.size() < params_.d2) {
                    for (auto y : children) member_[y] = 1;
                }
            } else {
                for (auto y : children) dfs(y, degsum);
            }
        }
        on_path_[x] = 0;
    }

    std::vector<char>& members() { return member_; }
    std::size_t explored() const { return explored_; }

private:
    const TwoSpinSystem& system_;
    const RegionParams& params_;
    std::size_t cap_;
    std::size_t explored_ = 0;
    std::vector<char> on_path_;
    std::vector<char> member_;
};

class RegionChecker {
public:
    RegionChecker(const TwoSpinSystem& system, const Region& region, std::size_t cap, RegionVerification& out)
        : system_(system), region_(region), cap_(cap), out_(out), in_s_(system.size(), 0), on_path_(system.size(), 0) {
        for (auto u : region.members) in_s_[u] = 1;
    }

    // prefix_f = sum of F over proper ancestors of x; big = some ancestor of x has >= d2 children.
    void walk(std::size_t x, std::size_t parent, std::size_t prefix_f, bool big) {
        if (!out_.paths_ok || !out_.complete) return;
        if (++nodes_ > cap_) {
            out_.complete = false;
            return;
        }
        on_path_[x] = 1;
        path_.push_back(x);
        std::size_t f_here = 0;
        std::size_t noncycle = 0;
        for (const auto& inc : system_.neighbors(x)) {
            const auto y = inc.vertex;
            if (y == parent || on_path_[y]) continue;
            ++noncycle;
            if (in_s_[y]) ++f_here;
        }
        const bool big_here = big || noncycle >= region_.d2;
        for (const auto& inc : system_.neighbors(x)) {
            const auto y = inc.vertex;
            if (y == parent || on_path_[y]) continue;
            if (in_s_[y]) {
                walk(y, x, prefix_f + f_here, big_here);
            } else {
                ++out_.leaves_checked;
                if (!(prefix_f >= region_.d1 || big_here) && out_.paths_ok) {
                    out_.paths_ok = false;
                    out_.witness = path_;
                    out_.witness.push_back(y);
                }
            }
            if (!out_.paths_ok || !out_.complete) break;
        }
        path_.pop_back();
        on_path_[x] = 0;
    }

private:
    const TwoSpinSystem& system_;
    const Region& region_;
    std::size_t cap_;
    RegionVerification& out_;
    std::vector<char> in_s_;
    std::vector<char> on_path_;
    std::vector<std::size_t> path_;
    std::size_t nodes_ = 0;
};

bool is_lambda_leaf(const WeightedTree& tree, std::size_t id) {
    return tree.nodes[id].kind == NodeKind::BoundaryCopy && tree.is_leaf(id);
}

} // namespace

RegionParams RegionParams::from_n(std::size_t n, double c_d) {
    if (n < 2) throw InputError("region parameters need n >= 2");
    const double ln = std::log(static_cast<double>(n));
    RegionParams p;
    const double d1 = std::ceil(c_d * std::log(ln));
    p.d1 = d1 < 1.0 ? 1 : static_cast<std::size_t>(d1);
    p.d2 = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ln * ln * ln)));
    return p;
}

void RegionParams::validate() const {
    if (d1 < 1) throw InputError("d1 must be >= 1");
    if (d2 < 1) throw InputError("d2 must be >= 1");
}

bool Region::contains(std::size_t v) const { return std::binary_search(members.begin(), members.end(), v); }

Region construct_region(const TwoSpinSystem& system, std::size_t v, const RegionParams& params,
                        std::size_t node_cap) {
    params.validate();
    if (v >= system.size()) throw InputError("center vertex out of range");
    RegionBuilder builder(system, params, node_cap);
    builder.dfs(v, 0);
    Region r;
    r.center = v;
    r.d1 = params.d1;
    r.d2 = params.d2;
    r.explored_nodes = builder.explored();
    const auto& member = builder.members();
    std::vector<char> outer(system.size(), 0);
    for (std::size_t u = 0; u < system.size(); ++u) {
        if (!member[u]) continue;
        r.members.push_back(u);
        for (const auto& inc : system.neighbors(u)) {
            if (!member[inc.vertex]) outer[inc.vertex] = 1;
        }
    }
    for (std::size_t u = 0; u < system.size(); ++u) {
        if (outer[u]) r.boundary.push_back(u);
    }
    return r;
}

RegionVerification verify_region(const TwoSpinSystem& system, const Region& region, std::size_t node_cap) {
    RegionVerification out;
    out.size_bound = std::exp(static_cast<double>(region.d1)) * static_cast<double>(region.d2);
    out.size_ok = static_cast<double>(region.members.size()) <= out.size_bound;
    RegionChecker checker(system, region, node_cap, out);
    checker.walk(region.center, npos, 0, false);
    return out;
}

std::string region_json(const Region& region) {
    std::ostringstream out;
    auto list = [&](const std::vector<std::size_t>& xs) {
        out << '[';
        for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
        out << ']';
    };
    out << "{\"center\":" << region.center << ",\"members\":";
    list(region.members);
    out << ",\"boundary\":";
    list(region.boundary);
    out << ",\"d1\":" << region.d1 << ",\"d2\":" << region.d2 << '}';
    return out.str();
}

BoundaryModel::BoundaryModel(const TwoSpinSystem& sys, Region reg, std::size_t n)
    : system(&sys), region(std::move(reg)), n_global(n) {
    log_n(n_global);
    if (region.members.size() > 20) throw CapacityError("region has more than 20 members");
    if (region.boundary.size() > 20) throw CapacityError("region boundary has more than 20 vertices");
    inner_index_.assign(sys.size(), npos);
    for (std::size_t i = 0; i < region.members.size(); ++i) inner_index_[region.members[i]] = i;
    center_inner_ = inner_index_.at(region.center);
    std::vector<std::size_t> boundary_pos(sys.size(), npos);
    for (std::size_t i = 0; i < region.boundary.size(); ++i) boundary_pos[region.boundary[i]] = i;
    member_boundary.resize(region.members.size());
    std::vector<double> log_lambda;
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < region.members.size(); ++i) {
        const auto u = region.members[i];
        log_lambda.push_back(sys.log_lambda(u));
        for (const auto& inc : sys.neighbors(u)) {
            if (boundary_pos[inc.vertex] != npos) member_boundary[i].push_back(boundary_pos[inc.vertex]);
            const auto j = inner_index_[inc.vertex];
            if (j != npos && u < inc.vertex) {
                const auto& e = sys.edge(inc.edge);
                edges.push_back({i, j, e.log_beta, e.log_gamma});
            } else if (j == npos && boundary_pos[inc.vertex] == npos) {
                throw InputError("region boundary does not separate the region");
            }
        }
    }
    inner_ = TwoSpinSystem::from_logs(region.members.size(), std::move(log_lambda), std::move(edges));
}

bool BoundaryModel::is_good(std::uint64_t mask) const {
    const double ln = log_n(n_global);
    for (const auto& nb : member_boundary) {
        if (!heavy(nb.size(), region.d2)) continue;
        std::size_t ones = 0;
        for (auto p : nb) ones += (mask >> p) & 1U;
        if (static_cast<double>(ones) < static_cast<double>(nb.size()) / ln + 2.0) return false;
    }
    return true;
}

std::vector<std::uint64_t> BoundaryModel::good_masks() const {
    std::vector<std::uint64_t> out;
    const std::uint64_t count = std::uint64_t{1} << region.boundary.size();
    for (std::uint64_t m = 0; m < count; ++m) {
        if (is_good(m)) out.push_back(m);
    }
    return out;
}

double BoundaryModel::center_marginal(std::uint64_t mask) const {
    Pinning pin;
    std::vector<double> log_lambda(inner_.size());
    for (std::size_t i = 0; i < inner_.size(); ++i) {
        double l = inner_.log_lambda(i);
        const auto u = region.members[i];
        for (const auto& inc : system->neighbors(u)) {
            const auto it = std::lower_bound(region.boundary.begin(), region.boundary.end(), inc.vertex);
            if (it == region.boundary.end() || *it != inc.vertex) continue;
            const auto pos = static_cast<std::size_t>(it - region.boundary.begin());
            const auto& e = system->edge(inc.edge);
            l += ((mask >> pos) & 1U) ? -e.log_gamma : e.log_beta;
        }
        log_lambda[i] = l;
    }
    const auto conditioned = TwoSpinSystem::from_logs(inner_.size(), std::move(log_lambda), inner_.edges());
    double log0 = -INFINITY;
    double log1 = -INFINITY;
    const std::uint64_t count = std::uint64_t{1} << conditioned.size();
    for (std::uint64_t x = 0; x < count; ++x) {
        const double lw = conditioned.log_weight_mask(x);
        double& acc = ((x >> center_inner_) & 1U) ? log1 : log0;
        const double m = std::max(acc, lw);
        acc = m + std::log(std::exp(acc - m) + std::exp(lw - m));
    }
    return 1.0 / (1.0 + std::exp(log0 - log1));
}

std::vector<std::uint64_t> BoundaryModel::closure_path(std::uint64_t from, std::uint64_t to) const {
    std::vector<std::uint64_t> path;
    std::uint64_t cur = from;
    for (std::size_t i = 0; i < region.boundary.size(); ++i) {
        const std::uint64_t bit = std::uint64_t{1} << i;
        if (!(from & bit) && (to & bit)) {
            cur |= bit;
            path.push_back(cur);
        }
    }
    for (std::size_t i = 0; i < region.boundary.size(); ++i) {
        const std::uint64_t bit = std::uint64_t{1} << i;
        if ((from & bit) && !(to & bit)) {
            cur &= ~bit;
            path.push_back(cur);
        }
    }
    return path;
}

double influence_a_u(const BoundaryModel& model, std::size_t boundary_vertex) {
    const auto& b = model.region.boundary;
    const auto it = std::lower_bound(b.begin(), b.end(), boundary_vertex);
    if (it == b.end() || *it != boundary_vertex) throw InputError("vertex is not on the region boundary");
    const std::uint64_t bit = std::uint64_t{1} << (it - b.begin());
    double best = 0.0;
    for (auto mask : model.good_masks()) {
        const double p_on = model.center_marginal(mask | bit);
        const double p_off = model.center_marginal(mask & ~bit);
        best = std::max(best, std::abs(p_on - p_off));
    }
    return best;
}

double assm_sum(const BoundaryModel& model) {
    double s = 0.0;
    for (auto u : model.region.boundary) s += influence_a_u(model, u);
    return s;
}

std::string assm_csv(const BoundaryModel& model) {
    std::ostringstream out;
    out << "center,boundary_vertex,a_u\n";
    double total = 0.0;
    char buf[32];
    for (auto u : model.region.boundary) {
        const double a = influence_a_u(model, u);
        total += a;
        std::snprintf(buf, sizeof buf, "%.17g", a);
        out << model.region.center << ',' << u << ',' << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.17g", total);
    out << model.region.center << ",sum," << buf << '\n';
    return out.str();
}

ClosureReport shortest_path_closure_check(const BoundaryModel& model, std::uint64_t sigma, std::uint64_t tau) {
    if (!model.is_good(sigma) || !model.is_good(tau)) throw InputError("closure endpoints must be good");
    ClosureReport rep;
    rep.path = model.closure_path(sigma, tau);
    for (std::size_t i = 0; i < rep.path.size(); ++i) {
        if (!model.is_good(rep.path[i])) {
            rep.all_good = false;
            rep.first_bad = i;
            break;
        }
    }
    return rep;
}

std::vector<std::size_t> tree_boundary_leaves(const WeightedTree& tree) {
    std::vector<std::size_t> out;
    for (std::size_t id = 0; id < tree.size(); ++id) {
        if (is_lambda_leaf(tree, id)) out.push_back(id);
    }
    return out;
}

bool is_good_tree_pinning(const WeightedTree& tree, const RatioPinning& pins, std::size_t n_global, std::size_t d2) {
    const double ln = log_n(n_global);
    for (std::size_t u = 0; u < tree.size(); ++u) {
        if (tree.is_leaf(u)) continue;
        std::size_t count = 0;
        std::size_t zeros = 0;
        for (auto c : tree.nodes[u].children) {
            if (!is_lambda_leaf(tree, c)) continue;
            ++count;
            const auto it = pins.find(c);
            if (it == pins.end()) throw InputError("tree pinning leaves a boundary leaf free");
            if (!it->second.infinite && it->second.value == 0.0) ++zeros;
        }
        if (heavy(count, d2) && static_cast<double>(zeros) < static_cast<double>(count) / ln + 1.0) return false;
    }
    return true;
}

std::vector<RatioPinning> good_tree_pinnings(const WeightedTree& tree, std::size_t n_global, std::size_t d2) {
    const auto leaves = tree_boundary_leaves(tree);
    if (leaves.size() > 20) throw CapacityError("more than 20 boundary leaves");
    std::vector<RatioPinning> out;
    const std::uint64_t count = std::uint64_t{1} << leaves.size();
    for (std::uint64_t m = 0; m < count; ++m) {
        RatioPinning pins;
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            pins[leaves[i]] = ((m >> i) & 1U) ? Ratio::of(0.0) : Ratio::inf();
        }
        if (is_good_tree_pinning(tree, pins, n_global, d2)) out.push_back(std::move(pins));
    }
    return out;
}

RatioPinning universal_pinning(const WeightedTree& tree, std::size_t n_global, std::size_t d2) {
    const double ln = log_n(n_global);
    RatioPinning star;
    for (std::size_t u = 0; u < tree.size(); ++u) {
        std::vector<std::size_t> kids;
        for (auto c : tree.nodes[u].children) {
            if (is_lambda_leaf(tree, c)) kids.push_back(c);
        }
        if (kids.empty()) continue;
        std::size_t zeros = 0;
        if (heavy(kids.size(), d2)) {
            std::sort(kids.begin(), kids.end(), [&](std::size_t a, std::size_t b) {
                const double pa = tree.nodes[a].beta * tree.nodes[a].gamma;
                const double pb = tree.nodes[b].beta * tree.nodes[b].gamma;
                return pa != pb ? pa < pb : a < b;
            });
            zeros = static_cast<std::size_t>(std::floor(static_cast<double>(kids.size()) / ln));
        }
        for (std::size_t i = 0; i < kids.size(); ++i) star[kids[i]] = i < zeros ? Ratio::of(0.0) : Ratio::inf();
    }
    return star;
}

RatioPinning mix_with_universal(const WeightedTree& tree, const RatioPinning& base, const RatioPinning& star,
                                std::size_t k, std::size_t w, Ratio c) {
    RatioPinning out = base;
    for (const auto& [id, r] : star) {
        if (tree.nodes[id].depth < k) out[id] = r;
    }
    out[w] = c;
    return out;
}

double sigma_star_dominance_slack(const WeightedTree& tree, const RatioPinning& sigma, const RatioPinning& star,
                                  std::size_t w, Ratio c, std::size_t k) {
    RatioPinning lower = sigma;
    lower[w] = c;
    const auto tau = mix_with_universal(tree, sigma, star, k, w, c);
    const auto r_sigma = node_ratios(tree, lower);
    const auto r_tau = node_ratios(tree, tau);
    double slack = INFINITY;
    for (std::size_t u = 0; u < tree.size(); ++u) {
        if (tree.is_leaf(u)) continue;
        slack = std::min(slack, r_tau[u].value - r_sigma[u].value);
    }
    return slack;
}

CollapsedTree collapse_level(const WeightedTree& tree, const RatioPinning& pins, std::size_t w) {
    const std::size_t k = tree.nodes.at(w).depth;
    const auto ratios = node_ratios(tree, pins);
    CollapsedTree result;
    WeightedTree& out = result.tree;
    RatioPinning& collapsed_pins = result.pins;
    std::vector<std::size_t> remap(tree.size(), npos);
    for (std::size_t id = 0; id < tree.size(); ++id) {
        const auto& node = tree.nodes[id];
        if (node.depth > k) continue;
        WeightedNode copy = node;
        copy.children.clear();
        remap[id] = out.nodes.size();
        if (copy.parent != npos) {
            copy.parent = remap[copy.parent];
            out.nodes[copy.parent].children.push_back(remap[id]);
        }
        out.nodes.push_back(std::move(copy));
        if (id == w) continue;
        if (node.depth == k) {
            collapsed_pins[remap[id]] = ratios[id];
        } else if (auto it = pins.find(id); it != pins.end()) {
            collapsed_pins[remap[id]] = it->second;
        }
    }
    out.root = remap[tree.root];
    result.w = remap[w];
    return result;
}

MonotoneCheck verify_monotone_potential(const WeightedTree& tree, std::size_t w, const RatioPinning& rho,
                                        const ParamClass& pc, std::size_t n_global, std::size_t d2) {
    pc.validate();
    if (!(pc.lambda_bound < lambda0(pc))) throw RegimeError("the potential comparison needs lambda < lambda0");
    if (w >= tree.size() || !is_lambda_leaf(tree, w)) throw InputError("w must be a boundary leaf");
    const std::size_t k = tree.nodes[w].depth;
    const auto star = universal_pinning(tree, n_global, d2);
    auto root_value = [&](const RatioPinning& p) { return root_ratio(tree, p).value; };

    RatioPinning rho_inf = rho;
    rho_inf[w] = Ratio::inf();
    RatioPinning rho_zero = rho;
    rho_zero[w] = Ratio::of(0.0);
    MonotoneCheck out;
    out.discrepancy_rho = std::abs(root_value(rho_inf) - root_value(rho_zero));
    out.discrepancy_sigma = std::abs(root_value(mix_with_universal(tree, rho, star, k, w, Ratio::inf())) -
                                     root_value(mix_with_universal(tree, rho, star, k, w, Ratio::of(0.0))));

    RatioPinning rho_free = rho;
    rho_free.erase(w);
    const auto collapsed = collapse_level(tree, rho_free, w);
    RatioPinning a = collapsed.pins;
    a[collapsed.w] = Ratio::inf();
    RatioPinning b = collapsed.pins;
    b[collapsed.w] = Ratio::of(0.0);
    out.collapsed_rho = std::abs(root_ratio(collapsed.tree, a).value - root_ratio(collapsed.tree, b).value);
    return out;
}

double ratio_monotonicity_slack(double beta, double gamma, double x, double y, double xp, double yp) {
    auto ratio = [&](double a, double b) { return (beta * a + 1.0) / (a + gamma) * (b + gamma) / (beta * b + 1.0); };
    return ratio(x, y) - ratio(xp, yp);
}

} // namespace ferrospin
