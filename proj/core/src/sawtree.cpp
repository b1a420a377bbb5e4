#include "ferrospin/sawtree.hpp"

#include "ferrospin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ferrospin {

namespace {

class SawBuilder {
public:
    SawBuilder(const TwoSpinSystem& system, const SawOptions& options, SawTree& tree)
        : system_(system), options_(options), tree_(tree), position_(system.size(), npos) {}

    void grow(std::size_t id) {
        const std::size_t x = tree_.nodes[id].preimage;
        position_[x] = path_.size();
        path_.push_back(x);
        const std::size_t parent_vertex =
            tree_.nodes[id].parent == npos ? npos : tree_.nodes[tree_.nodes[id].parent].preimage;
        if (tree_.nodes[id].depth >= options_.max_depth && system_.degree(x) > (parent_vertex == npos ? 0 : 1)) {
            tree_.nodes[id].kind = NodeKind::Truncated;
        } else {
            for (const auto& inc : system_.neighbors(x)) {
                const std::size_t y = inc.vertex;
                if (y == parent_vertex) continue;
                const std::size_t child = add_node(id, y, inc.edge);
                if (position_[y] != npos) {
                    // v_i = y; its successor on the walk decides the pin.
                    const std::size_t successor = path_[position_[y] + 1];
                    auto& node = tree_.nodes[child];
                    node.kind = NodeKind::CycleClosing;
                    node.pin = successor > x ? Spin{0} : Spin{1};
                } else if (tree_.is_boundary[y]) {
                    tree_.nodes[child].kind = NodeKind::BoundaryCopy;
                } else {
                    grow(child);
                }
            }
            if (tree_.nodes[id].children.empty() && id != tree_.root) {
                tree_.nodes[id].kind = NodeKind::FreeLeaf;
            }
        }
        path_.pop_back();
        position_[x] = npos;
    }

    std::size_t add_node(std::size_t parent, std::size_t vertex, std::size_t edge) {
        if (tree_.nodes.size() >= options_.max_nodes) {
            throw CapacityError("SAW tree exceeds " + std::to_string(options_.max_nodes) + " nodes");
        }
        SawNode node;
        node.preimage = vertex;
        node.parent = parent;
        node.parent_edge = edge;
        node.depth = tree_.nodes[parent].depth + 1;
        tree_.nodes.push_back(std::move(node));
        const std::size_t id = tree_.nodes.size() - 1;
        tree_.nodes[parent].children.push_back(id);
        return id;
    }

private:
    const TwoSpinSystem& system_;
    const SawOptions& options_;
    SawTree& tree_;
    std::vector<std::size_t> position_;
    std::vector<std::size_t> path_;
};

} // namespace

std::vector<std::size_t> SawTree::walk(std::size_t id) const {
    std::vector<std::size_t> out;
    for (std::size_t u = id; u != npos; u = nodes[u].parent) out.push_back(nodes[u].preimage);
    std::reverse(out.begin(), out.end());
    return out;
}

SawTree build_saw_tree(const TwoSpinSystem& system, std::size_t v, const std::vector<std::size_t>& boundary,
                       const SawOptions& options) {
    if (v >= system.size()) throw InputError("root vertex out of range");
    SawTree tree;
    tree.is_boundary.assign(system.size(), 0);
    for (auto b : boundary) {
        if (b >= system.size()) throw InputError("boundary vertex out of range");
        tree.is_boundary[b] = 1;
    }
    if (tree.is_boundary[v]) throw InputError("root vertex lies in the boundary");
    SawNode root;
    root.preimage = v;
    tree.nodes.push_back(root);
    SawBuilder(system, options, tree).grow(0);
    return tree;
}

void pin_saw_tree(SawTree& tree, const Pinning& boundary_spins) {
    for (auto& node : tree.nodes) {
        if (node.kind != NodeKind::BoundaryCopy) continue;
        auto it = boundary_spins.find(node.preimage);
        if (it != boundary_spins.end()) node.pin = it->second;
    }
}

std::string verify_saw_structure(const SawTree& tree, const TwoSpinSystem& system) {
    std::ostringstream msg;
    for (std::size_t id = 0; id < tree.size(); ++id) {
        const auto& node = tree.nodes[id];
        const std::size_t deg_tree = node.children.size() + (node.parent == npos ? 0 : 1);
        const std::size_t deg_graph = system.degree(node.preimage);
        if (!node.children.empty()) {
            if (deg_tree != deg_graph) {
                msg << "node " << id << " (vertex " << node.preimage << ") has tree degree " << deg_tree
                    << " but graph degree " << deg_graph;
                return msg.str();
            }
            continue;
        }
        if (id == tree.root) {
            if (deg_graph != 0) return "root has no children but positive degree";
            continue;
        }
        const auto walk = tree.walk(id);
        const std::size_t x = walk.back();
        const bool repeats = std::find(walk.begin(), walk.end() - 1, x) != walk.end() - 1;
        const bool ok = (node.kind == NodeKind::BoundaryCopy && tree.is_boundary[x] && !repeats) ||
                        (node.kind == NodeKind::CycleClosing && repeats) ||
                        (node.kind == NodeKind::FreeLeaf && deg_graph == 1) ||
                        node.kind == NodeKind::Truncated;
        if (!ok) {
            msg << "leaf " << id << " (vertex " << x << ") fits none of the leaf kinds";
            return msg.str();
        }
    }
    return {};
}

WeightedTree weight_tree(const SawTree& tree, const TwoSpinSystem& system) {
    WeightedTree out;
    out.root = tree.root;
    out.nodes.resize(tree.size());
    for (std::size_t id = 0; id < tree.size(); ++id) {
        const auto& s = tree.nodes[id];
        auto& w = out.nodes[id];
        w.source = id;
        w.preimage = s.preimage;
        w.parent = s.parent;
        w.children = s.children;
        w.depth = s.depth;
        w.kind = s.kind;
        w.lambda = system.lambda(s.preimage);
        if (s.parent_edge != npos) {
            w.beta = system.edge(s.parent_edge).beta();
            w.gamma = system.edge(s.parent_edge).gamma();
        }
    }
    return out;
}

RatioPinning spin_pins_as_ratios(const SawTree& tree) {
    RatioPinning pins;
    for (std::size_t id = 0; id < tree.size(); ++id) {
        if (tree.nodes[id].pin) pins[id] = Ratio::from_spin(*tree.nodes[id].pin);
    }
    return pins;
}

WeightedTree prune_pinned_leaves(const SawTree& tree, const TwoSpinSystem& system) {
    const WeightedTree full = weight_tree(tree, system);
    WeightedTree out;
    std::vector<std::size_t> remap(full.size(), npos);
    // Nodes are stored in DFS preorder, so parents precede children.
    for (std::size_t id = 0; id < full.size(); ++id) {
        const auto& s = tree.nodes[id];
        if (s.pin && s.children.empty() && id != tree.root) continue;
        WeightedNode w = full.nodes[id];
        w.children.clear();
        double log_field = std::log(w.lambda);
        for (auto c : s.children) {
            const auto& cs = tree.nodes[c];
            if (!(cs.pin && cs.children.empty())) continue;
            const auto& e = system.edge(cs.parent_edge);
            log_field += *cs.pin == 0 ? e.log_beta : -e.log_gamma;
        }
        w.lambda = std::exp(log_field);
        remap[id] = out.nodes.size();
        if (w.parent != npos) {
            w.parent = remap[w.parent];
            out.nodes[w.parent].children.push_back(remap[id]);
        }
        out.nodes.push_back(std::move(w));
    }
    out.root = remap[tree.root];
    return out;
}

double recursion_factor(const Ratio& x, double beta, double gamma) {
    if (x.infinite) return beta;
    return (beta * x.value + 1.0) / (x.value + gamma);
}

Ratio tree_recursion_step(double lambda_u, const std::vector<ChildInput>& children) {
    double log_r = std::log(lambda_u);
    for (const auto& c : children) log_r += std::log(recursion_factor(c.x, c.beta, c.gamma));
    return Ratio::of(std::exp(log_r));
}

std::vector<Ratio> node_ratios(const WeightedTree& tree, const RatioPinning& pins) {
    std::vector<Ratio> r(tree.size());
    // Children always have larger ids than their parents.
    for (std::size_t k = tree.size(); k-- > 0;) {
        const auto& node = tree.nodes[k];
        if (auto it = pins.find(k); it != pins.end()) {
            r[k] = it->second;
            continue;
        }
        double log_r = std::log(node.lambda);
        for (auto c : node.children) {
            log_r += std::log(recursion_factor(r[c], tree.nodes[c].beta, tree.nodes[c].gamma));
        }
        r[k] = Ratio::of(std::exp(log_r));
    }
    return r;
}

Ratio root_ratio(const WeightedTree& tree, const RatioPinning& pins) {
    if (tree.size() == 0) throw InputError("empty tree");
    return node_ratios(tree, pins)[tree.root];
}

Marginal saw_marginal(const TwoSpinSystem& system, std::size_t v, const Pinning& pinning,
                      const SawOptions& options) {
    if (v >= system.size()) throw InputError("vertex out of range");
    if (auto it = pinning.find(v); it != pinning.end()) {
        return it->second == 0 ? Marginal{1.0, 0.0} : Marginal{0.0, 1.0};
    }
    std::vector<std::size_t> boundary;
    for (const auto& [u, s] : pinning) {
        if (s > 1) throw InputError("spin values must be 0 or 1");
        boundary.push_back(u);
    }
    SawTree tree = build_saw_tree(system, v, boundary, options);
    pin_saw_tree(tree, pinning);
    const Ratio r = root_ratio(weight_tree(tree, system), spin_pins_as_ratios(tree));
    return {r.p0(), r.p1()};
}

} // namespace ferrospin
