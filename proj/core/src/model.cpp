#include "ferrospin/model.hpp"

#include "ferrospin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace ferrospin {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

} // namespace

double Edge::beta() const { return std::exp(log_beta); }
double Edge::gamma() const { return std::exp(log_gamma); }

TwoSpinSystem TwoSpinSystem::from_values(std::size_t n, const std::vector<double>& lambda,
                                         const std::vector<EdgeParams>& edges) {
    if (lambda.size() != n) {
        throw InputError("lambda has " + std::to_string(lambda.size()) + " entries, expected " +
                         std::to_string(n));
    }
    std::vector<double> log_lambda(n);
    for (std::size_t v = 0; v < n; ++v) {
        if (!positive_finite(lambda[v])) {
            throw InputError("lambda[" + std::to_string(v) + "] must be positive and finite");
        }
        log_lambda[v] = std::log(lambda[v]);
    }
    std::vector<Edge> logs;
    logs.reserve(edges.size());
    for (const auto& e : edges) {
        if (!positive_finite(e.beta) || !positive_finite(e.gamma)) {
            throw InputError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                             ") needs positive finite beta and gamma");
        }
        logs.push_back({e.u, e.v, std::log(e.beta), std::log(e.gamma)});
    }
    return from_logs(n, std::move(log_lambda), std::move(logs));
}

TwoSpinSystem TwoSpinSystem::from_logs(std::size_t n, std::vector<double> log_lambda,
                                       std::vector<Edge> edges) {
    if (log_lambda.size() != n) {
        throw InputError("log_lambda size does not match vertex count");
    }
    for (double l : log_lambda) {
        if (!std::isfinite(l)) throw InputError("vertex field must be finite in log space");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto& e : edges) {
        if (e.u >= n || e.v >= n) throw InputError("edge endpoint out of range");
        if (e.u == e.v) throw InputError("self-loop at vertex " + std::to_string(e.u));
        if (!std::isfinite(e.log_beta) || !std::isfinite(e.log_gamma)) {
            throw InputError("edge parameters must be finite in log space");
        }
        if (e.u > e.v) std::swap(e.u, e.v);
        if (!seen.insert({e.u, e.v}).second) {
            throw InputError("duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
        }
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    TwoSpinSystem s;
    s.log_lambda_ = std::move(log_lambda);
    s.edges_ = std::move(edges);
    s.build_adjacency();
    return s;
}

void TwoSpinSystem::build_adjacency() {
    adjacency_.assign(log_lambda_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        adjacency_[edges_[e].u].push_back({edges_[e].v, e});
        adjacency_[edges_[e].v].push_back({edges_[e].u, e});
    }
    for (auto& list : adjacency_) {
        std::sort(list.begin(), list.end(),
                  [](const Incidence& a, const Incidence& b) { return a.vertex < b.vertex; });
    }
}

std::size_t TwoSpinSystem::max_degree() const {
    std::size_t d = 0;
    for (const auto& list : adjacency_) d = std::max(d, list.size());
    return d;
}

double TwoSpinSystem::lambda(std::size_t v) const { return std::exp(log_lambda_[v]); }

std::optional<std::size_t> TwoSpinSystem::find_edge(std::size_t u, std::size_t v) const {
    if (u >= size() || v >= size()) return std::nullopt;
    for (const auto& inc : adjacency_[u]) {
        if (inc.vertex == v) return inc.edge;
    }
    return std::nullopt;
}

double TwoSpinSystem::log_weight(const Configuration& config) const {
    if (config.size() != size()) throw InputError("configuration length does not match system");
    double lw = 0.0;
    for (std::size_t v = 0; v < size(); ++v) {
        if (config[v] == 0) lw += log_lambda_[v];
    }
    for (const auto& e : edges_) {
        if (config[e.u] == 0 && config[e.v] == 0) {
            lw += e.log_beta;
        } else if (config[e.u] == 1 && config[e.v] == 1) {
            lw += e.log_gamma;
        }
    }
    return lw;
}

double TwoSpinSystem::log_weight_mask(std::uint64_t mask) const {
    double lw = 0.0;
    for (std::size_t v = 0; v < size(); ++v) {
        if (((mask >> v) & 1U) == 0) lw += log_lambda_[v];
    }
    for (const auto& e : edges_) {
        const auto a = (mask >> e.u) & 1U;
        const auto b = (mask >> e.v) & 1U;
        if (a == 0 && b == 0) {
            lw += e.log_beta;
        } else if (a == 1 && b == 1) {
            lw += e.log_gamma;
        }
    }
    return lw;
}

double TwoSpinSystem::weight(const Configuration& config) const { return std::exp(log_weight(config)); }

std::optional<Bipartition> two_coloring(const TwoSpinSystem& system) {
    const std::size_t n = system.size();
    std::vector<int> color(n, -1);
    for (std::size_t s = 0; s < n; ++s) {
        if (color[s] != -1) continue;
        color[s] = 0;
        std::queue<std::size_t> q;
        q.push(s);
        while (!q.empty()) {
            const auto x = q.front();
            q.pop();
            for (const auto& inc : system.neighbors(x)) {
                if (color[inc.vertex] == -1) {
                    color[inc.vertex] = 1 - color[x];
                    q.push(inc.vertex);
                } else if (color[inc.vertex] == color[x]) {
                    return std::nullopt;
                }
            }
        }
    }
    Bipartition b;
    for (std::size_t v = 0; v < n; ++v) (color[v] == 0 ? b.part0 : b.part1).push_back(v);
    return b;
}

bool is_independent_set(const TwoSpinSystem& system, const std::vector<std::size_t>& set) {
    std::vector<char> in(system.size(), 0);
    for (auto v : set) {
        if (v >= system.size()) throw InputError("vertex out of range in set");
        in[v] = 1;
    }
    for (const auto& e : system.edges()) {
        if (in[e.u] && in[e.v]) return false;
    }
    return true;
}

Bipartition RbmParams::bipartition() const {
    Bipartition b;
    for (std::size_t v = 0; v < n0; ++v) b.part0.push_back(v);
    for (std::size_t v = n0; v < n0 + n1; ++v) b.part1.push_back(v);
    return b;
}

void RbmParams::validate() const {
    const std::size_t n = size();
    if (theta.size() != n) throw InputError("theta must have n0+n1 entries");
    if (weights.size() != n) throw InputError("W must be (n0+n1) x (n0+n1)");
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i].size() != n) throw InputError("W must be square");
        if (!std::isfinite(theta[i])) throw InputError("theta must be finite");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = weights[i][j];
            if (!std::isfinite(w)) throw InputError("W entries must be finite");
            if (w != weights[j][i]) throw InputError("W must be symmetric");
            const bool same_side = (i < n0) == (j < n0);
            if (same_side && w != 0.0) {
                throw InputError("W has a nonzero entry inside one side of the bipartition");
            }
        }
    }
}

TwoSpinSystem rbm_to_two_spin(const RbmParams& rbm) {
    rbm.validate();
    const std::size_t n = rbm.size();
    std::vector<double> log_lambda(n);
    for (std::size_t v = 0; v < n; ++v) log_lambda[v] = -rbm.theta[v];
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < rbm.n0; ++i) {
        for (std::size_t j = rbm.n0; j < n; ++j) {
            const double w = rbm.weights[i][j];
            if (w != 0.0) edges.push_back({i, j, 0.0, w});
        }
    }
    return TwoSpinSystem::from_logs(n, std::move(log_lambda), std::move(edges));
}

double energy(const RbmParams& rbm, const Configuration& config) {
    const std::size_t n = rbm.size();
    if (config.size() != n) throw InputError("configuration length does not match RBM");
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (config[i] == 0) continue;
        e += rbm.theta[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (config[j] == 1) e += rbm.weights[i][j];
        }
    }
    return e;
}

PinnedSystem apply_pinning(const TwoSpinSystem& system, const Pinning& pinning) {
    const std::size_t n = system.size();
    for (const auto& [v, s] : pinning) {
        if (v >= n) throw InputError("pinned vertex " + std::to_string(v) + " out of range");
        if (s > 1) throw InputError("spin values must be 0 or 1");
    }
    PinnedSystem out;
    out.from_original.assign(n, npos);
    for (std::size_t v = 0; v < n; ++v) {
        if (pinning.count(v) == 0) {
            out.from_original[v] = out.to_original.size();
            out.to_original.push_back(v);
        }
    }
    std::vector<double> log_lambda;
    log_lambda.reserve(out.to_original.size());
    for (auto v : out.to_original) {
        double l = system.log_lambda(v);
        for (const auto& inc : system.neighbors(v)) {
            auto it = pinning.find(inc.vertex);
            if (it == pinning.end()) continue;
            const auto& e = system.edge(inc.edge);
            l += it->second == 0 ? e.log_beta : -e.log_gamma;
        }
        log_lambda.push_back(l);
    }
    std::vector<Edge> edges;
    for (const auto& e : system.edges()) {
        const auto a = out.from_original[e.u];
        const auto b = out.from_original[e.v];
        if (a != npos && b != npos) edges.push_back({a, b, e.log_beta, e.log_gamma});
    }
    out.system = TwoSpinSystem::from_logs(out.to_original.size(), std::move(log_lambda), std::move(edges));
    return out;
}

void ParamClass::validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw InputError("class beta must lie in (0, 1]");
    if (!(gamma > 1.0 && std::isfinite(gamma))) throw InputError("class gamma must exceed 1");
    if (!(beta * gamma > 1.0)) throw InputError("class needs beta * gamma > 1");
    if (!positive_finite(lambda_bound)) throw InputError("lambda bound must be positive");
}

double lambda0(double beta, double gamma) { return std::sqrt(gamma / beta); }

double lambda_c(double beta, double gamma) {
    const double s = std::sqrt(beta * gamma);
    if (!(s > 1.0)) throw RegimeError("lambda_c needs beta * gamma > 1");
    return std::pow(gamma / beta, s / (s - 1.0));
}

std::string class_violation(const TwoSpinSystem& system, const ParamClass& pc) {
    pc.validate();
    std::ostringstream msg;
    for (std::size_t v = 0; v < system.size(); ++v) {
        if (!(system.lambda(v) < pc.lambda_bound)) {
            msg << "lambda[" << v << "] = " << system.lambda(v) << " is not below " << pc.lambda_bound;
            return msg.str();
        }
    }
    for (const auto& e : system.edges()) {
        const double b = e.beta();
        const double g = e.gamma();
        const double prod = std::exp(e.log_beta + e.log_gamma);
        if (!(b <= pc.beta)) {
            msg << "edge (" << e.u << "," << e.v << ") beta " << b << " exceeds " << pc.beta;
        } else if (!(g >= pc.gamma)) {
            msg << "edge (" << e.u << "," << e.v << ") gamma " << g << " is below " << pc.gamma;
        } else if (!(prod > 1.0)) {
            msg << "edge (" << e.u << "," << e.v << ") has beta*gamma <= 1";
        } else if (!(prod <= pc.beta * pc.gamma)) {
            msg << "edge (" << e.u << "," << e.v << ") beta*gamma " << prod << " exceeds "
                << pc.beta * pc.gamma;
        } else {
            continue;
        }
        return msg.str();
    }
    return {};
}

bool classify(const TwoSpinSystem& system, const ParamClass& pc) {
    return class_violation(system, pc).empty();
}

TwoSpinSystem tilt(const TwoSpinSystem& system, const std::vector<double>& theta) {
    if (theta.size() != system.size()) throw InputError("tilt vector length does not match system");
    std::vector<double> log_lambda(system.size());
    for (std::size_t v = 0; v < system.size(); ++v) {
        if (!positive_finite(theta[v])) throw InputError("tilt factors must be positive");
        log_lambda[v] = system.log_lambda(v) + std::log(theta[v]);
    }
    return TwoSpinSystem::from_logs(system.size(), std::move(log_lambda), system.edges());
}

TwoSpinSystem tilt(const TwoSpinSystem& system, double theta) {
    return tilt(system, std::vector<double>(system.size(), theta));
}

std::size_t hamming_weight(const Configuration& config) {
    return static_cast<std::size_t>(std::count(config.begin(), config.end(), Spin{1}));
}

Configuration mask_to_config(std::uint64_t mask, std::size_t n) {
    Configuration c(n);
    for (std::size_t v = 0; v < n; ++v) c[v] = static_cast<Spin>((mask >> v) & 1U);
    return c;
}

std::uint64_t config_to_mask(const Configuration& config) {
    if (config.size() > 63) throw CapacityError("configuration too long for a bit mask");
    std::uint64_t m = 0;
    for (std::size_t v = 0; v < config.size(); ++v) {
        if (config[v]) m |= std::uint64_t{1} << v;
    }
    return m;
}

} // namespace ferrospin
