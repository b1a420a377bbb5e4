#include "ferrospin/samplers.hpp"

#include "ferrospin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ferrospin {

namespace {

double logistic_p1(double log_ratio) {
    // p1 = 1 / (1 + exp(log p0/p1)), stable for large |log_ratio|.
    if (log_ratio > 0) {
        const double e = std::exp(-log_ratio);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(log_ratio));
}

double log_sum_exp2(double a, double b) {
    const double m = std::max(a, b);
    if (m == -INFINITY) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Log weight of the factors touching vertices with in_set = 1.
double local_log_weight(const TwoSpinSystem& system, const Configuration& config,
                        const std::vector<std::size_t>& set, const std::vector<char>& in_set) {
    double lw = 0.0;
    for (auto w : set) {
        if (config[w] == 0) lw += system.log_lambda(w);
        for (const auto& inc : system.neighbors(w)) {
            const std::size_t y = inc.vertex;
            if (in_set[y] && y < w) continue; // counted from the smaller endpoint
            const auto& e = system.edge(inc.edge);
            if (config[w] == 0 && config[y] == 0) {
                lw += e.log_beta;
            } else if (config[w] == 1 && config[y] == 1) {
                lw += e.log_gamma;
            }
        }
    }
    return lw;
}

// P(X_v = 1) given config outside `pending` (which contains v), with the
// other pending vertices marginalised.
double pending_conditional(const TwoSpinSystem& system, Configuration& config, std::size_t v,
                           const std::vector<char>& pending) {
    // Component of v among pending vertices; the rest factor out.
    std::vector<std::size_t> comp{v};
    std::vector<char> in_comp(system.size(), 0);
    in_comp[v] = 1;
    for (std::size_t i = 0; i < comp.size(); ++i) {
        for (const auto& inc : system.neighbors(comp[i])) {
            if (pending[inc.vertex] && !in_comp[inc.vertex]) {
                in_comp[inc.vertex] = 1;
                comp.push_back(inc.vertex);
            }
        }
    }
    if (comp.size() == 1) return site_conditional(system, config, v);
    if (comp.size() > kMaxEnumeratedBlock) {
        throw CapacityError("block component of size " + std::to_string(comp.size()) +
                            " exceeds the enumeration cap");
    }
    const Configuration saved = config;
    double log0 = -INFINITY;
    double log1 = -INFINITY;
    const std::uint64_t count = std::uint64_t{1} << comp.size();
    for (std::uint64_t m = 0; m < count; ++m) {
        for (std::size_t i = 0; i < comp.size(); ++i) config[comp[i]] = static_cast<Spin>((m >> i) & 1U);
        const double lw = local_log_weight(system, config, comp, in_comp);
        if (m & 1U) {
            log1 = log_sum_exp2(log1, lw);
        } else {
            log0 = log_sum_exp2(log0, lw);
        }
    }
    config = saved;
    return logistic_p1(log0 - log1);
}

void check_config(const TwoSpinSystem& system, const Configuration& config) {
    if (config.size() != system.size()) throw InputError("configuration length does not match system");
}

std::vector<double> draw(RandomSource& rng, std::size_t k) {
    std::vector<double> r(k);
    for (auto& x : r) x = rng.uniform();
    return r;
}

} // namespace

std::string to_string(ScheduleKind kind) {
    switch (kind) {
    case ScheduleKind::Glauber: return "glauber";
    case ScheduleKind::HeatBath: return "heat-bath";
    case ScheduleKind::SystematicScan: return "systematic-scan";
    case ScheduleKind::AlternatingScan: return "alternating-scan";
    case ScheduleKind::FieldDynamics: return "field";
    }
    return "unknown";
}

ScheduleKind parse_schedule_kind(const std::string& name) {
    for (auto k : {ScheduleKind::Glauber, ScheduleKind::HeatBath, ScheduleKind::SystematicScan,
                   ScheduleKind::AlternatingScan, ScheduleKind::FieldDynamics}) {
        if (to_string(k) == name) return k;
    }
    throw InputError("unknown schedule '" + name + "'");
}

UpdateSchedule UpdateSchedule::glauber(std::size_t n) {
    UpdateSchedule s;
    s.kind = ScheduleKind::Glauber;
    for (std::size_t v = 0; v < n; ++v) s.blocks.push_back({v});
    return s;
}

UpdateSchedule UpdateSchedule::heat_bath(std::vector<Block> blocks) {
    if (blocks.empty()) throw InputError("heat-bath schedule needs at least one block");
    UpdateSchedule s;
    s.kind = ScheduleKind::HeatBath;
    s.blocks = std::move(blocks);
    return s;
}

UpdateSchedule UpdateSchedule::systematic_scan(std::vector<Block> blocks) {
    UpdateSchedule s;
    s.kind = ScheduleKind::SystematicScan;
    s.blocks = std::move(blocks);
    return s;
}

UpdateSchedule UpdateSchedule::alternating_scan(const Bipartition& parts) {
    UpdateSchedule s;
    s.kind = ScheduleKind::AlternatingScan;
    s.blocks = {parts.part1, parts.part0};
    return s;
}

UpdateSchedule UpdateSchedule::field(double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) throw InputError("field dynamics needs theta in (0, 1]");
    UpdateSchedule s;
    s.kind = ScheduleKind::FieldDynamics;
    s.theta = theta;
    return s;
}

std::size_t UpdateSchedule::draws_per_step(std::size_t n) const {
    switch (kind) {
    case ScheduleKind::Glauber:
    case ScheduleKind::HeatBath: return 1 + n;
    case ScheduleKind::SystematicScan:
    case ScheduleKind::AlternatingScan: return blocks.size() * n;
    case ScheduleKind::FieldDynamics: return 2 * n;
    }
    return 0;
}

UpdateSchedule UpdateSchedule::censored(const std::vector<std::size_t>& keep) const {
    if (kind == ScheduleKind::FieldDynamics) throw InputError("field dynamics has no blocks to censor");
    UpdateSchedule s = *this;
    s.blocks = censor_blocks(blocks, keep);
    return s;
}

Matrix UpdateSchedule::kernel(const TwoSpinSystem& system) const {
    switch (kind) {
    case ScheduleKind::Glauber: return glauber_matrix(system);
    case ScheduleKind::HeatBath: return heat_bath_matrix(system, blocks);
    case ScheduleKind::SystematicScan:
    case ScheduleKind::AlternatingScan: return scan_matrix(system, blocks);
    case ScheduleKind::FieldDynamics: return field_dynamics_matrix(system, theta);
    }
    throw InputError("unknown schedule");
}

std::string UpdateSchedule::describe() const {
    std::ostringstream out;
    out << to_string(kind);
    if (kind == ScheduleKind::FieldDynamics) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", theta);
        out << "(theta=" << buf << ")";
    } else if (kind != ScheduleKind::Glauber) {
        out << '[';
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (i) out << '|';
            for (std::size_t j = 0; j < blocks[i].size(); ++j) out << (j ? " " : "") << blocks[i][j];
        }
        out << ']';
    }
    return out.str();
}

double site_conditional(const TwoSpinSystem& system, const Configuration& config, std::size_t v) {
    double log_ratio = system.log_lambda(v);
    for (const auto& inc : system.neighbors(v)) {
        const auto& e = system.edge(inc.edge);
        log_ratio += config[inc.vertex] == 0 ? e.log_beta : -e.log_gamma;
    }
    return logistic_p1(log_ratio);
}

void block_update(const TwoSpinSystem& system, Configuration& config, const Block& block,
                  std::span<const double> r) {
    check_config(system, config);
    if (r.size() < system.size()) throw InputError("need one uniform per vertex");
    Block order = block;
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    std::vector<char> pending(system.size(), 0);
    for (auto v : order) {
        if (v >= system.size()) throw InputError("block vertex out of range");
        pending[v] = 1;
    }
    for (auto v : order) {
        const double p1 = pending_conditional(system, config, v, pending);
        config[v] = r[v] <= p1 ? Spin{1} : Spin{0};
        pending[v] = 0;
    }
}

void apply_step(const TwoSpinSystem& system, const UpdateSchedule& schedule, Configuration& config,
                std::span<const double> r) {
    check_config(system, config);
    const std::size_t n = system.size();
    if (r.size() < schedule.draws_per_step(n)) throw InputError("not enough uniforms for one step");
    switch (schedule.kind) {
    case ScheduleKind::Glauber:
    case ScheduleKind::HeatBath: {
        const std::size_t b = schedule.blocks.size();
        if (b == 0) return;
        const auto i = std::min(b - 1, static_cast<std::size_t>(r[0] * static_cast<double>(b)));
        block_update(system, config, schedule.blocks[i], r.subspan(1, n));
        return;
    }
    case ScheduleKind::SystematicScan:
    case ScheduleKind::AlternatingScan:
        for (std::size_t i = 0; i < schedule.blocks.size(); ++i) {
            block_update(system, config, schedule.blocks[i], r.subspan(i * n, n));
        }
        return;
    case ScheduleKind::FieldDynamics: {
        Block s;
        for (std::size_t v = 0; v < n; ++v) {
            if (config[v] == 1 || r[v] < schedule.theta) s.push_back(v);
        }
        block_update(tilt(system, schedule.theta), config, s, r.subspan(n, n));
        return;
    }
    }
}

void glauber_step(const TwoSpinSystem& system, ChainState& state, RandomSource& rng) {
    check_config(system, state.config);
    if (system.size() == 0) return;
    const std::size_t v = rng.below(system.size());
    state.config[v] = rng.uniform() <= site_conditional(system, state.config, v) ? Spin{1} : Spin{0};
    ++state.step;
}

void block_resample(const TwoSpinSystem& system, Configuration& config, const Block& block, RandomSource& rng) {
    const auto r = draw(rng, system.size());
    block_update(system, config, block, r);
}

void alternating_scan_step(const TwoSpinSystem& system, const Bipartition& parts, ChainState& state,
                           RandomSource& rng) {
    if (!is_independent_set(system, parts.part0) || !is_independent_set(system, parts.part1)) {
        throw InputError("parts not independent sets");
    }
    const std::uint64_t t = state.step + 1;
    block_resample(system, state.config, t % 2 == 1 ? parts.part1 : parts.part0, rng);
    state.step = t;
}

void schedule_step(const TwoSpinSystem& system, const UpdateSchedule& schedule, ChainState& state,
                   RandomSource& rng) {
    const auto r = draw(rng, schedule.draws_per_step(system.size()));
    apply_step(system, schedule, state.config, r);
    ++state.step;
}

void censored_step(const TwoSpinSystem& system, const UpdateSchedule& schedule,
                   const std::vector<std::size_t>& keep, ChainState& state, RandomSource& rng) {
    schedule_step(system, schedule.censored(keep), state, rng);
}

void field_dynamics_step(const TwoSpinSystem& system, double theta, ChainState& state, RandomSource& rng) {
    schedule_step(system, UpdateSchedule::field(theta), state, rng);
}

bool dominates(const Configuration& a, const Configuration& b) {
    if (a.size() != b.size()) throw InputError("configurations differ in length");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
    }
    return true;
}

void monotone_coupled_step(const TwoSpinSystem& system, const UpdateSchedule& schedule, CoupledPair& pair,
                           std::span<const double> r) {
    if (!schedule.monotone()) throw InputError(to_string(schedule.kind) + " has no monotone coupling");
    apply_step(system, schedule, pair.upper, r);
    apply_step(system, schedule, pair.lower, r);
    if (!dominates(pair.upper, pair.lower)) throw CouplingError("coupled chains lost their order");
}

std::optional<std::size_t> coupling_time(const TwoSpinSystem& system, const UpdateSchedule& schedule,
                                         RandomSource& rng, std::size_t cap) {
    const std::size_t n = system.size();
    CoupledPair pair{Configuration(n, 1), Configuration(n, 0)};
    if (pair.coalesced()) return 0;
    const std::size_t k = schedule.draws_per_step(n);
    for (std::size_t t = 1; t <= cap; ++t) {
        const auto r = draw(rng, k);
        monotone_coupled_step(system, schedule, pair, r);
        if (pair.coalesced()) return t;
    }
    return std::nullopt;
}

Trajectory run_chain(const TwoSpinSystem& system, const UpdateSchedule& schedule, std::size_t steps,
                     std::uint64_t seed, std::size_t record_every) {
    if (record_every == 0) throw InputError("record interval must be positive");
    const std::size_t n = system.size();
    RandomSource rng(seed);
    Trajectory out;
    out.seed = seed;
    out.schedule = schedule.describe();
    CoupledPair pair{Configuration(n, 1), Configuration(n, 0)};
    const bool coupled = schedule.monotone();
    auto record = [&](std::uint64_t t) {
        out.rows.push_back({t, hamming_weight(pair.upper), coupled ? int(pair.coalesced()) : -1});
    };
    record(0);
    const std::size_t k = schedule.draws_per_step(n);
    for (std::size_t t = 1; t <= steps; ++t) {
        const auto r = draw(rng, k);
        if (coupled) {
            monotone_coupled_step(system, schedule, pair, r);
        } else {
            apply_step(system, schedule, pair.upper, r);
        }
        if (t % record_every == 0 || t == steps) record(t);
    }
    out.final_state = pair.upper;
    return out;
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::ostringstream out;
    out << "# seed=" << trajectory.seed << " schedule=" << trajectory.schedule << '\n';
    out << "step,hamming_weight,coupled_flag\n";
    for (const auto& row : trajectory.rows) {
        out << row.step << ',' << row.hamming_weight << ',' << row.coupled << '\n';
    }
    return out.str();
}

WarmStartReport warm_start_check(const TwoSpinSystem& system, const Configuration& config, double big_n) {
    check_config(system, config);
    if (!(big_n >= 1.0)) throw InputError("N must be at least 1");
    const double cut = 100.0 * std::pow(big_n, 5.0);
    WarmStartReport rep;
    for (std::size_t v = 0; v < system.size(); ++v) {
        if (config[v] == 0 && system.log_lambda(v) <= -std::log(cut)) rep.bad_vertices.push_back(v);
    }
    for (std::size_t e = 0; e < system.edges().size(); ++e) {
        const auto& ed = system.edge(e);
        if (ed.log_gamma >= std::log(cut) && (config[ed.u] == 0 || config[ed.v] == 0)) rep.bad_edges.push_back(e);
    }
    return rep;
}

} // namespace ferrospin
