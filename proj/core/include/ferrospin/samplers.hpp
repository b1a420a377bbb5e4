#pragma once

#include "ferrospin/exact.hpp"
#include "ferrospin/model.hpp"
#include "ferrospin/random.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ferrospin {

inline constexpr std::size_t kMaxEnumeratedBlock = 20;

enum class ScheduleKind { Glauber, HeatBath, SystematicScan, AlternatingScan, FieldDynamics };

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& name);

struct UpdateSchedule {
    ScheduleKind kind = ScheduleKind::Glauber;
    std::vector<Block> blocks;
    double theta = 0.0; // field dynamics only

    static UpdateSchedule glauber(std::size_t n);
    static UpdateSchedule heat_bath(std::vector<Block> blocks);
    static UpdateSchedule systematic_scan(std::vector<Block> blocks);
    // One step is a full scan: part1 then part0.
    static UpdateSchedule alternating_scan(const Bipartition& parts);
    static UpdateSchedule field(double theta);

    bool monotone() const { return kind != ScheduleKind::FieldDynamics; }
    // Uniforms consumed per step by the threshold rule: one selector plus one
    // per vertex for every block update in the step.
    std::size_t draws_per_step(std::size_t n) const;
    // Blocks restricted to keep.
    UpdateSchedule censored(const std::vector<std::size_t>& keep) const;
    // Exact kernel of one step.
    Matrix kernel(const TwoSpinSystem& system) const;
    std::string describe() const;
};

struct ChainState {
    Configuration config;
    std::uint64_t step = 0;
};

// P(X_v = 1 | rest of config).
double site_conditional(const TwoSpinSystem& system, const Configuration& config, std::size_t v);

// Updates the block in increasing vertex order; vertex w is set to 1 iff
// r[w] <= its conditional probability of 1 given everything outside the
// not-yet-updated part of the block.
void block_update(const TwoSpinSystem& system, Configuration& config, const Block& block,
                  std::span<const double> r);

// One step of the schedule driven by explicit uniforms (size draws_per_step).
void apply_step(const TwoSpinSystem& system, const UpdateSchedule& schedule, Configuration& config,
                std::span<const double> r);

void glauber_step(const TwoSpinSystem& system, ChainState& state, RandomSource& rng);
void block_resample(const TwoSpinSystem& system, Configuration& config, const Block& block, RandomSource& rng);
// Half-step t (counting from 1) updates part (t mod 2).
void alternating_scan_step(const TwoSpinSystem& system, const Bipartition& parts, ChainState& state,
                           RandomSource& rng);
void schedule_step(const TwoSpinSystem& system, const UpdateSchedule& schedule, ChainState& state,
                   RandomSource& rng);
void censored_step(const TwoSpinSystem& system, const UpdateSchedule& schedule,
                   const std::vector<std::size_t>& keep, ChainState& state, RandomSource& rng);
// S = ones plus each zero with probability theta; resample S from the
// theta-tilted conditional given the rest.
void field_dynamics_step(const TwoSpinSystem& system, double theta, ChainState& state, RandomSource& rng);

// Componentwise a >= b.
bool dominates(const Configuration& a, const Configuration& b);

struct CoupledPair {
    Configuration upper;
    Configuration lower;

    bool coalesced() const { return upper == lower; }
};

// Both chains consume the same uniforms. Throws CouplingError if the order is lost.
void monotone_coupled_step(const TwoSpinSystem& system, const UpdateSchedule& schedule, CoupledPair& pair,
                           std::span<const double> r);

// Steps until the all-ones and all-zeros chains meet, or nullopt at the cap.
std::optional<std::size_t> coupling_time(const TwoSpinSystem& system, const UpdateSchedule& schedule,
                                         RandomSource& rng, std::size_t cap);

struct TrajectoryRow {
    std::uint64_t step = 0;
    std::size_t hamming_weight = 0;
    int coupled = -1; // -1 when the schedule has no monotone coupling
};

struct Trajectory {
    std::uint64_t seed = 0;
    std::string schedule;
    std::vector<TrajectoryRow> rows;
    Configuration final_state;
};

// Runs from all-ones. For monotone schedules an all-zeros chain is driven by
// the same uniforms and the coupled flag records whether they have met.
Trajectory run_chain(const TwoSpinSystem& system, const UpdateSchedule& schedule, std::size_t steps,
                     std::uint64_t seed, std::size_t record_every = 1);
std::string trajectory_csv(const Trajectory& trajectory);

struct WarmStartReport {
    std::vector<std::size_t> bad_vertices;
    std::vector<std::size_t> bad_edges;
    bool ok() const { return bad_vertices.empty() && bad_edges.empty(); }
};

// Vertex u is bad when lambda_u <= 1/(100 N^5) and it is 0; edge e is bad when
// gamma_e >= 100 N^5 and some endpoint is 0.
WarmStartReport warm_start_check(const TwoSpinSystem& system, const Configuration& config, double big_n);

} // namespace ferrospin
