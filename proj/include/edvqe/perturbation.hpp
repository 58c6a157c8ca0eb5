#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "edvqe/dvqe.hpp"
#include "edvqe/graph.hpp"

namespace edvqe {

/// Cut change from flipping vertex v: same-side neighbors become cut (+w),
/// cut neighbors become uncut (-w).
double flip_delta(const WeightedGraph &graph, std::span<const std::uint8_t> bits, std::size_t v);

/// Minimum gain for a flip to count as a strict improvement, scaled to the
/// graph's weights so rounding noise never registers as progress.
double improvement_tolerance(const WeightedGraph &graph);

struct Cns1Result {
    CutAssignment assignment;
    /// Vertex flipped at each pass, in order.
    std::vector<std::size_t> moves;
};

/// Best-improvement single-flip search iterated to a 1-flip local optimum.
/// Each pass moves to the best of the N flip neighbors (lowest index on
/// ties) if it strictly improves the incumbent.
Cns1Result cns1_search(const WeightedGraph &graph, const CutAssignment &start);

CutAssignment cns1(const WeightedGraph &graph, const CutAssignment &start);

/// Subsystem circuits encoding an incumbent plus swap gates.
///
/// Per block: one RX(phi_q) per qubit (phi = pi where the bit is 1), then
/// one RXX(theta_k) per selected qubit pair whose bits differ. Parameters
/// are laid out as the phi block followed by the theta block.
struct Qp2Circuit {
    std::vector<AnsatzCircuit> circuits;
    BlockParams params;
    /// Selected (local a, local b) pairs per block, a < b.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs;
};

inline constexpr double kDefaultThetaHalfwidth = 0.01 * std::numbers::pi;

/// pair_budget = nullopt selects every cross-partition pair of a block;
/// otherwise a seeded random subset of that size (or all, if fewer exist).
Qp2Circuit build_qp2(const CutAssignment &assignment, const SubsystemLayout &layout,
                     std::optional<std::size_t> pair_budget, std::uint64_t seed,
                     double theta_halfwidth = kDefaultThetaHalfwidth);

struct EdvqeConfig {
    std::size_t subsystem_size = 10;
    std::size_t ansatz_layers = 2;
    OptimizerConfig inner_optimizer{};
    OptimizerConfig qp2_optimizer{.learning_rate = 0.02, .max_iters = 150};
    std::size_t m_samples = 64;
    std::size_t outer_patience = 3;
    std::size_t max_outer_iters = 20;
    double theta_init_halfwidth = kDefaultThetaHalfwidth;
    std::optional<std::size_t> pair_budget;

    void validate() const;
};

/// Optimizes the QP-2 circuits on the expected cut, decodes, and returns the
/// better of the decoded assignment and the incumbent (incumbent on ties).
CutAssignment qp2_optimize(const WeightedGraph &graph, const SubsystemLayout &layout,
                           const CutAssignment &incumbent, const EdvqeConfig &config,
                           std::uint64_t seed);

struct OuterIteration {
    double after_cns1 = 0.0;
    double after_qp2 = 0.0;
};

struct SolveResult {
    CutAssignment best;
    CutAssignment initial;
    std::vector<OuterIteration> per_outer_iteration;
    std::size_t iterations_run = 0;
    std::uint64_t seed = 0;
    /// Energy trace of the initial DVQE phase (empty for warm starts).
    std::vector<double> initial_energy_trace;
    /// Optimized initial-phase parameters per block (empty for warm starts).
    BlockParams initial_params;

    /// Cut after the first CNS-1 pass (the initial cut if no iteration ran).
    double cns1_stage_cut() const;
    /// Stage gains: first CNS-1 over the initial cut, and everything after
    /// it (QP-2 plus subsequent refinement) over the first CNS-1 result.
    double delta_cns1() const { return cns1_stage_cut() - initial.cut; }
    double delta_qp2() const { return best.cut - cns1_stage_cut(); }
};

/// DVQE initial solution, then {CNS-1; QP-2} until the best cut has not
/// improved for outer_patience iterations or max_outer_iters is reached.
SolveResult edvqe_solve(const WeightedGraph &graph, const EdvqeConfig &config, std::uint64_t seed);

/// The outer refinement loop started from a given assignment.
SolveResult warm_start_solve(const WeightedGraph &graph, const CutAssignment &initial,
                             const EdvqeConfig &config, std::uint64_t seed);

} // namespace edvqe
