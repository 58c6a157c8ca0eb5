#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edvqe/errors.hpp"
#include "edvqe/graph.hpp"
#include "edvqe/statevector.hpp"

namespace edvqe {

/// Assignment of graph vertices to subsystems (one statevector each).
class SubsystemLayout {
public:
    SubsystemLayout() = default;
    /// Blocks must partition {0, ..., N-1}, be strictly increasing inside,
    /// and hold at most `subsystem_size` vertices each.
    SubsystemLayout(std::vector<std::vector<std::size_t>> blocks, std::size_t subsystem_size);

    const std::vector<std::vector<std::size_t>> &blocks() const { return blocks_; }
    std::size_t block_count() const { return blocks_.size(); }
    std::size_t subsystem_size() const { return subsystem_size_; }
    std::size_t n_vertices() const { return block_of_.size(); }

    std::size_t block_of(std::size_t v) const;
    std::size_t local_index(std::size_t v) const;

    bool operator==(const SubsystemLayout &other) const { return blocks_ == other.blocks_; }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    std::vector<std::vector<std::size_t>> blocks_;
    std::size_t subsystem_size_ = 0;
    std::vector<std::size_t> block_of_;
    std::vector<std::size_t> local_index_;
};

/// ceil(N / size) contiguous blocks; the last one may be shorter.
SubsystemLayout partition_vertices(std::size_t n_vertices, std::size_t subsystem_size);

/// Per layer: RX on every qubit, then RZX on (q, q+1) along the chain.
/// Every gate owns a distinct parameter: layers * (2 * block_size - 1).
AnsatzCircuit build_ansatz(std::size_t block_size, std::size_t layers);

/// One ansatz per block of the layout.
std::vector<AnsatzCircuit> build_ansatze(const SubsystemLayout &layout, std::size_t layers);

/// Parameters grouped per subsystem.
using BlockParams = std::vector<std::vector<double>>;

BlockParams random_parameters(const std::vector<AnsatzCircuit> &circuits, double lo, double hi,
                              std::uint64_t seed);

std::vector<double> flatten(const BlockParams &params);

enum class GradientMethod { adjoint, parameter_shift };

struct OptimizerConfig {
    double learning_rate = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t max_iters = 300;
    /// Stop once the gradient norm falls below this; 0 disables the test.
    double grad_tol = 0.0;
    double energy_tol = 1e-6;
    std::size_t patience = 20;
    GradientMethod gradient = GradientMethod::adjoint;

    void validate() const;
};

/// Subsystem circuits, their parameters and cached single-block expectations.
///
/// Caches <Z_v> for every vertex and <Z_u Z_v> for every edge whose
/// endpoints share a block; both are refreshed whenever a block's
/// parameters change.
class DistributedState {
public:
    DistributedState(const WeightedGraph &graph, SubsystemLayout layout,
                     std::vector<AnsatzCircuit> circuits, BlockParams params);

    const SubsystemLayout &layout() const { return layout_; }
    const std::vector<AnsatzCircuit> &circuits() const { return circuits_; }
    const BlockParams &params() const { return params_; }
    const Statevector &state(std::size_t block) const { return states_[block]; }

    /// <Z_v> indexed by global vertex.
    const std::vector<double> &z() const { return z_; }

    /// Cached <Z_u Z_v> for intra-block edge `edge_index` of the graph this
    /// state was built for; throws LayoutError for cross-block edges.
    double intra_zz(std::size_t edge_index) const;
    bool is_intra(std::size_t edge_index) const { return edge_block_[edge_index] != kCross; }
    std::size_t edge_count() const { return edge_block_.size(); }

    void set_block_params(std::size_t block, std::vector<double> params);

private:
    static constexpr std::size_t kCross = static_cast<std::size_t>(-1);

    void refresh(std::size_t block);

    SubsystemLayout layout_;
    std::vector<AnsatzCircuit> circuits_;
    BlockParams params_;
    std::vector<Statevector> states_;
    std::vector<double> z_;
    // Per edge: owning block or kCross; local endpoints for intra edges.
    std::vector<std::size_t> edge_block_;
    std::vector<std::pair<std::size_t, std::size_t>> edge_local_;
    std::vector<double> edge_zz_;
    std::vector<std::vector<std::size_t>> block_edges_;
};

/// Expected cut of the product state, summed edge by edge in edge-list
/// order: w/2 (1 - <Z_u Z_v>) with <Z_u Z_v> = <Z_u><Z_v> across blocks.
double distributed_energy(const WeightedGraph &graph, const SubsystemLayout &layout,
                          const DistributedState &dstate);

/// Parameter-shift gradient of the expected cut, flattened in block order.
/// Each shifted evaluation re-simulates only the owning block.
std::vector<double> energy_gradient(const WeightedGraph &graph, const SubsystemLayout &layout,
                                    const std::vector<AnsatzCircuit> &circuits,
                                    const BlockParams &params);

/// Gradient of <psi(params)| D |psi(params)> for a diagonal D by reverse-mode
/// (adjoint) differentiation. `psi` must be the circuit's output state.
std::vector<double> adjoint_gradient(const AnsatzCircuit &circuit, std::span<const double> params,
                                     const Statevector &psi, std::span<const double> diagonal);

/// Precomputed form of the expected cut used inside the optimizer: every
/// block contributes <psi_b| D_b |psi_b> with D_b its intra-block cut
/// diagonal, cross-block edges contribute through <Z> products.
class DistributedObjective {
public:
    DistributedObjective(const WeightedGraph &graph, const SubsystemLayout &layout);

    struct Evaluation {
        std::vector<Statevector> states;
        std::vector<double> z;
        double energy = 0.0;
    };

    Evaluation evaluate(const std::vector<AnsatzCircuit> &circuits,
                        const BlockParams &params) const;

    /// Exact gradient per block given an evaluation at the same parameters.
    BlockParams gradient(const std::vector<AnsatzCircuit> &circuits, const BlockParams &params,
                         const Evaluation &at) const;

private:
    SubsystemLayout layout_;
    std::vector<std::vector<double>> intra_diagonal_;
    std::vector<Edge> cross_edges_;
    // Cross-block neighbors per vertex, used for the mean field on a block.
    std::vector<std::vector<Neighbor>> cross_neighbors_;
};

enum class StopReason { max_iters, energy_stalled, small_gradient };

std::string to_string(StopReason reason);

struct OptimizeResult {
    /// Best-so-far parameters (the ones achieving best_energy).
    BlockParams params;
    /// Energy before the first step, then after every Adam step.
    std::vector<double> energy_trace;
    double best_energy = 0.0;
    std::size_t iterations = 0;
    StopReason stop = StopReason::max_iters;
};

/// Raised when the objective turns non-finite; carries the trace so far.
class OptimizationDiverged : public NumericError {
public:
    OptimizationDiverged(const std::string &what, std::vector<double> trace)
        : NumericError(what), trace_(std::move(trace)) {}
    const std::vector<double> &trace() const { return trace_; }

private:
    std::vector<double> trace_;
};

/// Adam gradient ascent on the expected cut. Stops at max_iters, when the
/// gradient norm drops below grad_tol, or when |dE| < energy_tol for
/// `patience` consecutive steps. Deterministic for fixed inputs.
OptimizeResult optimize(const WeightedGraph &graph, const SubsystemLayout &layout,
                        const std::vector<AnsatzCircuit> &circuits, BlockParams init_params,
                        const OptimizerConfig &config);

/// Best of the sign-rounded string (bit 1 iff <Z_v> < 0) and m_samples
/// product-state samples; ties keep the earliest candidate.
CutAssignment decode_solution(const DistributedState &dstate, const WeightedGraph &graph,
                              std::size_t m_samples, std::uint64_t seed);

} // namespace edvqe
