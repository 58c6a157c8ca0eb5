#include "edvqe/dvqe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "edvqe/rng.hpp"

namespace edvqe {

SubsystemLayout::SubsystemLayout(std::vector<std::vector<std::size_t>> blocks,
                                 std::size_t subsystem_size)
    : blocks_(std::move(blocks)), subsystem_size_(subsystem_size) {
    std::size_t n = 0;
    for (const auto &b : blocks_) {
        if (b.empty()) {
            throw LayoutError("empty subsystem block");
        }
        if (b.size() > subsystem_size_) {
            throw LayoutError("block larger than the subsystem size");
        }
        n += b.size();
    }
    block_of_.assign(n, kNone);
    local_index_.assign(n, 0);
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto &b = blocks_[bi];
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (k > 0 && b[k] <= b[k - 1]) {
                throw LayoutError("block indices must be strictly increasing");
            }
            if (b[k] >= n || block_of_[b[k]] != kNone) {
                throw LayoutError("blocks do not partition the vertex set");
            }
            block_of_[b[k]] = bi;
            local_index_[b[k]] = k;
        }
    }
}

std::size_t SubsystemLayout::block_of(std::size_t v) const {
    if (v >= block_of_.size()) {
        throw LayoutError("vertex " + std::to_string(v) + " not in layout");
    }
    return block_of_[v];
}

std::size_t SubsystemLayout::local_index(std::size_t v) const {
    if (v >= local_index_.size()) {
        throw LayoutError("vertex " + std::to_string(v) + " not in layout");
    }
    return local_index_[v];
}

SubsystemLayout partition_vertices(std::size_t n_vertices, std::size_t subsystem_size) {
    if (subsystem_size < 1 || subsystem_size > kMaxQubits) {
        throw InvalidConfig("subsystem size must lie in [1, " + std::to_string(kMaxQubits) + "]");
    }
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t start = 0; start < n_vertices; start += subsystem_size) {
        std::vector<std::size_t> block;
        for (std::size_t v = start; v < std::min(n_vertices, start + subsystem_size); ++v) {
            block.push_back(v);
        }
        blocks.push_back(std::move(block));
    }
    return SubsystemLayout(std::move(blocks), subsystem_size);
}

AnsatzCircuit build_ansatz(std::size_t block_size, std::size_t layers) {
    if (block_size < 1 || layers < 1) {
        throw InvalidConfig("ansatz needs at least one qubit and one layer");
    }
    std::vector<Gate> gates;
    std::size_t p = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t q = 0; q < block_size; ++q) {
            gates.push_back({GateKind::rx, {q, 0}, p++});
        }
        for (std::size_t q = 0; q + 1 < block_size; ++q) {
            gates.push_back({GateKind::rzx, {q, q + 1}, p++});
        }
    }
    return AnsatzCircuit(block_size, std::move(gates), p);
}

std::vector<AnsatzCircuit> build_ansatze(const SubsystemLayout &layout, std::size_t layers) {
    std::vector<AnsatzCircuit> circuits;
    circuits.reserve(layout.block_count());
    for (const auto &b : layout.blocks()) {
        circuits.push_back(build_ansatz(b.size(), layers));
    }
    return circuits;
}

BlockParams random_parameters(const std::vector<AnsatzCircuit> &circuits, double lo, double hi,
                              std::uint64_t seed) {
    Rng rng(seed);
    BlockParams params;
    params.reserve(circuits.size());
    for (const auto &c : circuits) {
        std::vector<double> p(c.n_params());
        for (auto &x : p) {
            x = lo + (hi - lo) * rng.uniform();
        }
        params.push_back(std::move(p));
    }
    return params;
}

std::vector<double> flatten(const BlockParams &params) {
    std::vector<double> flat;
    for (const auto &p : params) {
        flat.insert(flat.end(), p.begin(), p.end());
    }
    return flat;
}

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0.0)) {
        throw InvalidConfig("learning_rate must be positive");
    }
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
        throw InvalidConfig("Adam betas must lie in (0, 1)");
    }
    if (!(epsilon > 0.0)) {
        throw InvalidConfig("epsilon must be positive");
    }
    if (max_iters < 1) {
        throw InvalidConfig("max_iters must be at least 1");
    }
    if (grad_tol < 0.0 || energy_tol < 0.0) {
        throw InvalidConfig("tolerances must be non-negative");
    }
}

namespace {

void check_circuits(const SubsystemLayout &layout, const std::vector<AnsatzCircuit> &circuits,
                    const BlockParams &params) {
    if (circuits.size() != layout.block_count() || params.size() != layout.block_count()) {
        throw LayoutError("need one circuit and one parameter vector per block");
    }
    for (std::size_t b = 0; b < circuits.size(); ++b) {
        if (circuits[b].n_qubits() != layout.blocks()[b].size()) {
            throw LayoutError("circuit width differs from its block size");
        }
        if (params[b].size() != circuits[b].n_params()) {
            throw DimensionError("parameter count mismatch in block " + std::to_string(b));
        }
    }
}

void check_graph(const WeightedGraph &graph, const SubsystemLayout &layout) {
    if (graph.n_vertices() != layout.n_vertices()) {
        throw LayoutError("layout covers " + std::to_string(layout.n_vertices()) +
                          " vertices, graph has " + std::to_string(graph.n_vertices()));
    }
}

} // namespace

DistributedState::DistributedState(const WeightedGraph &graph, SubsystemLayout layout,
                                   std::vector<AnsatzCircuit> circuits, BlockParams params)
    : layout_(std::move(layout)), circuits_(std::move(circuits)), params_(std::move(params)) {
    check_graph(graph, layout_);
    check_circuits(layout_, circuits_, params_);
    const auto &edges = graph.edges();
    edge_block_.assign(edges.size(), kCross);
    edge_local_.assign(edges.size(), {0, 0});
    edge_zz_.assign(edges.size(), 0.0);
    block_edges_.assign(layout_.block_count(), {});
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto bu = layout_.block_of(edges[e].u);
        if (bu == layout_.block_of(edges[e].v)) {
            edge_block_[e] = bu;
            edge_local_[e] = {layout_.local_index(edges[e].u), layout_.local_index(edges[e].v)};
            block_edges_[bu].push_back(e);
        }
    }
    z_.assign(layout_.n_vertices(), 1.0);
    states_.reserve(circuits_.size());
    for (std::size_t b = 0; b < circuits_.size(); ++b) {
        states_.push_back(run_circuit(circuits_[b], params_[b]));
        refresh(b);
    }
}

void DistributedState::refresh(std::size_t block) {
    const auto &s = states_[block];
    const auto z = expect_z_all(s);
    const auto &verts = layout_.blocks()[block];
    for (std::size_t k = 0; k < verts.size(); ++k) {
        z_[verts[k]] = z[k];
    }
    for (auto e : block_edges_[block]) {
        edge_zz_[e] = expect_zz(s, edge_local_[e].first, edge_local_[e].second);
    }
}

double DistributedState::intra_zz(std::size_t edge_index) const {
    if (edge_index >= edge_block_.size() || edge_block_[edge_index] == kCross) {
        throw LayoutError("edge " + std::to_string(edge_index) + " is not intra-block");
    }
    return edge_zz_[edge_index];
}

void DistributedState::set_block_params(std::size_t block, std::vector<double> params) {
    if (block >= circuits_.size()) {
        throw DimensionError("block index out of range");
    }
    states_[block] = run_circuit(circuits_[block], params);
    params_[block] = std::move(params);
    refresh(block);
}

double distributed_energy(const WeightedGraph &graph, const SubsystemLayout &layout,
                          const DistributedState &dstate) {
    check_graph(graph, layout);
    if (!(layout == dstate.layout()) || dstate.edge_count() != graph.edge_count()) {
        throw LayoutError("distributed state was built for a different layout or graph");
    }
    const auto &z = dstate.z();
    double energy = 0.0;
    const auto &edges = graph.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double zz =
            dstate.is_intra(e) ? dstate.intra_zz(e) : z[edges[e].u] * z[edges[e].v];
        energy += edges[e].w / 2.0 * (1.0 - zz);
    }
    return energy;
}

namespace {

// Sum of the edge terms that touch `block`, given that block's state and
// the other blocks' <Z> values. Energy differences in the parameter-shift
// rule only depend on these terms.
double block_local_energy(const WeightedGraph &graph, const SubsystemLayout &layout,
                          std::size_t block, const Statevector &state,
                          const std::vector<double> &z_global) {
    const auto z_local = expect_z_all(state);
    double energy = 0.0;
    for (const auto &e : graph.edges()) {
        const auto bu = layout.block_of(e.u);
        const auto bv = layout.block_of(e.v);
        if (bu != block && bv != block) {
            continue;
        }
        double zz = 0.0;
        if (bu == bv) {
            zz = expect_zz(state, layout.local_index(e.u), layout.local_index(e.v));
        } else {
            const double zu = bu == block ? z_local[layout.local_index(e.u)] : z_global[e.u];
            const double zv = bv == block ? z_local[layout.local_index(e.v)] : z_global[e.v];
            zz = zu * zv;
        }
        energy += e.w / 2.0 * (1.0 - zz);
    }
    return energy;
}

} // namespace

std::vector<double> energy_gradient(const WeightedGraph &graph, const SubsystemLayout &layout,
                                    const std::vector<AnsatzCircuit> &circuits,
                                    const BlockParams &params) {
    const DistributedState base(graph, layout, circuits, params);
    const auto &z = base.z();
    std::vector<double> grad;
    constexpr double kShift = std::numbers::pi / 2.0;
    for (std::size_t b = 0; b < circuits.size(); ++b) {
        const auto &circuit = circuits[b];
        std::vector<double> block_grad(circuit.n_params(), 0.0);
        const auto &gates = circuit.gates();
        // Shift each gate occurrence separately; a parameter shared by
        // several gates collects the sum of their contributions.
        auto shifted_energy = [&](std::size_t gate_index, double offset) {
            Statevector s(circuit.n_qubits());
            for (std::size_t g = 0; g < gates.size(); ++g) {
                double theta = params[b][gates[g].param_index];
                if (g == gate_index) {
                    theta += offset;
                }
                apply_gate(s, gates[g], theta);
            }
            return block_local_energy(graph, layout, b, s, z);
        };
        for (std::size_t g = 0; g < gates.size(); ++g) {
            const double plus = shifted_energy(g, kShift);
            const double minus = shifted_energy(g, -kShift);
            block_grad[gates[g].param_index] += 0.5 * (plus - minus);
        }
        grad.insert(grad.end(), block_grad.begin(), block_grad.end());
    }
    return grad;
}

std::vector<double> adjoint_gradient(const AnsatzCircuit &circuit, std::span<const double> params,
                                     const Statevector &psi, std::span<const double> diagonal) {
    if (params.size() != circuit.n_params()) {
        throw DimensionError("parameter count mismatch");
    }
    if (psi.n_qubits() != circuit.n_qubits() || diagonal.size() != psi.size()) {
        throw DimensionError("state or diagonal does not match the circuit width");
    }
    Statevector phi = psi;
    Statevector lambda = psi;
    auto lam = lambda.amplitudes();
    for (std::size_t k = 0; k < lam.size(); ++k) {
        lam[k] *= diagonal[k];
    }
    std::vector<double> grad(circuit.n_params(), 0.0);
    const auto &gates = circuit.gates();
    for (std::size_t g = gates.size(); g-- > 0;) {
        const double theta = params[gates[g].param_index];
        apply_gate(phi, gates[g], -theta);
        apply_gate(lambda, gates[g], -theta);
        // d<D>/dtheta = 2 Re<lambda| (-i/2) G |phi> = Im<lambda|G|phi>
        const double im = generator_overlap_imag(lambda, phi, gates[g]);
        grad[gates[g].param_index] += im;
    }
    return grad;
}

DistributedObjective::DistributedObjective(const WeightedGraph &graph,
                                           const SubsystemLayout &layout)
    : layout_(layout) {
    check_graph(graph, layout_);
    const auto nb = layout_.block_count();
    intra_diagonal_.resize(nb);
    std::vector<std::vector<Edge>> intra(nb);
    cross_neighbors_.assign(layout_.n_vertices(), {});
    for (const auto &e : graph.edges()) {
        const auto bu = layout_.block_of(e.u);
        const auto bv = layout_.block_of(e.v);
        if (bu == bv) {
            intra[bu].push_back({layout_.local_index(e.u), layout_.local_index(e.v), e.w});
        } else {
            cross_edges_.push_back(e);
            cross_neighbors_[e.u].push_back({e.v, e.w});
            cross_neighbors_[e.v].push_back({e.u, e.w});
        }
    }
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t dim = std::size_t{1} << layout_.blocks()[b].size();
        auto &diag = intra_diagonal_[b];
        diag.assign(dim, 0.0);
        for (std::size_t k = 0; k < dim; ++k) {
            double cut = 0.0;
            for (const auto &e : intra[b]) {
                if (((k >> e.u) ^ (k >> e.v)) & 1) {
                    cut += e.w;
                }
            }
            diag[k] = cut;
        }
    }
}

DistributedObjective::Evaluation
DistributedObjective::evaluate(const std::vector<AnsatzCircuit> &circuits,
                               const BlockParams &params) const {
    check_circuits(layout_, circuits, params);
    Evaluation out;
    out.z.assign(layout_.n_vertices(), 1.0);
    out.states.reserve(circuits.size());
    double energy = 0.0;
    for (std::size_t b = 0; b < circuits.size(); ++b) {
        out.states.push_back(run_circuit(circuits[b], params[b]));
        const auto &s = out.states.back();
        energy += expect_diagonal(s, intra_diagonal_[b]);
        const auto z = expect_z_all(s);
        const auto &verts = layout_.blocks()[b];
        for (std::size_t k = 0; k < verts.size(); ++k) {
            out.z[verts[k]] = z[k];
        }
    }
    for (const auto &e : cross_edges_) {
        energy += e.w / 2.0 * (1.0 - out.z[e.u] * out.z[e.v]);
    }
    out.energy = energy;
    return out;
}

BlockParams DistributedObjective::gradient(const std::vector<AnsatzCircuit> &circuits,
                                           const BlockParams &params,
                                           const Evaluation &at) const {
    BlockParams grad(circuits.size());
    std::vector<double> diag;
    std::vector<double> shift;
    for (std::size_t b = 0; b < circuits.size(); ++b) {
        const auto &verts = layout_.blocks()[b];
        // Other blocks act on this one through the field h_v = sum w <Z_u>;
        // each cross edge adds -(w/2) <Z_u> Z_v to the block operator.
        std::vector<double> field(verts.size(), 0.0);
        for (std::size_t k = 0; k < verts.size(); ++k) {
            for (const auto &nb : cross_neighbors_[verts[k]]) {
                field[k] += nb.w * at.z[nb.vertex];
            }
        }
        // shift(idx) = sum_k (bit k of idx ? h_k : -h_k), built by adding
        // the lowest set bit to an already computed index.
        shift.assign(intra_diagonal_[b].size(), 0.0);
        for (double h : field) {
            shift[0] -= h;
        }
        for (std::size_t idx = 1; idx < shift.size(); ++idx) {
            const auto low = static_cast<std::size_t>(std::countr_zero(idx));
            shift[idx] = shift[idx & (idx - 1)] + 2.0 * field[low];
        }
        diag = intra_diagonal_[b];
        for (std::size_t idx = 0; idx < diag.size(); ++idx) {
            diag[idx] += 0.5 * shift[idx];
        }
        grad[b] = adjoint_gradient(circuits[b], params[b], at.states[b], diag);
    }
    return grad;
}

std::string to_string(StopReason reason) {
    switch (reason) {
    case StopReason::max_iters:
        return "max_iters";
    case StopReason::energy_stalled:
        return "energy_stalled";
    case StopReason::small_gradient:
        return "small_gradient";
    }
    return "unknown";
}

namespace {

BlockParams compute_gradient(const WeightedGraph &graph, const SubsystemLayout &layout,
                             const std::vector<AnsatzCircuit> &circuits, const BlockParams &params,
                             const DistributedObjective &objective,
                             const DistributedObjective::Evaluation &at, GradientMethod method) {
    if (method == GradientMethod::adjoint) {
        return objective.gradient(circuits, params, at);
    }
    const auto flat = energy_gradient(graph, layout, circuits, params);
    BlockParams grad(params.size());
    std::size_t offset = 0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        grad[b].assign(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                       flat.begin() + static_cast<std::ptrdiff_t>(offset + params[b].size()));
        offset += params[b].size();
    }
    return grad;
}

} // namespace

OptimizeResult optimize(const WeightedGraph &graph, const SubsystemLayout &layout,
                        const std::vector<AnsatzCircuit> &circuits, BlockParams init_params,
                        const OptimizerConfig &config) {
    config.validate();
    check_circuits(layout, circuits, init_params);
    const DistributedObjective objective(graph, layout);

    OptimizeResult result;
    BlockParams params = std::move(init_params);
    auto eval = objective.evaluate(circuits, params);
    if (!std::isfinite(eval.energy)) {
        throw OptimizationDiverged("non-finite initial energy", {eval.energy});
    }
    result.energy_trace.push_back(eval.energy);
    result.best_energy = eval.energy;
    result.params = params;

    BlockParams m1(params.size());
    BlockParams m2(params.size());
    for (std::size_t b = 0; b < params.size(); ++b) {
        m1[b].assign(params[b].size(), 0.0);
        m2[b].assign(params[b].size(), 0.0);
    }
    double beta1_t = 1.0;
    double beta2_t = 1.0;
    std::size_t stalled = 0;

    for (std::size_t it = 1; it <= config.max_iters; ++it) {
        const auto grad =
            compute_gradient(graph, layout, circuits, params, objective, eval, config.gradient);
        double norm2 = 0.0;
        for (const auto &g : grad) {
            for (double x : g) {
                norm2 += x * x;
            }
        }
        if (!std::isfinite(norm2)) {
            throw OptimizationDiverged("non-finite gradient", result.energy_trace);
        }
        if (std::sqrt(norm2) < config.grad_tol) {
            result.stop = StopReason::small_gradient;
            break;
        }
        beta1_t *= config.beta1;
        beta2_t *= config.beta2;
        for (std::size_t b = 0; b < params.size(); ++b) {
            for (std::size_t k = 0; k < params[b].size(); ++k) {
                const double g = grad[b][k];
                m1[b][k] = config.beta1 * m1[b][k] + (1.0 - config.beta1) * g;
                m2[b][k] = config.beta2 * m2[b][k] + (1.0 - config.beta2) * g * g;
                const double mhat = m1[b][k] / (1.0 - beta1_t);
                const double vhat = m2[b][k] / (1.0 - beta2_t);
                // Ascent: the expected cut is maximized.
                params[b][k] += config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
            }
        }
        const double previous = eval.energy;
        eval = objective.evaluate(circuits, params);
        result.iterations = it;
        if (!std::isfinite(eval.energy)) {
            result.energy_trace.push_back(eval.energy);
            throw OptimizationDiverged("non-finite energy at iteration " + std::to_string(it),
                                       result.energy_trace);
        }
        result.energy_trace.push_back(eval.energy);
        if (eval.energy > result.best_energy) {
            result.best_energy = eval.energy;
            result.params = params;
        }
        stalled = std::abs(eval.energy - previous) < config.energy_tol ? stalled + 1 : 0;
        if (stalled >= config.patience) {
            result.stop = StopReason::energy_stalled;
            break;
        }
    }
    return result;
}

CutAssignment decode_solution(const DistributedState &dstate, const WeightedGraph &graph,
                              std::size_t m_samples, std::uint64_t seed) {
    const auto &layout = dstate.layout();
    check_graph(graph, layout);
    const std::size_t n = graph.n_vertices();

    Bits rounded(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        rounded[v] = dstate.z()[v] < 0.0 ? 1 : 0;
    }
    CutAssignment best = make_assignment(graph, std::move(rounded));

    Rng rng(seed);
    std::vector<std::vector<std::uint64_t>> draws;
    draws.reserve(layout.block_count());
    for (std::size_t b = 0; b < layout.block_count(); ++b) {
        draws.push_back(sample_indices(dstate.state(b), m_samples, rng));
    }
    Bits candidate(n, 0);
    for (std::size_t s = 0; s < m_samples; ++s) {
        for (std::size_t b = 0; b < layout.block_count(); ++b) {
            const auto &verts = layout.blocks()[b];
            for (std::size_t k = 0; k < verts.size(); ++k) {
                candidate[verts[k]] = static_cast<std::uint8_t>((draws[b][s] >> k) & 1);
            }
        }
        const double cut = cut_value(graph, candidate);
        if (cut > best.cut) {
            best = {candidate, cut};
        }
    }
    return best;
}

} // namespace edvqe
