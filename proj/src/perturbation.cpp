#include "edvqe/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "edvqe/errors.hpp"
#include "edvqe/rng.hpp"

namespace edvqe {

double flip_delta(const WeightedGraph &graph, std::span<const std::uint8_t> bits, std::size_t v) {
    if (bits.size() != graph.n_vertices()) {
        throw DimensionError("assignment length does not match the graph");
    }
    if (v >= graph.n_vertices()) {
        throw DimensionError("vertex " + std::to_string(v) + " out of range");
    }
    double delta = 0.0;
    for (const auto &nb : graph.neighbors(v)) {
        delta += bits[nb.vertex] == bits[v] ? nb.w : -nb.w;
    }
    return delta;
}

double improvement_tolerance(const WeightedGraph &graph) {
    return 1e-9 * std::max(1.0, graph.max_abs_weight());
}

Cns1Result cns1_search(const WeightedGraph &graph, const CutAssignment &start) {
    const std::size_t n = graph.n_vertices();
    if (start.bits.size() != n) {
        throw DimensionError("assignment length does not match the graph");
    }
    Bits bits = start.bits;
    std::vector<double> delta(n);
    for (std::size_t v = 0; v < n; ++v) {
        delta[v] = flip_delta(graph, bits, v);
    }
    const double tol = improvement_tolerance(graph);
    Cns1Result result;
    while (true) {
        std::size_t chosen = n;
        double best = tol;
        for (std::size_t v = 0; v < n; ++v) {
            if (delta[v] > best) {
                best = delta[v];
                chosen = v;
            }
        }
        if (chosen == n) {
            break;
        }
        bits[chosen] ^= 1;
        delta[chosen] = -delta[chosen];
        for (const auto &nb : graph.neighbors(chosen)) {
            delta[nb.vertex] += bits[nb.vertex] == bits[chosen] ? 2.0 * nb.w : -2.0 * nb.w;
        }
        result.moves.push_back(chosen);
    }
    result.assignment = make_assignment(graph, std::move(bits));
    return result;
}

CutAssignment cns1(const WeightedGraph &graph, const CutAssignment &start) {
    return cns1_search(graph, start).assignment;
}

Qp2Circuit build_qp2(const CutAssignment &assignment, const SubsystemLayout &layout,
                     std::optional<std::size_t> pair_budget, std::uint64_t seed,
                     double theta_halfwidth) {
    if (assignment.bits.size() != layout.n_vertices()) {
        throw DimensionError("assignment length does not match the layout");
    }
    if (!(theta_halfwidth >= 0.0)) {
        throw InvalidConfig("theta half-width must be non-negative");
    }
    Rng rng(seed);
    Qp2Circuit out;
    for (const auto &verts : layout.blocks()) {
        const std::size_t n = verts.size();
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (assignment.bits[verts[a]] != assignment.bits[verts[b]]) {
                    pairs.emplace_back(a, b);
                }
            }
        }
        if (pair_budget && *pair_budget < pairs.size()) {
            for (std::size_t k = 0; k < *pair_budget; ++k) {
                std::swap(pairs[k], pairs[k + rng.below(pairs.size() - k)]);
            }
            pairs.resize(*pair_budget);
            std::sort(pairs.begin(), pairs.end());
        }

        std::vector<Gate> gates;
        std::vector<double> params;
        for (std::size_t q = 0; q < n; ++q) {
            gates.push_back({GateKind::rx, {q, 0}, q});
            params.push_back(assignment.bits[verts[q]] ? std::numbers::pi : 0.0);
        }
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            gates.push_back({GateKind::rxx, {pairs[k].first, pairs[k].second}, n + k});
            params.push_back(rng.uniform(-theta_halfwidth, theta_halfwidth));
        }
        out.circuits.emplace_back(n, std::move(gates), params.size());
        out.params.push_back(std::move(params));
        out.pairs.push_back(std::move(pairs));
    }
    return out;
}

void EdvqeConfig::validate() const {
    if (subsystem_size < 1 || subsystem_size > kMaxQubits) {
        throw InvalidConfig("subsystem_size must lie in [1, " + std::to_string(kMaxQubits) + "]");
    }
    if (ansatz_layers < 1) {
        throw InvalidConfig("ansatz_layers must be at least 1");
    }
    if (m_samples < 1) {
        throw InvalidConfig("m_samples must be at least 1");
    }
    if (outer_patience < 1) {
        throw InvalidConfig("outer_patience must be at least 1");
    }
    if (max_outer_iters < 1) {
        throw InvalidConfig("max_outer_iters must be at least 1");
    }
    if (!(theta_init_halfwidth >= 0.0)) {
        throw InvalidConfig("theta_init_halfwidth must be non-negative");
    }
    inner_optimizer.validate();
    qp2_optimizer.validate();
}

CutAssignment qp2_optimize(const WeightedGraph &graph, const SubsystemLayout &layout,
                           const CutAssignment &incumbent, const EdvqeConfig &config,
                           std::uint64_t seed) {
    auto setup = build_qp2(incumbent, layout, config.pair_budget, derive_seed(seed, 0),
                           config.theta_init_halfwidth);
    auto opt = optimize(graph, layout, setup.circuits, std::move(setup.params),
                        config.qp2_optimizer);
    const DistributedState state(graph, layout, std::move(setup.circuits), std::move(opt.params));
    auto decoded = decode_solution(state, graph, config.m_samples, derive_seed(seed, 1));
    if (decoded.cut > incumbent.cut + improvement_tolerance(graph)) {
        return decoded;
    }
    return incumbent;
}

double SolveResult::cns1_stage_cut() const {
    return per_outer_iteration.empty() ? initial.cut : per_outer_iteration.front().after_cns1;
}

namespace {

SolveResult refine(const WeightedGraph &graph, const SubsystemLayout &layout,
                   CutAssignment initial, const EdvqeConfig &config, std::uint64_t seed) {
    SolveResult result;
    result.initial = initial;
    result.best = initial;
    const double tol = improvement_tolerance(graph);
    CutAssignment incumbent = std::move(initial);
    std::size_t stale = 0;
    for (std::size_t it = 0; it < config.max_outer_iters; ++it) {
        OuterIteration record;
        incumbent = cns1(graph, incumbent);
        record.after_cns1 = incumbent.cut;
        try {
            incumbent = qp2_optimize(graph, layout, incumbent, config, derive_seed(seed, it));
        } catch (const NumericError &) {
            // Keep the CNS-1 result and stop refining.
            record.after_qp2 = incumbent.cut;
            result.per_outer_iteration.push_back(record);
            result.iterations_run = it + 1;
            if (incumbent.cut > result.best.cut + tol) {
                result.best = incumbent;
            }
            break;
        }
        record.after_qp2 = incumbent.cut;
        result.per_outer_iteration.push_back(record);
        result.iterations_run = it + 1;
        if (incumbent.cut > result.best.cut + tol) {
            result.best = incumbent;
            stale = 0;
        } else if (++stale >= config.outer_patience) {
            break;
        }
    }
    return result;
}

} // namespace

SolveResult edvqe_solve(const WeightedGraph &graph, const EdvqeConfig &config, std::uint64_t seed) {
    config.validate();
    const auto layout = partition_vertices(graph.n_vertices(), config.subsystem_size);
    auto circuits = build_ansatze(layout, config.ansatz_layers);
    auto init = random_parameters(circuits, 0.0, 2.0 * std::numbers::pi, derive_seed(seed, 1));
    auto opt = optimize(graph, layout, circuits, std::move(init), config.inner_optimizer);
    const DistributedState state(graph, layout, std::move(circuits), opt.params);
    auto initial = decode_solution(state, graph, config.m_samples, derive_seed(seed, 2));

    auto result = refine(graph, layout, std::move(initial), config, derive_seed(seed, 3));
    result.seed = seed;
    result.initial_energy_trace = std::move(opt.energy_trace);
    result.initial_params = std::move(opt.params);
    return result;
}

SolveResult warm_start_solve(const WeightedGraph &graph, const CutAssignment &initial,
                             const EdvqeConfig &config, std::uint64_t seed) {
    config.validate();
    const auto layout = partition_vertices(graph.n_vertices(), config.subsystem_size);
    auto start = make_assignment(graph, initial.bits);
    auto result = refine(graph, layout, std::move(start), config, derive_seed(seed, 3));
    result.seed = seed;
    return result;
}

} // namespace edvqe
