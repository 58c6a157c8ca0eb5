#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "edvqe/graph.hpp"

namespace edvqe {

struct GwConfig {
    /// Embedding dimension; 0 selects min(N, ceil(sqrt(2N)) + 1), at least 2.
    std::size_t rank = 0;
    std::size_t ascent_iters = 500;
    /// Step size relative to 1 / (max weighted degree).
    double ascent_lr = 1.0;
    std::size_t restarts = 3;
    std::size_t projections = 100;

    void validate() const;
};

std::size_t default_rank(std::size_t n_vertices);

/// Unit vectors v_i (row-major, n_vertices x rank) and the relaxation value
/// 1/4 sum w_ij |v_i - v_j|^2 they attain.
struct EmbeddingSolution {
    std::size_t n_vertices = 0;
    std::size_t rank = 0;
    std::vector<double> vectors;
    double relaxation_value = 0.0;

    std::span<const double> vector(std::size_t i) const {
        return {vectors.data() + i * rank, rank};
    }
};

/// 1/4 sum w_ij |v_i - v_j|^2 for a given embedding.
double relaxation_objective(const WeightedGraph &graph, const EmbeddingSolution &embedding);

/// Low-rank (Burer-Monteiro) solution of the MaxCut SDP by Riemannian
/// gradient ascent on the product of unit spheres, best of `restarts`.
EmbeddingSolution bm_solve(const WeightedGraph &graph, const GwConfig &config, std::uint64_t seed);

inline constexpr std::size_t kStoredCutsLimit = 10000;

struct RoundingResult {
    CutAssignment best;
    /// Every projection's cut, kept only when R <= kStoredCutsLimit.
    std::vector<double> cuts;
    double mean_cut = 0.0;
    std::size_t projections = 0;
};

/// R random hyperplanes g ~ N(0, I); vertex i goes to side 1 iff g.v_i >= 0.
/// Draws come from a single stream, so a larger R extends a smaller one.
RoundingResult hyperplane_round(const EmbeddingSolution &embedding, std::size_t projections,
                                const WeightedGraph &graph, std::uint64_t seed);

struct GwReport {
    CutAssignment best;
    double relaxation_value = 0.0;
    double mean_cut = 0.0;
    std::size_t projections = 0;
    std::size_t rank = 0;
    std::uint64_t seed = 0;
};

GwReport gw_solve(const WeightedGraph &graph, const GwConfig &config, std::uint64_t seed);

/// `runs` independent gw_solve calls with seeds derived from `seed`.
std::vector<GwReport> gw_runs(const WeightedGraph &graph, const GwConfig &config,
                              std::size_t runs, std::uint64_t seed);

} // namespace edvqe
