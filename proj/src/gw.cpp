#include "edvqe/gw.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "edvqe/errors.hpp"
#include "edvqe/rng.hpp"

namespace edvqe {

void GwConfig::validate() const {
    if (rank == 1) {
        throw InvalidConfig("embedding rank must be at least 2");
    }
    if (ascent_iters < 1) {
        throw InvalidConfig("ascent_iters must be at least 1");
    }
    if (!(ascent_lr > 0.0)) {
        throw InvalidConfig("ascent_lr must be positive");
    }
    if (restarts < 1) {
        throw InvalidConfig("restarts must be at least 1");
    }
    if (projections < 1) {
        throw InvalidConfig("projections must be at least 1");
    }
}

std::size_t default_rank(std::size_t n_vertices) {
    const auto r = static_cast<std::size_t>(std::ceil(std::sqrt(2.0 * n_vertices))) + 1;
    return std::max<std::size_t>(2, std::min(n_vertices, r));
}

double relaxation_objective(const WeightedGraph &graph, const EmbeddingSolution &embedding) {
    double value = 0.0;
    for (const auto &e : graph.edges()) {
        auto a = embedding.vector(e.u);
        auto b = embedding.vector(e.v);
        double dot = 0.0;
        for (std::size_t k = 0; k < embedding.rank; ++k) {
            dot += a[k] * b[k];
        }
        value += 0.5 * e.w * (1.0 - dot);
    }
    return value;
}

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void normalize_rows(Matrix &v) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        const double norm = v.row(i).norm();
        if (norm > 0.0) {
            v.row(i) /= norm;
        } else {
            v.row(i).setZero();
            v(i, 0) = 1.0;
        }
    }
}

// f(V) = 1/2 total_w - 1/4 tr(V^T W V); the Euclidean gradient is -1/2 W V.
template <typename Weights>
Matrix ascend(const Weights &weights, double total_weight, Matrix v, const GwConfig &config,
              double base_step, double &value) {
    auto objective = [&](const Matrix &x, const Matrix &wx) {
        return 0.5 * total_weight - 0.25 * wx.cwiseProduct(x).sum();
    };
    Matrix wv = weights * v;
    value = objective(v, wv);
    double step = base_step;
    for (std::size_t it = 0; it < config.ascent_iters; ++it) {
        Matrix grad = -0.5 * wv;
        // Project each row onto the tangent space of its sphere.
        const Eigen::VectorXd radial = grad.cwiseProduct(v).rowwise().sum();
        grad -= radial.asDiagonal() * v;
        if (grad.norm() <= 1e-12 * (1.0 + std::abs(value))) {
            break;
        }
        Matrix candidate = v + step * grad;
        normalize_rows(candidate);
        Matrix wc = weights * candidate;
        const double cand_value = objective(candidate, wc);
        if (cand_value >= value) {
            v = std::move(candidate);
            wv = std::move(wc);
            value = cand_value;
        } else {
            step *= 0.5;
            if (step < 1e-12 * base_step) {
                break;
            }
        }
    }
    return v;
}

Matrix random_embedding(std::size_t n, std::size_t rank, std::uint64_t seed) {
    Rng rng(seed);
    Matrix v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rank));
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index k = 0; k < v.cols(); ++k) {
            v(i, k) = rng.normal();
        }
    }
    normalize_rows(v);
    return v;
}

} // namespace

EmbeddingSolution bm_solve(const WeightedGraph &graph, const GwConfig &config,
                           std::uint64_t seed) {
    config.validate();
    const std::size_t n = graph.n_vertices();
    const std::size_t rank = config.rank == 0 ? default_rank(n) : config.rank;

    double max_degree = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        double d = 0.0;
        for (const auto &nb : graph.neighbors(v)) {
            d += std::abs(nb.w);
        }
        max_degree = std::max(max_degree, d);
    }
    const double base_step = config.ascent_lr / std::max(max_degree, 1e-12);
    const double total = graph.total_weight();

    const auto ni = static_cast<Eigen::Index>(n);
    const bool dense = n > 0 && 2.0 * graph.edge_count() >= 0.1 * static_cast<double>(n) * n;
    Eigen::MatrixXd dense_w;
    Eigen::SparseMatrix<double, Eigen::RowMajor> sparse_w;
    if (dense) {
        dense_w = Eigen::MatrixXd::Zero(ni, ni);
        for (const auto &e : graph.edges()) {
            dense_w(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) = e.w;
            dense_w(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) = e.w;
        }
    } else {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(2 * graph.edge_count());
        for (const auto &e : graph.edges()) {
            const auto u = static_cast<Eigen::Index>(e.u);
            const auto v = static_cast<Eigen::Index>(e.v);
            triplets.emplace_back(u, v, e.w);
            triplets.emplace_back(v, u, e.w);
        }
        sparse_w.resize(ni, ni);
        sparse_w.setFromTriplets(triplets.begin(), triplets.end());
    }

    EmbeddingSolution best;
    best.n_vertices = n;
    best.rank = rank;
    bool have = false;
    for (std::size_t r = 0; r < config.restarts; ++r) {
        Matrix v = random_embedding(n, rank, derive_seed(seed, r));
        double value = 0.0;
        v = dense ? ascend(dense_w, total, std::move(v), config, base_step, value)
                  : ascend(sparse_w, total, std::move(v), config, base_step, value);
        if (!std::isfinite(value)) {
            throw NumericError("relaxation objective became non-finite");
        }
        if (!have || value > best.relaxation_value) {
            best.vectors.assign(v.data(), v.data() + v.size());
            best.relaxation_value = value;
            have = true;
        }
    }
    // Report the value recomputed edge by edge from the stored vectors.
    best.relaxation_value = relaxation_objective(graph, best);
    return best;
}

RoundingResult hyperplane_round(const EmbeddingSolution &embedding, std::size_t projections,
                                const WeightedGraph &graph, std::uint64_t seed) {
    if (projections < 1) {
        throw InvalidConfig("at least one projection is required");
    }
    if (embedding.n_vertices != graph.n_vertices()) {
        throw DimensionError("embedding and graph sizes differ");
    }
    const std::size_t n = graph.n_vertices();
    const std::size_t rank = embedding.rank;
    Rng rng(seed);
    RoundingResult out;
    out.projections = projections;
    if (projections <= kStoredCutsLimit) {
        out.cuts.reserve(projections);
    }
    std::vector<double> g(rank);
    Bits bits(n, 0);
    double sum = 0.0;
    bool have = false;
    for (std::size_t p = 0; p < projections; ++p) {
        for (auto &x : g) {
            x = rng.normal();
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto v = embedding.vector(i);
            double dot = 0.0;
            for (std::size_t k = 0; k < rank; ++k) {
                dot += g[k] * v[k];
            }
            bits[i] = dot >= 0.0 ? 1 : 0;
        }
        const double cut = cut_value(graph, bits);
        sum += cut;
        if (projections <= kStoredCutsLimit) {
            out.cuts.push_back(cut);
        }
        if (!have || cut > out.best.cut) {
            out.best = {bits, cut};
            have = true;
        }
    }
    out.mean_cut = sum / static_cast<double>(projections);
    return out;
}

GwReport gw_solve(const WeightedGraph &graph, const GwConfig &config, std::uint64_t seed) {
    const auto embedding = bm_solve(graph, config, derive_seed(seed, 0));
    auto rounding = hyperplane_round(embedding, config.projections, graph, derive_seed(seed, 1));
    GwReport report;
    report.best = std::move(rounding.best);
    report.relaxation_value = embedding.relaxation_value;
    report.mean_cut = rounding.mean_cut;
    report.projections = config.projections;
    report.rank = embedding.rank;
    report.seed = seed;
    return report;
}

std::vector<GwReport> gw_runs(const WeightedGraph &graph, const GwConfig &config,
                              std::size_t runs, std::uint64_t seed) {
    std::vector<GwReport> reports;
    reports.reserve(runs);
    for (std::size_t r = 0; r < runs; ++r) {
        reports.push_back(gw_solve(graph, config, derive_seed(seed, r)));
    }
    return reports;
}

} // namespace edvqe
