#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace edvqe {

/// One side per vertex: 0 or 1. Spin convention z = 1 - 2b.
using Bits = std::vector<std::uint8_t>;

struct Edge {
    std::size_t u;
    std::size_t v;
    double w;
};

struct Neighbor {
    std::size_t vertex;
    double w;
};

/// Undirected weighted simple graph.
///
/// Edges are stored with u < v, in the order they were supplied. The
/// constructor canonicalizes (u, v) order and rejects self-loops, duplicate
/// pairs, out-of-range endpoints and non-finite weights.
class WeightedGraph {
public:
    WeightedGraph() = default;
    WeightedGraph(std::size_t n_vertices, std::vector<Edge> edges);

    std::size_t n_vertices() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge> &edges() const { return edges_; }

    std::span<const Neighbor> neighbors(std::size_t v) const {
        return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    double total_weight() const;
    double max_abs_weight() const;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Neighbor> adjacency_;
};

/// A partition together with its cut value on the graph it was built for.
struct CutAssignment {
    Bits bits;
    double cut = 0.0;
};

/// Diagonal Ising operator: constant + sum of coefficient * Z_i Z_j.
struct IsingModel {
    struct ZZTerm {
        std::size_t i;
        std::size_t j;
        double coefficient;
    };

    double constant = 0.0;
    std::vector<ZZTerm> zz_terms;

    /// Value on spins z in {-1, +1}.
    double evaluate_spins(std::span<const int> spins) const;
    /// Value on the basis state |bits>, i.e. spins z = 1 - 2b.
    double evaluate_bits(std::span<const std::uint8_t> bits) const;
};

enum class WeightKind { real, integer };

/// Complete graph with i.i.d. uniform weights on [w_min, w_max].
WeightedGraph gen_complete(std::size_t n, std::uint64_t seed, double w_min, double w_max,
                           WeightKind kind = WeightKind::real);

/// Planted-community graph. Community of vertex v is v / community_size;
/// when community_size does not divide n the last community is smaller.
WeightedGraph gen_cluster(std::size_t n, std::size_t community_size,
                          std::pair<double, double> intra_range,
                          std::pair<double, double> inter_range, double p_inter,
                          std::uint64_t seed, WeightKind kind = WeightKind::real);

/// Random `degree`-regular simple graph via the pairing model
/// (up to 100 attempts).
WeightedGraph gen_regular(std::size_t n, std::size_t degree, std::uint64_t seed, double w_min,
                          double w_max, WeightKind kind = WeightKind::real);

double cut_value(const WeightedGraph &graph, std::span<const std::uint8_t> bits);

CutAssignment make_assignment(const WeightedGraph &graph, Bits bits);

/// Mean of `cuts` divided by `edge_count`.
double normalized_avg_cut(std::span<const double> cuts, std::size_t edge_count);

IsingModel to_ising(const WeightedGraph &graph);

/// Exact optimum by Gray-code enumeration with vertex 0 pinned to side 0.
/// Refuses graphs with more than 24 vertices.
CutAssignment brute_force_maxcut(const WeightedGraph &graph);

inline constexpr std::size_t kBruteForceMaxVertices = 24;

Bits complement(std::span<const std::uint8_t> bits);

/// "0110..." rendering used in reports.
std::string bits_to_string(std::span<const std::uint8_t> bits);
Bits bits_from_string(const std::string &text);

// Edge-list text format: "N M" header, then M lines "i j w".
void write_graph(std::ostream &out, const WeightedGraph &graph);
void write_graph(const std::string &path, const WeightedGraph &graph);
WeightedGraph read_graph(std::istream &in);
WeightedGraph read_graph(const std::string &path);

} // namespace edvqe
