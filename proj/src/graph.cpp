#include "edvqe/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "edvqe/errors.hpp"
#include "edvqe/rng.hpp"

namespace edvqe {

WeightedGraph::WeightedGraph(std::size_t n_vertices, std::vector<Edge> edges)
    : n_(n_vertices), edges_(std::move(edges)) {
    std::vector<std::uint64_t> keys;
    keys.reserve(edges_.size());
    std::vector<std::size_t> degree(n_, 0);
    for (auto &e : edges_) {
        if (e.u >= n_ || e.v >= n_) {
            throw InvalidInstance("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                                  ") out of range for " + std::to_string(n_) + " vertices");
        }
        if (e.u == e.v) {
            throw InvalidInstance("self-loop at vertex " + std::to_string(e.u));
        }
        if (!std::isfinite(e.w)) {
            throw InvalidInstance("non-finite edge weight");
        }
        if (e.u > e.v) {
            std::swap(e.u, e.v);
        }
        keys.push_back(static_cast<std::uint64_t>(e.u) * n_ + e.v);
        ++degree[e.u];
        ++degree[e.v];
    }
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
        throw InvalidInstance("duplicate edge");
    }

    offsets_.assign(n_ + 1, 0);
    for (std::size_t v = 0; v < n_; ++v) {
        offsets_[v + 1] = offsets_[v] + degree[v];
    }
    adjacency_.resize(offsets_[n_]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto &e : edges_) {
        adjacency_[fill[e.u]++] = {e.v, e.w};
        adjacency_[fill[e.v]++] = {e.u, e.w};
    }
}

double WeightedGraph::total_weight() const {
    double total = 0.0;
    for (const auto &e : edges_) {
        total += e.w;
    }
    return total;
}

double WeightedGraph::max_abs_weight() const {
    double m = 0.0;
    for (const auto &e : edges_) {
        m = std::max(m, std::abs(e.w));
    }
    return m;
}

double IsingModel::evaluate_spins(std::span<const int> spins) const {
    double value = constant;
    for (const auto &t : zz_terms) {
        if (t.i >= spins.size() || t.j >= spins.size()) {
            throw DimensionError("spin vector too short for Ising term");
        }
        value += t.coefficient * spins[t.i] * spins[t.j];
    }
    return value;
}

double IsingModel::evaluate_bits(std::span<const std::uint8_t> bits) const {
    std::vector<int> spins(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        spins[i] = bits[i] ? -1 : 1;
    }
    return evaluate_spins(spins);
}

namespace {

void check_range(double lo, double hi, const char *what) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
        throw InvalidConfig(std::string("empty or non-finite ") + what + " weight range");
    }
}

double draw_weight(Rng &rng, double lo, double hi, WeightKind kind) {
    if (kind == WeightKind::real) {
        return rng.uniform(lo, hi);
    }
    const auto ilo = static_cast<std::int64_t>(std::ceil(lo));
    const auto ihi = static_cast<std::int64_t>(std::floor(hi));
    if (ilo > ihi) {
        throw InvalidConfig("weight range contains no integer");
    }
    return static_cast<double>(rng.uniform_int(ilo, ihi));
}

} // namespace

WeightedGraph gen_complete(std::size_t n, std::uint64_t seed, double w_min, double w_max,
                           WeightKind kind) {
    if (n < 2) {
        throw InvalidInstance("complete graph needs at least 2 vertices");
    }
    check_range(w_min, w_max, "edge");
    Rng rng(seed);
    std::vector<Edge> edges;
    edges.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            edges.push_back({i, j, draw_weight(rng, w_min, w_max, kind)});
        }
    }
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph gen_cluster(std::size_t n, std::size_t community_size,
                          std::pair<double, double> intra_range,
                          std::pair<double, double> inter_range, double p_inter,
                          std::uint64_t seed, WeightKind kind) {
    if (n < 2) {
        throw InvalidInstance("cluster graph needs at least 2 vertices");
    }
    if (community_size == 0) {
        throw InvalidConfig("community size must be positive");
    }
    check_range(intra_range.first, intra_range.second, "intra-community");
    check_range(inter_range.first, inter_range.second, "inter-community");
    if (!(p_inter >= 0.0 && p_inter <= 1.0)) {
        throw InvalidConfig("inter-community probability must lie in [0, 1]");
    }
    Rng rng(seed);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (i / community_size == j / community_size) {
                edges.push_back(
                    {i, j, draw_weight(rng, intra_range.first, intra_range.second, kind)});
            } else if (rng.bernoulli(p_inter)) {
                edges.push_back(
                    {i, j, draw_weight(rng, inter_range.first, inter_range.second, kind)});
            }
        }
    }
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph gen_regular(std::size_t n, std::size_t degree, std::uint64_t seed, double w_min,
                          double w_max, WeightKind kind) {
    if (n <= degree) {
        throw InvalidInstance("regular graph needs more vertices than the degree");
    }
    if ((n * degree) % 2 != 0) {
        throw InvalidInstance("n * degree must be even");
    }
    check_range(w_min, w_max, "edge");
    constexpr int kRetryBudget = 100;
    Rng rng(seed);
    std::vector<std::size_t> stubs(n * degree);
    for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
        for (std::size_t s = 0; s < stubs.size(); ++s) {
            stubs[s] = s / degree;
        }
        for (std::size_t s = stubs.size(); s > 1; --s) {
            std::swap(stubs[s - 1], stubs[rng.below(s)]);
        }
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        pairs.reserve(stubs.size() / 2);
        bool simple = true;
        for (std::size_t s = 0; s + 1 < stubs.size(); s += 2) {
            auto a = stubs[s];
            auto b = stubs[s + 1];
            if (a == b) {
                simple = false;
                break;
            }
            pairs.emplace_back(std::min(a, b), std::max(a, b));
        }
        if (!simple) {
            continue;
        }
        std::sort(pairs.begin(), pairs.end());
        if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
            continue;
        }
        std::vector<Edge> edges;
        edges.reserve(pairs.size());
        for (const auto &[a, b] : pairs) {
            edges.push_back({a, b, draw_weight(rng, w_min, w_max, kind)});
        }
        return WeightedGraph(n, std::move(edges));
    }
    throw GenerationError("pairing model produced no simple graph within the retry budget");
}

double cut_value(const WeightedGraph &graph, std::span<const std::uint8_t> bits) {
    if (bits.size() != graph.n_vertices()) {
        throw DimensionError("assignment has " + std::to_string(bits.size()) +
                             " bits, graph has " + std::to_string(graph.n_vertices()) +
                             " vertices");
    }
    double cut = 0.0;
    for (const auto &e : graph.edges()) {
        if (bits[e.u] != bits[e.v]) {
            cut += e.w;
        }
    }
    return cut;
}

CutAssignment make_assignment(const WeightedGraph &graph, Bits bits) {
    const double cut = cut_value(graph, bits);
    return {std::move(bits), cut};
}

double normalized_avg_cut(std::span<const double> cuts, std::size_t edge_count) {
    if (cuts.empty()) {
        throw InvalidInput("no cut values to average");
    }
    if (edge_count == 0) {
        throw InvalidInput("edge count must be positive");
    }
    double sum = 0.0;
    for (double c : cuts) {
        sum += c;
    }
    return sum / static_cast<double>(cuts.size()) / static_cast<double>(edge_count);
}

IsingModel to_ising(const WeightedGraph &graph) {
    IsingModel model;
    model.zz_terms.reserve(graph.edge_count());
    for (const auto &e : graph.edges()) {
        model.constant += e.w / 2.0;
        model.zz_terms.push_back({e.u, e.v, -e.w / 2.0});
    }
    return model;
}

CutAssignment brute_force_maxcut(const WeightedGraph &graph) {
    const std::size_t n = graph.n_vertices();
    if (n > kBruteForceMaxVertices) {
        throw CapacityError("brute force limited to " + std::to_string(kBruteForceMaxVertices) +
                            " vertices, got " + std::to_string(n));
    }
    Bits bits(n, 0);
    if (n <= 1) {
        return make_assignment(graph, bits);
    }
    Bits best = bits;
    double current = 0.0;
    double best_cut = 0.0;
    const std::uint64_t count = std::uint64_t{1} << (n - 1);
    for (std::uint64_t k = 1; k < count; ++k) {
        const std::size_t v = static_cast<std::size_t>(std::countr_zero(k)) + 1;
        double delta = 0.0;
        for (const auto &nb : graph.neighbors(v)) {
            delta += bits[nb.vertex] == bits[v] ? nb.w : -nb.w;
        }
        bits[v] ^= 1;
        current += delta;
        if (current > best_cut) {
            best_cut = current;
            best = bits;
        }
    }
    return make_assignment(graph, std::move(best));
}

Bits complement(std::span<const std::uint8_t> bits) {
    Bits out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out[i] = bits[i] ? 0 : 1;
    }
    return out;
}

std::string bits_to_string(std::span<const std::uint8_t> bits) {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) {
            s[i] = '1';
        }
    }
    return s;
}

Bits bits_from_string(const std::string &text) {
    Bits bits(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '0' && text[i] != '1') {
            throw ValueError("bit string may only contain 0 and 1");
        }
        bits[i] = text[i] == '1' ? 1 : 0;
    }
    return bits;
}

void write_graph(std::ostream &out, const WeightedGraph &graph) {
    out << graph.n_vertices() << ' ' << graph.edge_count() << '\n';
    out << std::setprecision(17);
    for (const auto &e : graph.edges()) {
        out << e.u << ' ' << e.v << ' ' << e.w << '\n';
    }
}

void write_graph(const std::string &path, const WeightedGraph &graph) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    write_graph(out, graph);
    if (!out) {
        throw Error("failed writing " + path);
    }
}

namespace {

bool blank(const std::string &line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

} // namespace

WeightedGraph read_graph(std::istream &in) {
    std::string line;
    std::size_t lineno = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    bool header = false;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) {
            continue;
        }
        std::istringstream fields(line);
        std::string extra;
        if (!header) {
            long long sn = -1;
            long long sm = -1;
            if (!(fields >> sn >> sm) || sn < 0 || sm < 0 || (fields >> extra)) {
                throw ParseError("expected header 'N M'", lineno);
            }
            n = static_cast<std::size_t>(sn);
            m = static_cast<std::size_t>(sm);
            edges.reserve(m);
            header = true;
            continue;
        }
        long long i = -1;
        long long j = -1;
        double w = 0.0;
        if (!(fields >> i >> j >> w) || i < 0 || j < 0 || (fields >> extra)) {
            throw ParseError("expected edge line 'i j w'", lineno);
        }
        if (edges.size() == m) {
            throw ParseError("more edge lines than declared", lineno);
        }
        edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), w});
    }
    if (!header) {
        throw ParseError("empty graph file");
    }
    if (edges.size() != m) {
        throw ParseError("declared " + std::to_string(m) + " edges, found " +
                         std::to_string(edges.size()));
    }
    try {
        return WeightedGraph(n, std::move(edges));
    } catch (const InvalidInstance &e) {
        throw ParseError(e.what());
    }
}

WeightedGraph read_graph(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    return read_graph(in);
}

} // namespace edvqe
