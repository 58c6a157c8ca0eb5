#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edvqe/errors.hpp"
#include "edvqe/graph.hpp"
#include "edvqe/rng.hpp"
#include "support.hpp"

using namespace edvqe;
using testsupport::bits_of;
using testsupport::random_bits;
using testsupport::random_graph;

namespace {

WeightedGraph triangle() { return WeightedGraph(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}); }

WeightedGraph cycle(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        edges.push_back({i, (i + 1) % n, 1.0});
    }
    return WeightedGraph(n, edges);
}

std::vector<std::size_t> degrees(const WeightedGraph &g) {
    std::vector<std::size_t> d(g.n_vertices(), 0);
    for (const auto &e : g.edges()) {
        ++d[e.u];
        ++d[e.v];
    }
    return d;
}

std::string serialize(const WeightedGraph &g) {
    std::ostringstream out;
    write_graph(out, g);
    return out.str();
}

} // namespace

TEST_CASE("rng streams are reproducible and in range") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng r(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.below(7) < 7u);
        const double x = r.uniform(1.0, 10.0);
        CHECK(x >= 1.0);
        CHECK(x <= 10.0);
    }
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("normal draws have unit variance") {
    Rng r(11);
    double sum = 0.0;
    double sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("graph construction canonicalizes and validates") {
    const WeightedGraph g(3, {{2, 0, 1.5}, {1, 2, -2.0}});
    REQUIRE(g.edge_count() == 2);
    CHECK(g.edges()[0].u == 0);
    CHECK(g.edges()[0].v == 2);
    CHECK(g.total_weight() == doctest::Approx(-0.5));
    CHECK(g.max_abs_weight() == doctest::Approx(2.0));
    CHECK(g.neighbors(2).size() == 2);

    CHECK_THROWS_AS(WeightedGraph(3, {{0, 0, 1.0}}), InvalidInstance);
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 3, 1.0}}), InvalidInstance);
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, 1.0}, {1, 0, 2.0}}), InvalidInstance);
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, std::nan("")}}), InvalidInstance);
}

TEST_CASE("gen_complete") {
    SUBCASE("degenerate interval gives a unit triangle") {
        const auto g = gen_complete(3, 5, 1.0, 1.0);
        REQUIRE(g.edge_count() == 3);
        for (const auto &e : g.edges()) {
            CHECK(e.w == 1.0);
        }
    }
    SUBCASE("n = 100 has 4950 edges in [1, 10]") {
        const auto g = gen_complete(100, 3587, 1.0, 10.0);
        CHECK(g.edge_count() == 4950);
        for (const auto &e : g.edges()) {
            CHECK(e.w >= 1.0);
            CHECK(e.w <= 10.0);
        }
    }
    SUBCASE("deterministic per seed") {
        CHECK(serialize(gen_complete(30, 9, 1.0, 10.0)) == serialize(gen_complete(30, 9, 1.0, 10.0)));
        CHECK(serialize(gen_complete(30, 9, 1.0, 10.0)) != serialize(gen_complete(30, 10, 1.0, 10.0)));
    }
    SUBCASE("integer weights") {
        const auto g = gen_complete(20, 3, 1.0, 10.0, WeightKind::integer);
        for (const auto &e : g.edges()) {
            CHECK(e.w == std::round(e.w));
        }
    }
    CHECK_THROWS_AS(gen_complete(1, 0, 1.0, 2.0), InvalidInstance);
    CHECK_THROWS_AS(gen_complete(5, 0, 3.0, 2.0), InvalidConfig);
}

TEST_CASE("gen_cluster") {
    SUBCASE("four communities of ten") {
        const auto g = gen_cluster(40, 10, {5.0, 10.0}, {1.0, 3.0}, 0.3, 3);
        std::size_t intra = 0;
        for (const auto &e : g.edges()) {
            if (e.u / 10 == e.v / 10) {
                ++intra;
                CHECK(e.w >= 5.0);
                CHECK(e.w <= 10.0);
            } else {
                CHECK(e.w >= 1.0);
                CHECK(e.w <= 3.0);
            }
        }
        CHECK(intra == 4 * 45);
    }
    SUBCASE("p_inter = 0 gives disjoint cliques") {
        const auto g = gen_cluster(30, 10, {5.0, 10.0}, {1.0, 3.0}, 0.0, 1);
        CHECK(g.edge_count() == 3 * 45);
        for (const auto &e : g.edges()) {
            CHECK(e.u / 10 == e.v / 10);
        }
    }
    SUBCASE("p_inter = 1 connects every cross pair") {
        const auto g = gen_cluster(20, 10, {5.0, 10.0}, {1.0, 3.0}, 1.0, 1);
        CHECK(g.edge_count() == 2 * 45 + 100);
    }
    SUBCASE("remainder forms a smaller last community") {
        const auto g = gen_cluster(25, 10, {5.0, 10.0}, {1.0, 3.0}, 0.0, 1);
        CHECK(g.edge_count() == 45 + 45 + 10);
    }
    CHECK_THROWS_AS(gen_cluster(20, 10, {5.0, 10.0}, {1.0, 3.0}, 1.5, 1), InvalidConfig);
    CHECK_THROWS_AS(gen_cluster(20, 10, {10.0, 5.0}, {1.0, 3.0}, 0.5, 1), InvalidConfig);
}

TEST_CASE("gen_regular") {
    SUBCASE("n = 4, degree 3 is K4") {
        const auto g = gen_regular(4, 3, 1, 1.0, 1.0);
        CHECK(g.edge_count() == 6);
    }
    SUBCASE("3-regular on 100 vertices") {
        const auto g = gen_regular(100, 3, 8, 1.0, 10.0);
        CHECK(g.edge_count() == 150);
        const auto d = degrees(g);
        CHECK(std::all_of(d.begin(), d.end(), [](std::size_t x) { return x == 3; }));
    }
    SUBCASE("property: every generated graph is regular") {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const std::size_t n = 4 + 2 * (seed % 20);
            const auto g = gen_regular(n, 3, seed, 1.0, 10.0);
            const auto d = degrees(g);
            CHECK(std::all_of(d.begin(), d.end(), [](std::size_t x) { return x == 3; }));
        }
    }
    CHECK_THROWS_AS(gen_regular(5, 3, 1, 1.0, 2.0), InvalidInstance);
    CHECK_THROWS_AS(gen_regular(3, 3, 1, 1.0, 2.0), InvalidInstance);
}

TEST_CASE("cut_value examples") {
    CHECK(cut_value(triangle(), Bits{0, 1, 1}) == 2.0);
    CHECK(cut_value(triangle(), Bits{0, 0, 0}) == 0.0);
    CHECK(cut_value(WeightedGraph(2, {{0, 1, 5.0}}), Bits{0, 1}) == 5.0);
    CHECK_THROWS_AS(cut_value(triangle(), Bits{0, 1}), DimensionError);
}

TEST_CASE("property: cut is invariant under complement") {
    Rng rng(21);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.below(15);
        const auto g = random_graph(rng, n, 0.5, -5.0, 5.0);
        const auto bits = random_bits(rng, n);
        CHECK(cut_value(g, bits) == doctest::Approx(cut_value(g, complement(bits))));
    }
}

TEST_CASE("normalized_avg_cut") {
    CHECK(normalized_avg_cut(std::vector<double>{10.0, 10.0}, 5) == 2.0);
    CHECK(normalized_avg_cut(std::vector<double>{0.0}, 7) == 0.0);
    CHECK_THROWS_AS(normalized_avg_cut(std::vector<double>{}, 5), InvalidInput);
}

TEST_CASE("to_ising") {
    const auto model = to_ising(WeightedGraph(2, {{0, 1, 4.0}}));
    CHECK(model.constant == 2.0);
    REQUIRE(model.zz_terms.size() == 1);
    CHECK(model.zz_terms[0].coefficient == -2.0);
    CHECK(model.evaluate_spins(std::vector<int>{1, 1}) == 0.0);
}

TEST_CASE("property: Ising evaluation equals the cut on every bitstring") {
    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 2 + rng.below(11);
        const auto g = random_graph(rng, n, 0.6, -3.0, 7.0);
        const auto model = to_ising(g);
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
            const auto bits = bits_of(x, n);
            REQUIRE(model.evaluate_bits(bits) == doctest::Approx(cut_value(g, bits)).epsilon(1e-12));
        }
    }
}

TEST_CASE("brute_force_maxcut") {
    CHECK(brute_force_maxcut(triangle()).cut == 2.0);
    CHECK(brute_force_maxcut(gen_complete(4, 1, 1.0, 1.0)).cut == 4.0);
    CHECK(brute_force_maxcut(cycle(5)).cut == 4.0);
    CHECK(brute_force_maxcut(cycle(6)).cut == 6.0);
    CHECK_THROWS_AS(brute_force_maxcut(gen_complete(25, 1, 1.0, 1.0)), CapacityError);

    SUBCASE("property: optimum bounds random assignments") {
        Rng rng(41);
        const auto g = random_graph(rng, 14, 0.5, -2.0, 6.0);
        const auto best = brute_force_maxcut(g);
        CHECK(best.cut == doctest::Approx(cut_value(g, best.bits)));
        for (int t = 0; t < 1000; ++t) {
            CHECK(cut_value(g, random_bits(rng, 14)) <= best.cut + 1e-9);
        }
    }
}

TEST_CASE("bit strings") {
    CHECK(bits_to_string(Bits{0, 1, 1, 0}) == "0110");
    CHECK(bits_from_string("0110") == Bits{0, 1, 1, 0});
    CHECK_THROWS_AS(bits_from_string("01a"), ValueError);
}

TEST_CASE("graph file round trip") {
    Rng rng(51);
    const auto g = random_graph(rng, 12, 0.5, -3.3, 9.9);
    std::istringstream in(serialize(g));
    const auto back = read_graph(in);
    REQUIRE(back.edge_count() == g.edge_count());
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        CHECK(back.edges()[k].u == g.edges()[k].u);
        CHECK(back.edges()[k].v == g.edges()[k].v);
        CHECK(back.edges()[k].w == g.edges()[k].w);
    }
}

TEST_CASE("graph parse errors carry line numbers") {
    std::istringstream bad_edge("3 2\n0 1 1.0\n0 x 2\n");
    try {
        read_graph(bad_edge);
        FAIL("expected a parse error");
    } catch (const ParseError &e) {
        CHECK(e.line() == 3);
    }
    std::istringstream empty("");
    CHECK_THROWS_AS(read_graph(empty), ParseError);
    std::istringstream short_file("3 2\n0 1 1.0\n");
    CHECK_THROWS_AS(read_graph(short_file), ParseError);
    std::istringstream loop("3 1\n1 1 1.0\n");
    CHECK_THROWS_AS(read_graph(loop), ParseError);
}
