#include <doctest.h>

#include <cmath>
#include <numbers>
#include <optional>

#include "edvqe/errors.hpp"
#include "edvqe/perturbation.hpp"
#include "edvqe/rng.hpp"
#include "support.hpp"

using namespace edvqe;
using testsupport::bits_of;
using testsupport::random_bits;
using testsupport::random_graph;

namespace {

bool is_one_flip_optimal(const WeightedGraph &g, const Bits &bits) {
    const double base = cut_value(g, bits);
    for (std::size_t v = 0; v < g.n_vertices(); ++v) {
        auto flipped = bits;
        flipped[v] ^= 1;
        if (cut_value(g, flipped) > base + improvement_tolerance(g)) {
            return false;
        }
    }
    return true;
}

// Best cut reachable by exchanging one vertex from each side.
double best_swap_cut(const WeightedGraph &g, const Bits &bits) {
    double best = cut_value(g, bits);
    for (std::size_t a = 0; a < bits.size(); ++a) {
        for (std::size_t b = a + 1; b < bits.size(); ++b) {
            if (bits[a] != bits[b]) {
                auto swapped = bits;
                swapped[a] ^= 1;
                swapped[b] ^= 1;
                best = std::max(best, cut_value(g, swapped));
            }
        }
    }
    return best;
}

EdvqeConfig small_config() {
    EdvqeConfig cfg;
    cfg.inner_optimizer.max_iters = 100;
    cfg.qp2_optimizer.max_iters = 60;
    return cfg;
}

} // namespace

TEST_CASE("flip_delta examples") {
    const WeightedGraph g(3, {{0, 1, 2.5}});
    CHECK(flip_delta(g, Bits{0, 0, 0}, 2) == 0.0);
    CHECK(flip_delta(g, Bits{0, 0, 0}, 0) == 2.5);
    CHECK(flip_delta(g, Bits{0, 1, 0}, 0) == -2.5);
    CHECK_THROWS_AS(flip_delta(g, Bits{0, 0}, 0), DimensionError);
    CHECK_THROWS_AS(flip_delta(g, Bits{0, 0, 0}, 3), DimensionError);
}

TEST_CASE("property: flip_delta matches recomputation") {
    Rng rng(1000);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + rng.below(20);
        const auto g = random_graph(rng, n, 0.4, -5.0, 5.0);
        auto bits = random_bits(rng, n);
        const std::size_t v = rng.below(n);
        const double before = cut_value(g, bits);
        const double delta = flip_delta(g, bits, v);
        bits[v] ^= 1;
        CHECK(before + delta == doctest::Approx(cut_value(g, bits)).epsilon(1e-12));
    }
}

TEST_CASE("property: flip_delta is exact on every assignment of small graphs") {
    Rng rng(1001);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 2 + rng.below(9);
        const auto g = random_graph(rng, n, 0.6, -3.0, 7.0);
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
            const auto bits = bits_of(x, n);
            const double base = cut_value(g, bits);
            for (std::size_t v = 0; v < n; ++v) {
                auto flipped = bits;
                flipped[v] ^= 1;
                REQUIRE(base + flip_delta(g, bits, v) == doctest::Approx(cut_value(g, flipped)));
            }
        }
    }
}

TEST_CASE("cns1 examples") {
    SUBCASE("path 0-1-2") {
        const WeightedGraph g(3, {{0, 1, 1.0}, {1, 2, 1.0}});
        const auto r = cns1_search(g, make_assignment(g, Bits{0, 0, 0}));
        CHECK(r.assignment.bits == Bits{0, 1, 0});
        CHECK(r.assignment.cut == 2.0);
        CHECK(r.moves == std::vector<std::size_t>{1});
    }
    SUBCASE("triangle picks the lowest index on ties") {
        const WeightedGraph g(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
        const auto r = cns1(g, make_assignment(g, Bits{0, 0, 0}));
        CHECK(r.bits == Bits{1, 0, 0});
        CHECK(r.cut == 2.0);
    }
    SUBCASE("local optimum is a fixed point") {
        const WeightedGraph g(3, {{0, 1, 1.0}, {1, 2, 1.0}});
        const auto start = make_assignment(g, Bits{1, 0, 1});
        const auto r = cns1_search(g, start);
        CHECK(r.moves.empty());
        CHECK(r.assignment.bits == start.bits);
    }
}

TEST_CASE("property: cns1 replays as best-improvement moves to a local optimum") {
    Rng rng(1002);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.below(25);
        const auto g = random_graph(rng, n, 0.5, -4.0, 9.0);
        const auto start = make_assignment(g, random_bits(rng, n));
        const auto r = cns1_search(g, start);
        auto bits = start.bits;
        for (std::size_t move : r.moves) {
            const double base = cut_value(g, bits);
            double best_gain = 0.0;
            for (std::size_t v = 0; v < n; ++v) {
                auto f = bits;
                f[v] ^= 1;
                best_gain = std::max(best_gain, cut_value(g, f) - base);
            }
            auto f = bits;
            f[move] ^= 1;
            CHECK(cut_value(g, f) - base == doctest::Approx(best_gain));
            CHECK(best_gain > 0.0);
            bits = f;
        }
        CHECK(bits == r.assignment.bits);
        CHECK(r.assignment.cut >= start.cut);
        CHECK(r.assignment.cut == doctest::Approx(cut_value(g, r.assignment.bits)));
        CHECK(is_one_flip_optimal(g, r.assignment.bits));
    }
}

TEST_CASE("build_qp2 structure") {
    const WeightedGraph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    SUBCASE("all-zero assignment has no swap gates") {
        const auto q = build_qp2(make_assignment(g, Bits{0, 0, 0, 0}), partition_vertices(4, 2),
                                 std::nullopt, 1);
        for (std::size_t b = 0; b < 2; ++b) {
            CHECK(q.pairs[b].empty());
            CHECK(q.circuits[b].gates().size() == 2);
            CHECK(q.params[b] == std::vector<double>{0.0, 0.0});
        }
    }
    SUBCASE("block bits [0, 1] give one pair") {
        const auto q = build_qp2(make_assignment(g, Bits{0, 1, 1, 1}), partition_vertices(4, 2),
                                 std::nullopt, 1);
        REQUIRE(q.pairs[0].size() == 1);
        CHECK(q.pairs[0][0] == std::pair<std::size_t, std::size_t>{0, 1});
        CHECK(q.params[0][0] == 0.0);
        CHECK(q.params[0][1] == std::numbers::pi);
        CHECK(std::abs(q.params[0][2]) <= 0.01 * std::numbers::pi);
        CHECK(q.pairs[1].empty());
    }
    SUBCASE("five ones in a block of ten give 25 pairs") {
        const WeightedGraph h(10, {});
        const auto q = build_qp2(make_assignment(h, Bits{1, 0, 1, 0, 1, 0, 1, 0, 1, 0}),
                                 partition_vertices(10, 10), std::nullopt, 3);
        CHECK(q.pairs[0].size() == 25);
        CHECK(q.circuits[0].n_params() == 35);
        const auto budget = build_qp2(make_assignment(h, Bits{1, 0, 1, 0, 1, 0, 1, 0, 1, 0}),
                                      partition_vertices(10, 10), std::size_t{7}, 3);
        CHECK(budget.pairs[0].size() == 7);
        for (const auto &[a, b] : budget.pairs[0]) {
            CHECK(a < b);
            CHECK((a % 2) != (b % 2));
        }
    }
    CHECK_THROWS_AS(build_qp2(make_assignment(g, Bits{0, 0, 0, 0}), partition_vertices(4, 2),
                              std::nullopt, 1, -1.0),
                    InvalidConfig);
}

TEST_CASE("property: the unperturbed QP-2 state decodes to the incumbent") {
    Rng rng(1003);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng.below(25);
        const auto g = random_graph(rng, n, 0.4, 1.0, 5.0);
        const auto incumbent = make_assignment(g, random_bits(rng, n));
        const auto layout = partition_vertices(n, 1 + rng.below(10));
        auto q = build_qp2(incumbent, layout, std::nullopt, rng.next_u64(), 0.0);
        for (std::size_t b = 0; b < layout.block_count(); ++b) {
            for (const auto &[a, c] : q.pairs[b]) {
                CHECK(incumbent.bits[layout.blocks()[b][a]] != incumbent.bits[layout.blocks()[b][c]]);
            }
        }
        const DistributedState st(g, layout, q.circuits, q.params);
        const auto decoded = decode_solution(st, g, 4, 1);
        CHECK(decoded.bits == incumbent.bits);
        CHECK(distributed_energy(g, layout, st) == doctest::Approx(incumbent.cut));
    }
}

TEST_CASE("qp2_optimize never degrades the incumbent") {
    Rng rng(1004);
    const auto cfg = small_config();
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 6 + rng.below(10);
        const auto g = random_graph(rng, n, 0.5, 1.0, 10.0);
        const auto layout = partition_vertices(n, cfg.subsystem_size);
        const auto incumbent = cns1(g, make_assignment(g, random_bits(rng, n)));
        const auto out = qp2_optimize(g, layout, incumbent, cfg, t);
        CHECK(out.cut >= incumbent.cut);
        CHECK(out.cut == doctest::Approx(cut_value(g, out.bits)));
    }
}

TEST_CASE("qp2_optimize escapes a 1-flip optimum that a swap improves") {
    // Search for a 10-vertex instance whose CNS-1 result is improved by a swap.
    Rng rng(1005);
    std::optional<WeightedGraph> graph;
    CutAssignment incumbent;
    for (int t = 0; t < 10000 && !graph; ++t) {
        const auto g = random_graph(rng, 10, 0.6, 1.0, 10.0);
        const auto local = cns1(g, make_assignment(g, random_bits(rng, 10)));
        if (best_swap_cut(g, local.bits) > local.cut + 1e-6) {
            graph = g;
            incumbent = local;
        }
    }
    REQUIRE(graph.has_value());
    REQUIRE(is_one_flip_optimal(*graph, incumbent.bits));
    EdvqeConfig cfg;
    const auto layout = partition_vertices(10, 10);
    int escaped = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        escaped += qp2_optimize(*graph, layout, incumbent, cfg, seed).cut > incumbent.cut + 1e-9;
    }
    CHECK(escaped >= 1);
}

TEST_CASE("edvqe config validation") {
    EdvqeConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.outer_patience = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = EdvqeConfig{};
    cfg.subsystem_size = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = EdvqeConfig{};
    cfg.theta_init_halfwidth = -0.1;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = EdvqeConfig{};
    cfg.qp2_optimizer.learning_rate = -1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
}

TEST_CASE("edvqe_solve on an edgeless graph") {
    const auto r = edvqe_solve(WeightedGraph(5, {}), small_config(), 1);
    CHECK(r.best.cut == 0.0);
    CHECK(r.iterations_run == small_config().outer_patience);
    CHECK(r.delta_cns1() == 0.0);
    CHECK(r.delta_qp2() == 0.0);
}

TEST_CASE("property: edvqe_solve bookkeeping") {
    Rng rng(1006);
    const auto cfg = small_config();
    for (int t = 0; t < 6; ++t) {
        const std::size_t n = 8 + rng.below(12);
        const auto g = random_graph(rng, n, 0.5, 1.0, 10.0);
        const auto r = edvqe_solve(g, cfg, t);
        CHECK(r.seed == static_cast<std::uint64_t>(t));
        CHECK(r.best.cut == doctest::Approx(cut_value(g, r.best.bits)));
        CHECK(r.initial.cut == doctest::Approx(cut_value(g, r.initial.bits)));
        CHECK(r.best.cut >= cns1(g, r.initial).cut - 1e-9);
        REQUIRE(r.per_outer_iteration.size() == r.iterations_run);
        CHECK(r.iterations_run <= cfg.max_outer_iters);
        double incumbent = r.initial.cut;
        double best = r.initial.cut;
        for (const auto &it : r.per_outer_iteration) {
            CHECK(it.after_cns1 >= incumbent - 1e-9);
            CHECK(it.after_qp2 >= it.after_cns1 - 1e-9);
            incumbent = it.after_qp2;
            best = std::max(best, incumbent);
        }
        CHECK(r.best.cut == doctest::Approx(best));
        CHECK(r.delta_cns1() + r.delta_qp2() == doctest::Approx(r.best.cut - r.initial.cut));
        CHECK(r.initial_energy_trace.size() >= 2);
        const auto again = edvqe_solve(g, cfg, t);
        CHECK(again.best.bits == r.best.bits);
        CHECK(again.initial_energy_trace == r.initial_energy_trace);
    }
}

TEST_CASE("warm starts never degrade") {
    Rng rng(1007);
    const auto cfg = small_config();
    const auto g = random_graph(rng, 10, 0.6, 1.0, 10.0);
    const auto opt = brute_force_maxcut(g);
    const auto from_opt = warm_start_solve(g, opt, cfg, 1);
    CHECK(from_opt.best.cut == doctest::Approx(opt.cut));
    CHECK(from_opt.initial.bits == opt.bits);
    CHECK(from_opt.initial_energy_trace.empty());

    const auto zeros = make_assignment(g, Bits(10, 0));
    const auto from_zero = warm_start_solve(g, zeros, cfg, 2);
    CHECK(from_zero.initial.cut == 0.0);
    REQUIRE_FALSE(from_zero.per_outer_iteration.empty());
    CHECK(from_zero.per_outer_iteration.front().after_cns1 == doctest::Approx(cns1(g, zeros).cut));
    CHECK(from_zero.best.cut >= cns1(g, zeros).cut);
}
