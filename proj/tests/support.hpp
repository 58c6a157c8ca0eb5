#pragma once

// Hand-rolled generators shared by the property tests.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "edvqe/graph.hpp"
#include "edvqe/rng.hpp"

namespace testsupport {

inline edvqe::WeightedGraph random_graph(edvqe::Rng &rng, std::size_t n, double density,
                                         double lo, double hi) {
    std::vector<edvqe::Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.bernoulli(density)) {
                edges.push_back({i, j, rng.uniform(lo, hi)});
            }
        }
    }
    return edvqe::WeightedGraph(n, std::move(edges));
}

inline edvqe::Bits random_bits(edvqe::Rng &rng, std::size_t n) {
    edvqe::Bits bits(n);
    for (auto &b : bits) {
        b = static_cast<std::uint8_t>(rng.below(2));
    }
    return bits;
}

inline edvqe::Bits bits_of(std::uint64_t x, std::size_t n) {
    edvqe::Bits bits(n);
    for (std::size_t i = 0; i < n; ++i) {
        bits[i] = static_cast<std::uint8_t>((x >> i) & 1u);
    }
    return bits;
}

} // namespace testsupport
