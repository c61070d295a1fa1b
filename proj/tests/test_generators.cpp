#include <catch2/catch_amalgamated.hpp>

#include "stoqsim/generators.hpp"

using namespace stoqsim;

TEST_CASE("random_sparse_stoquastic_path structural guarantees") {
    const auto gen = random_sparse_stoquastic_path(1, 2, 1.0, 1, 7);
    REQUIRE(gen.path.breakpoints.size() == 2);
    for (const auto& [t, H] : gen.path.breakpoints) {
        const auto r = validate_structure(H);
        REQUIRE(r.stoquastic);
        REQUIRE(r.max_row_sparsity <= 2);
        REQUIRE(r.induced_one_norm <= 1.0 + 1e-12);
    }
}

TEST_CASE("same seed reproduces the path exactly") {
    const auto a = random_sparse_stoquastic_path(2, 3, 2.0, 2, 42);
    const auto b = random_sparse_stoquastic_path(2, 3, 2.0, 2, 42);
    REQUIRE(a.constraint.edges == b.constraint.edges);
    REQUIRE(a.path.breakpoints.size() == b.path.breakpoints.size());
    for (std::size_t k = 0; k < a.path.breakpoints.size(); ++k) {
        REQUIRE(a.path.breakpoints[k].first == b.path.breakpoints[k].first);
        REQUIRE(a.path.breakpoints[k].second.entries() == b.path.breakpoints[k].second.entries());
    }
}

TEST_CASE("breakpoints share one interaction constraint of bounded degree") {
    const auto gen = random_sparse_stoquastic_path(2, 3, 2.0, 2, 1);
    std::vector<int> degree(4, 1);  // the self-loop occupies one row slot
    for (const auto& [x, y] : gen.constraint.edges) {
        degree[x]++;
        degree[y]++;
    }
    for (int d : degree) REQUIRE(d <= 3);
    // Every breakpoint's off-diagonal support is exactly the constraint edges.
    for (const auto& [t, H] : gen.path.breakpoints) {
        std::vector<std::pair<Index, Index>> support;
        for (const auto& [ij, v] : H.entries()) {
            if (ij.first != ij.second) {
                support.push_back(ij);
                REQUIRE(v < 0.0);
            }
        }
        REQUIRE(support == gen.constraint.edges);
    }
}

TEST_CASE("generator input validation") {
    REQUIRE_THROWS_AS(random_sparse_stoquastic_path(7, 2, 1.0, 1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(random_sparse_stoquastic_path(2, 5, 1.0, 1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(random_sparse_stoquastic_path(2, 2, -1.0, 1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(random_sparse_stoquastic_path(2, 2, 1.0, 0, 0), std::invalid_argument);
}
