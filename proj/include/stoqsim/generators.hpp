// Seed-deterministic generators for small stoquastic sparse instances: a
// desk-scale stand-in for externally supplied sparse Hamiltonian paths.
#pragma once

#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "operators.hpp"
#include "paths.hpp"

namespace stoqsim {

// Shared interaction constraint: the queryable edge set (self-loops implied).
struct InteractionConstraint {
    int num_qubits = 1;
    std::vector<std::pair<Index, Index>> edges;  // x < y, off-diagonal support
};

struct GeneratedPath {
    PiecewiseLinearPath path;
    InteractionConstraint constraint;
};

// Random piecewise-linear path of stoquastic operators sharing one edge set.
// Every breakpoint is s-sparse per row (counting the diagonal), has strictly
// negative off-diagonal entries on the shared edges, and induced 1-norm <= M.
inline GeneratedPath random_sparse_stoquastic_path(int n, int s, double M, int segments,
                                                   std::uint64_t seed) {
    if (n < 1 || n > 6) throw std::invalid_argument("n must be in 1..6");
    const Index d = Index{1} << n;
    if (s < 1 || s > d) throw std::invalid_argument("infeasible (n, s)");
    if (M <= 0.0) throw std::invalid_argument("M must be positive");
    if (segments < 1) throw std::invalid_argument("segments must be >= 1");

    std::mt19937_64 rng(seed);

    // Sample an s-capped graph: every vertex carries a self-loop (one row
    // slot); off-diagonal edges are added in shuffled order while both
    // endpoints have fewer than s - 1 off-diagonal neighbours.
    std::vector<std::pair<Index, Index>> candidates;
    for (Index x = 0; x < d; ++x)
        for (Index y = x + 1; y < d; ++y) candidates.emplace_back(x, y);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    std::vector<int> degree(d, 0);
    InteractionConstraint g;
    g.num_qubits = n;
    for (const auto& [x, y] : candidates) {
        if (degree[x] < s - 1 && degree[y] < s - 1) {
            g.edges.emplace_back(x, y);
            degree[x]++;
            degree[y]++;
        }
    }
    std::sort(g.edges.begin(), g.edges.end());

    std::uniform_real_distribution<double> off_w(-1.0, -0.05);
    std::uniform_real_distribution<double> diag_w(-1.0, 1.0);

    PiecewiseLinearPath path;
    for (int k = 0; k <= segments; ++k) {
        SparseSymmetricOperator H(n);
        for (const auto& [x, y] : g.edges) H.set(x, y, off_w(rng));
        for (Index x = 0; x < d; ++x) H.set(x, x, diag_w(rng));
        const double norm = validate_structure(H).induced_one_norm;
        if (norm > M) H *= M / norm;
        path.breakpoints.emplace_back(static_cast<double>(k) / segments, std::move(H));
    }
    path.validate();
    return {std::move(path), std::move(g)};
}

}  // namespace stoqsim
