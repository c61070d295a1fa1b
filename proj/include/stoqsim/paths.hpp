// Time-dependent Hamiltonians: piecewise-linear breakpoint paths and
// pointwise-transformed paths (a base path pushed through a reduction).
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "operators.hpp"

namespace stoqsim {

// Frozen parameters of a pointwise reduction applied to a base path.
struct ReductionDescriptor {
    std::string stage;  // "I" or "II"
    int n = 0;
    int s = 0;
    double M = 0.0;
    double eps = 0.5;
    double delta = 0.0;
};

struct PiecewiseLinearPath {
    std::vector<std::pair<double, SparseSymmetricOperator>> breakpoints;

    void validate() const {
        if (breakpoints.empty()) throw std::invalid_argument("path needs >= 1 breakpoint");
        for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k)
            if (!(breakpoints[k].first < breakpoints[k + 1].first))
                throw std::invalid_argument("breakpoint times must be strictly increasing");
        for (const auto& [t, H] : breakpoints)
            if (H.num_qubits() != breakpoints.front().second.num_qubits())
                throw std::invalid_argument("breakpoints must share num_qubits");
    }
    double t_min() const { return breakpoints.front().first; }
    double t_max() const { return breakpoints.back().first; }
};

// A path is either piecewise linear or a transformed view of a base path.
// The transform callable is installed by whoever builds the path (the
// reductions header provides factories); evaluation stays uniform here.
struct HamiltonianPath {
    enum class Kind { Piecewise, Transformed };

    Kind kind = Kind::Piecewise;
    PiecewiseLinearPath piecewise;

    std::optional<ReductionDescriptor> descriptor;
    std::shared_ptr<HamiltonianPath> base;
    std::function<SparseSymmetricOperator(const SparseSymmetricOperator&)> transform;

    static HamiltonianPath from_piecewise(PiecewiseLinearPath p) {
        p.validate();
        HamiltonianPath h;
        h.kind = Kind::Piecewise;
        h.piecewise = std::move(p);
        return h;
    }

    double t_min() const { return kind == Kind::Piecewise ? piecewise.t_min() : base->t_min(); }
    double t_max() const { return kind == Kind::Piecewise ? piecewise.t_max() : base->t_max(); }
};

inline SparseSymmetricOperator eval_path(const HamiltonianPath& path, double t) {
    if (path.kind == HamiltonianPath::Kind::Transformed) {
        if (!path.transform || !path.base) throw std::runtime_error("transformed path not wired");
        return path.transform(eval_path(*path.base, t));
    }
    const auto& bp = path.piecewise.breakpoints;
    if (bp.empty()) throw std::invalid_argument("empty path");
    const double tol = 1e-12 * std::max(1.0, std::abs(path.t_max()));
    if (t < path.t_min() - tol || t > path.t_max() + tol)
        throw std::out_of_range("t outside path domain");
    if (t <= path.t_min()) return bp.front().second;
    if (t >= path.t_max()) return bp.back().second;
    std::size_t k = 0;
    while (k + 2 < bp.size() && t > bp[k + 1].first) ++k;
    const double t0 = bp[k].first, t1 = bp[k + 1].first;
    const double w = (t - t0) / (t1 - t0);
    return SparseSymmetricOperator::lerp(bp[k].second, bp[k + 1].second, w);
}

inline SparseSymmetricOperator eval_path(const PiecewiseLinearPath& p, double t) {
    return eval_path(HamiltonianPath::from_piecewise(p), t);
}

// Max over consecutive grid pairs of ||H(t') - H(t)||_1 / (t' - t); an upper
// bound surrogate for the Lipschitz constant restricted to the grid.
inline double lipschitz_estimate(const HamiltonianPath& path, const std::vector<double>& grid) {
    if (grid.size() < 2) throw std::invalid_argument("lipschitz_estimate needs >= 2 grid points");
    double best = 0.0;
    SparseSymmetricOperator prev = eval_path(path, grid.front());
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("grid must be sorted increasing");
        SparseSymmetricOperator cur = eval_path(path, grid[k]);
        const double diff = validate_structure(cur - prev).induced_one_norm;
        best = std::max(best, diff / (grid[k] - grid[k - 1]));
        prev = std::move(cur);
    }
    return best;
}

inline double lipschitz_estimate(const PiecewiseLinearPath& p, const std::vector<double>& grid) {
    return lipschitz_estimate(HamiltonianPath::from_piecewise(p), grid);
}

}  // namespace stoqsim
