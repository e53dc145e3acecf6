#pragma once

// Nearest points between two reduced hulls, min 1/2 ||u - v||_p^2 over
// u in A, v in B, by Frank-Wolfe on the product hull. The gradient of
// 1/2 ||.||_p^2 at z is the duality mapping M(z).

#include <cstddef>

#include "rsvm/hull_model.hpp"

namespace rsvm {

struct PairProblem {
    ReducedHull hull_a;
    ReducedHull hull_b;
    LpConfig cfg;
};

enum class LineSearch {
    Auto,            ///< ExactQuadratic for p = 2, Exact otherwise
    ExactQuadratic,  ///< closed-form step; only valid for p = 2
    Backtracking,    ///< Armijo: initial step 1, shrink 0.5, slope factor 1e-4
    Exact,           ///< root of the directional derivative along the segment
};

enum class Strategy {
    /// Classical toward-vertex Frank-Wolfe on the product hull. Each member
    /// keeps its own realized displacement, updated by convex combination.
    FrankWolfe,
    /// Weight-space descent: each step moves mass between the maximal
    /// violating pair of members of one hull. Displacements are set in closed
    /// form, all aligned with the current difference u - v.
    MassTransfer,
};

struct SolverOptions {
    double gap_tol = 1e-8;
    std::size_t max_iters = 200000;
    LineSearch line_search = LineSearch::Auto;
    Strategy strategy = Strategy::MassTransfer;
};

struct PairSolution {
    Vector u;
    Vector v;
    HullPoint hp_a;
    HullPoint hp_b;
    double distance = 0.0;
    /// Frank-Wolfe gap <z - (a - b), M(z)> at the returned iterate; bounds the
    /// suboptimality of 1/2 ||u - v||^2.
    double gap = 0.0;
    std::size_t iterations = 0;
    /// distance <= 10 * gap_tol: the hulls (numerically) intersect.
    bool touching = false;
};

/// Thrown when the iteration budget runs out; carries the last iterate.
class NotConverged : public Error {
public:
    NotConverged(const std::string& what, PairSolution best)
        : Error(ErrorCode::NotConverged, what), best_(std::move(best)) {}
    const PairSolution& best() const noexcept { return best_; }

private:
    PairSolution best_;
};

void validate_options(const SolverOptions& opts);

PairSolution solve_nearest_pair(const PairProblem& prob, const SolverOptions& opts = {});

struct Projection {
    Vector point;
    double distance = 0.0;
};

/// Metric projection of z onto a reduced hull (nearest pair against {z}).
Projection project_point(const Vector& z, const ReducedHull& hull, const LpConfig& cfg,
                         const SolverOptions& opts = {});

}  // namespace rsvm
