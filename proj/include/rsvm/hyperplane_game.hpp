#pragma once

// Two-player separation game: each player picks a point of its own hull and
// is paid the distance from the midpoint hyperplane to that hull.

#include <vector>

#include "rsvm/nearest_pair.hpp"

namespace rsvm {

struct GameInstance {
    ReducedHull c1;
    ReducedHull c2;
    LpConfig cfg;
};

struct MidHyperplane {
    DualVector w;  // M(x1 - x2)
    double c = 0.0;
};

struct StrategyPair {
    Vector x1;
    Vector x2;
};

/// Hyperplane {x : <x, w> = c} halfway between x1 and x2. Throws CoincidentPoints.
MidHyperplane midpoint_hyperplane(const Vector& x1, const Vector& x2, const LpConfig& cfg);

/// Distance from the midpoint hyperplane of `s` to the player's hull; 0 when
/// the hyperplane cuts it.
double payoff(int player, const StrategyPair& s, const GameInstance& game);

/// Metric projection of the opponent's point onto the player's hull.
Vector best_response(int player, const Vector& opponent_point, const GameInstance& game,
                     const SolverOptions& opts = {});

struct DynamicsOptions {
    double tol = 1e-10;
    std::size_t max_rounds = 100000;
    SolverOptions projection{1e-14, 200000};
    bool keep_trace = true;
};

struct DynamicsResult {
    std::vector<StrategyPair> trace;
    StrategyPair last;
    std::size_t rounds = 0;
    bool converged = false;
};

/// x1 <- P_{C1}(x2), x2 <- P_{C2}(x1) until ||dx1|| + ||dx2|| <= tol. Throws
/// OverlappingSets when the hulls intersect; running out of rounds returns
/// converged = false.
DynamicsResult alternating_dynamics(const GameInstance& game, const StrategyPair& start,
                                    const DynamicsOptions& opts = {});

/// Membership of both strategies (distance <= tol) and the two variational
/// inequalities max_{y in C1} <y - x1, w> <= tol, max_{y in C2} <y - x2, -w> <= tol
/// with w = M(x2 - x1).
bool is_nash(const StrategyPair& s, const GameInstance& game, double tol = 1e-6);

}  // namespace rsvm
