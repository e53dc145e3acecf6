#include "rsvm/hyperplane_game.hpp"

#include <string>

namespace rsvm {

namespace {

const ReducedHull& own_hull(int player, const GameInstance& game) {
    if (player == 1) return game.c1;
    if (player == 2) return game.c2;
    throw Error(ErrorCode::InvalidArgument, "player must be 1 or 2, got " + std::to_string(player));
}

// The last iterate is accepted when a very tight tolerance cannot be met.
Projection project_best_effort(const Vector& z, const ReducedHull& hull, const LpConfig& cfg,
                               const SolverOptions& opts) {
    try {
        return project_point(z, hull, cfg, opts);
    } catch (const NotConverged& e) {
        return {e.best().u, e.best().distance};
    }
}

}  // namespace

MidHyperplane midpoint_hyperplane(const Vector& x1, const Vector& x2, const LpConfig& cfg) {
    if (x1 == x2) throw Error(ErrorCode::CoincidentPoints, "strategies coincide; the hyperplane is undefined");
    MidHyperplane h;
    h.w = duality_map(x1 - x2, cfg);
    if (dual_norm(h.w, cfg) == 0.0) throw Error(ErrorCode::CoincidentPoints, "strategies are numerically equal");
    h.c = pairing(0.5 * (x1 + x2), h.w);
    return h;
}

double payoff(int player, const StrategyPair& s, const GameInstance& game) {
    const ReducedHull& hull = own_hull(player, game);
    const MidHyperplane h = midpoint_hyperplane(s.x1, s.x2, game.cfg);
    const double lo = hull_support_value(hull, h.w, Sense::Min, game.cfg);
    const double hi = hull_support_value(hull, h.w, Sense::Max, game.cfg);
    const double wq = dual_norm(h.w, game.cfg);
    if (lo > h.c) return (lo - h.c) / wq;
    if (hi < h.c) return (h.c - hi) / wq;
    return 0.0;
}

Vector best_response(int player, const Vector& opponent_point, const GameInstance& game, const SolverOptions& opts) {
    return project_point(opponent_point, own_hull(player, game), game.cfg, opts).point;
}

DynamicsResult alternating_dynamics(const GameInstance& game, const StrategyPair& start, const DynamicsOptions& opts) {
    const PairSolution np = solve_nearest_pair({game.c1, game.c2, game.cfg}, opts.projection);
    if (np.touching)
        throw Error(ErrorCode::OverlappingSets, "hulls intersect (distance " + std::to_string(np.distance) + ")");

    DynamicsResult res;
    res.last = start;
    if (opts.keep_trace) res.trace.push_back(start);
    for (std::size_t round = 0; round < opts.max_rounds; ++round) {
        StrategyPair next;
        next.x1 = project_best_effort(res.last.x2, game.c1, game.cfg, opts.projection).point;
        next.x2 = project_best_effort(next.x1, game.c2, game.cfg, opts.projection).point;
        const double moved =
            primal_norm(next.x1 - res.last.x1, game.cfg) + primal_norm(next.x2 - res.last.x2, game.cfg);
        res.last = std::move(next);
        res.rounds = round + 1;
        if (opts.keep_trace) res.trace.push_back(res.last);
        if (moved <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

bool is_nash(const StrategyPair& s, const GameInstance& game, double tol) {
    if (s.x1 == s.x2) throw Error(ErrorCode::CoincidentPoints, "strategies coincide");
    const SolverOptions tight{1e-14, 200000};
    if (project_best_effort(s.x1, game.c1, game.cfg, tight).distance > tol) return false;
    if (project_best_effort(s.x2, game.c2, game.cfg, tight).distance > tol) return false;
    const DualVector w = duality_map(s.x2 - s.x1, game.cfg);
    const DualVector neg = -w;
    const double vi1 = hull_support_value(game.c1, w, Sense::Max, game.cfg) - pairing(s.x1, w);
    const double vi2 = hull_support_value(game.c2, neg, Sense::Max, game.cfg) - pairing(s.x2, neg);
    return vi1 <= tol && vi2 <= tol;
}

}  // namespace rsvm
