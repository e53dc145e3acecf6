#include "rsvm/nearest_pair.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace rsvm {

void validate_options(const SolverOptions& opts) {
    if (!(opts.gap_tol > 0.0) || !std::isfinite(opts.gap_tol))
        throw Error(ErrorCode::InvalidArgument, "gap_tol must be positive");
    if (opts.max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be at least 1");
}

namespace {

std::string show(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Iterate on one hull. Displacements are stored premultiplied by their weight
// so that convex combinations of hull points stay linear.
struct HullState {
    std::vector<double> lambda;
    std::vector<Vector> weighted;  // lambda_i * delta_i
    Vector point;

    HullState(const ReducedHull& hull) {
        const HullPoint hp = initial_hull_point(hull);
        lambda = hp.coefficients;
        weighted = hp.displacements;
        point = hull_point_embed(hp, hull);
    }

    void step_towards(double t, const HullPoint& target, const Vector& target_point) {
        const double keep = 1.0 - t;
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            lambda[i] = keep * lambda[i] + t * target.coefficients[i];
            weighted[i] *= keep;
            if (target.coefficients[i] != 0.0) weighted[i].add_scaled(t * target.coefficients[i], target.displacements[i]);
        }
        point *= keep;
        point.add_scaled(t, target_point);
    }

    HullPoint hull_point(const ReducedHull& hull, const LpConfig& cfg) const {
        HullPoint hp;
        hp.coefficients = lambda;
        hp.displacements.reserve(lambda.size());
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            if (lambda[i] <= 0.0) {
                hp.coefficients[i] = 0.0;
                hp.displacements.emplace_back(hull.dim());
                continue;
            }
            Vector d = (1.0 / lambda[i]) * weighted[i];
            const double r = hull.members()[i].radius;
            const double n = primal_norm(d, cfg);
            if (n > r) d *= (r > 0.0 ? r / n : 0.0);
            hp.displacements.push_back(std::move(d));
        }
        return hp;
    }
};

double half_sq_norm(const Vector& z, const LpConfig& cfg) {
    const double n = primal_norm(z, cfg);
    return 0.5 * n * n;
}

double exact_quadratic_step(const Vector& d, double gap, const LpConfig& cfg) {
    const double dd = half_sq_norm(d, cfg) * 2.0;
    if (dd == 0.0) return 0.0;
    return std::clamp(gap / dd, 0.0, 1.0);
}

double backtracking_step(const Vector& z, const Vector& d, double f0, double gap, const LpConfig& cfg) {
    constexpr double kSlope = 1e-4;
    constexpr double kShrink = 0.5;
    double t = 1.0;
    while (t > 1e-20) {
        Vector trial = z;
        trial.add_scaled(t, d);
        if (half_sq_norm(trial, cfg) <= f0 - kSlope * t * gap) return t;
        t *= kShrink;
    }
    return 0.0;
}

// phi(t) = 1/2 ||z + t d||^2 is convex with phi'(t) = <d, M(z + t d)> and
// phi'(0) = -gap < 0; find its minimizer on [0, 1] by safeguarded secant.
double exact_step(const Vector& z, const Vector& d, double gap, const LpConfig& cfg) {
    auto slope = [&](double t) {
        Vector x = z;
        x.add_scaled(t, d);
        return pairing(d, duality_map(x, cfg));
    };
    double lo = 0.0, hi = 1.0;
    double s_lo = -gap, s_hi = slope(1.0);
    if (s_hi <= 0.0) return 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        double t = lo - s_lo * (hi - lo) / (s_hi - s_lo);
        const double width = hi - lo;
        if (!(t > lo + 0.01 * width && t < hi - 0.01 * width)) t = 0.5 * (lo + hi);
        const double s = slope(t);
        if (std::abs(s) <= 1e-15 * gap) return t;
        if (s < 0.0) {
            lo = t;
            s_lo = s;
        } else {
            hi = t;
            s_hi = s;
        }
    }
    return lo > 0.0 ? lo : 0.5 * (lo + hi);
}

LineSearch resolve(LineSearch ls, const LpConfig& cfg) {
    if (ls == LineSearch::Auto) return cfg.euclidean() ? LineSearch::ExactQuadratic : LineSearch::Exact;
    if (ls == LineSearch::ExactQuadratic && !cfg.euclidean())
        throw Error(ErrorCode::InvalidArgument, "exact quadratic line search requires p = 2");
    return ls;
}

PairSolution frank_wolfe(const PairProblem& prob, const SolverOptions& opts) {
    const LpConfig& cfg = prob.cfg;
    const LineSearch ls = resolve(opts.line_search, cfg);

    HullState a(prob.hull_a);
    HullState b(prob.hull_b);

    auto finish = [&](double gap, std::size_t iters) {
        PairSolution sol;
        sol.hp_a = a.hull_point(prob.hull_a, cfg);
        sol.hp_b = b.hull_point(prob.hull_b, cfg);
        sol.u = hull_point_embed(sol.hp_a, prob.hull_a);
        sol.v = hull_point_embed(sol.hp_b, prob.hull_b);
        sol.distance = primal_norm(sol.u - sol.v, cfg);
        sol.gap = gap;
        sol.iterations = iters;
        sol.touching = sol.distance <= 10.0 * opts.gap_tol;
        return sol;
    };

    double gap = 0.0;
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        const Vector z = a.point - b.point;
        const double f = half_sq_norm(z, cfg);
        if (f == 0.0) return finish(0.0, it);

        const DualVector g = duality_map(z, cfg);
        const HullPoint la = lmo_reduced_hull(prob.hull_a, g, Sense::Min, cfg);
        const HullPoint lb = lmo_reduced_hull(prob.hull_b, g, Sense::Max, cfg);
        const Vector pa = hull_point_embed(la, prob.hull_a);
        const Vector pb = hull_point_embed(lb, prob.hull_b);
        const Vector d = (pa - pb) - z;
        gap = -pairing(d, g);
        if (gap <= opts.gap_tol * (1.0 + f)) return finish(std::max(gap, 0.0), it);

        double t = 0.0;
        switch (ls) {
            case LineSearch::ExactQuadratic: t = exact_quadratic_step(d, gap, cfg); break;
            case LineSearch::Backtracking: t = backtracking_step(z, d, f, gap, cfg); break;
            default: t = exact_step(z, d, gap, cfg); break;
        }
        if (t <= 0.0) {
            PairSolution last = finish(gap, it);
            throw NotConverged("nearest pair stalled at gap " + show(gap), std::move(last));
        }
        a.step_towards(t, la, pa);
        b.step_towards(t, lb, pb);
    }
    PairSolution last = finish(gap, opts.max_iters);
    throw NotConverged("nearest pair did not reach gap tolerance within " + std::to_string(opts.max_iters) +
                           " iterations (gap " + show(gap) + ")",
                       std::move(last));
}

// ---------------------------------------------------------------------------
// Mass transfer in weight space.
//
// For fixed weights the best displacements shrink z0 = sum_A l c - sum_B l c
// radially by G = sum l r, so the objective is F(l) = 1/2 max(0, ||z0|| - G)^2.
// Its partial derivatives are the ball support values at g = M(z):
//   A member i:  <c_i, g> - r_i ||g||_q
//   B member j: -<c_j, g> - r_j ||g||_q

struct WeightIterate {
    std::vector<double> la;
    std::vector<double> lb;
};

struct Aggregate {
    Vector z0;
    double shrink = 0.0;  // G
    double z0_norm = 0.0;
    double h() const { return z0_norm - shrink; }
};

Aggregate aggregate(const PairProblem& prob, const WeightIterate& w) {
    const std::size_t dim = prob.cfg.dim();
    auto accumulate = [dim](const ReducedHull& hull, const std::vector<double>& lambda, double& shrink) {
        Vector sum(dim);
        shrink = 0.0;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            if (lambda[i] == 0.0) continue;
            sum.add_scaled(lambda[i], hull.members()[i].center);
            shrink += lambda[i] * hull.members()[i].radius;
        }
        return sum;
    };
    double shrink_a = 0.0, shrink_b = 0.0;
    const Vector sa = accumulate(prob.hull_a, w.la, shrink_a);
    const Vector sb = accumulate(prob.hull_b, w.lb, shrink_b);
    Aggregate agg{sa - sb, shrink_a + shrink_b, 0.0};
    agg.z0_norm = primal_norm(agg.z0, prob.cfg);
    return agg;
}

HullPoint aligned_hull_point(const ReducedHull& hull, const std::vector<double>& lambda, const Aggregate& agg,
                             double direction_sign) {
    HullPoint hp;
    hp.coefficients = lambda;
    hp.displacements.reserve(lambda.size());
    // Offsets point along -z0 for A and +z0 for B; when the hulls overlap they
    // are scaled so that u - v vanishes exactly.
    const double denom = agg.h() > 0.0 ? agg.z0_norm : std::max(agg.shrink, agg.z0_norm);
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        const double r = hull.members()[i].radius;
        if (r == 0.0 || denom == 0.0) {
            hp.displacements.emplace_back(hull.dim());
            continue;
        }
        hp.displacements.push_back((-direction_sign * r / denom) * agg.z0);
    }
    return hp;
}

// One-dimensional slope of F along a transfer that changes z0 by dz and G by dg.
double transfer_slope(const Vector& z0, double shrink, const Vector& dz, double dg, double t, const LpConfig& cfg) {
    Vector x = z0;
    x.add_scaled(t, dz);
    const double n = primal_norm(x, cfg);
    const double h = n - shrink - t * dg;
    if (h <= 0.0 || n == 0.0) return 0.0;
    return h * (pairing(dz, duality_map(x, cfg)) / n - dg);
}

double transfer_step(const Aggregate& agg, const Vector& dz, double dg, double t_max, double slope0,
                     const LpConfig& cfg) {
    double lo = 0.0, hi = t_max;
    double s_lo = slope0, s_hi = transfer_slope(agg.z0, agg.shrink, dz, dg, t_max, cfg);
    if (s_hi < 0.0) return t_max;
    for (int it = 0; it < 200 && hi - lo > 1e-17 * t_max; ++it) {
        double t = lo - s_lo * (hi - lo) / (s_hi - s_lo);
        const double width = hi - lo;
        if (!(t > lo + 0.01 * width && t < hi - 0.01 * width)) t = 0.5 * (lo + hi);
        const double s = transfer_slope(agg.z0, agg.shrink, dz, dg, t, cfg);
        if (s < 0.0) {
            lo = t;
            s_lo = s;
        } else {
            hi = t;
            s_hi = s;
        }
        if (s == 0.0 || std::abs(s) <= 1e-16 * std::abs(slope0)) return t;
    }
    return lo > 0.0 ? lo : hi;
}

struct Violation {
    double amount = 0.0;
    std::size_t up = 0;    // receives mass
    std::size_t down = 0;  // gives mass
};

Violation maximal_violating_pair(const std::vector<double>& grad, const std::vector<double>& lambda, double cap) {
    Violation v;
    double best_up = std::numeric_limits<double>::infinity();
    double best_down = -std::numeric_limits<double>::infinity();
    bool have_up = false, have_down = false;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (lambda[i] < cap && grad[i] < best_up) {
            best_up = grad[i];
            v.up = i;
            have_up = true;
        }
        if (lambda[i] > 0.0 && grad[i] > best_down) {
            best_down = grad[i];
            v.down = i;
            have_down = true;
        }
    }
    if (have_up && have_down && v.up != v.down) v.amount = best_down - best_up;
    return v;
}

double linear_gap(const std::vector<double>& grad, const std::vector<double>& lambda, double cap) {
    const auto vertex = capped_simplex_fill(grad, cap, Sense::Min);
    double gap = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) gap += (lambda[i] - vertex[i]) * grad[i];
    return gap;
}

PairSolution mass_transfer(const PairProblem& prob, const SolverOptions& opts) {
    const LpConfig& cfg = prob.cfg;
    const auto& ma = prob.hull_a.members();
    const auto& mb = prob.hull_b.members();
    WeightIterate w{initial_hull_point(prob.hull_a).coefficients, initial_hull_point(prob.hull_b).coefficients};

    auto finish = [&](const Aggregate& agg, double gap, std::size_t iters) {
        PairSolution sol;
        sol.hp_a = aligned_hull_point(prob.hull_a, w.la, agg, +1.0);
        sol.hp_b = aligned_hull_point(prob.hull_b, w.lb, agg, -1.0);
        sol.u = hull_point_embed(sol.hp_a, prob.hull_a);
        sol.v = hull_point_embed(sol.hp_b, prob.hull_b);
        sol.distance = primal_norm(sol.u - sol.v, cfg);
        sol.gap = std::max(gap, 0.0);
        sol.iterations = iters;
        sol.touching = sol.distance <= 10.0 * opts.gap_tol;
        return sol;
    };

    std::vector<double> ga(ma.size()), gb(mb.size());
    double gap = 0.0;
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        const Aggregate agg = aggregate(prob, w);
        const double h = agg.h();
        if (h <= 0.0) return finish(agg, 0.0, it);
        const double f = 0.5 * h * h;
        Vector z = (h / agg.z0_norm) * agg.z0;
        const DualVector g = duality_map(z, cfg);
        const double gq = dual_norm(g, cfg);
        for (std::size_t i = 0; i < ma.size(); ++i) ga[i] = pairing(ma[i].center, g) - ma[i].radius * gq;
        for (std::size_t j = 0; j < mb.size(); ++j) gb[j] = -pairing(mb[j].center, g) - mb[j].radius * gq;

        gap = linear_gap(ga, w.la, prob.hull_a.cap()) + linear_gap(gb, w.lb, prob.hull_b.cap());
        if (gap <= opts.gap_tol * (1.0 + f)) return finish(agg, gap, it);

        const Violation va = maximal_violating_pair(ga, w.la, prob.hull_a.cap());
        const Violation vb = maximal_violating_pair(gb, w.lb, prob.hull_b.cap());
        // exact ties move both hulls at once
        const bool move_a = va.amount > 0.0 && va.amount >= vb.amount;
        const bool move_b = vb.amount > 0.0 && vb.amount >= va.amount;
        if (!move_a && !move_b) {
            PairSolution last = finish(agg, gap, it);
            throw NotConverged("nearest pair stalled at gap " + show(gap), std::move(last));
        }
        Vector dz(cfg.dim());
        double dg = 0.0;
        double t_max = std::numeric_limits<double>::infinity();
        double slope0 = 0.0;
        auto add_transfer = [&](const ReducedHull& hull, const std::vector<double>& lambda, const Violation& v,
                                double side) {
            const auto& m = hull.members();
            dz += side * (m[v.up].center - m[v.down].center);
            dg += m[v.up].radius - m[v.down].radius;
            t_max = std::min({t_max, hull.cap() - lambda[v.up], lambda[v.down]});
            slope0 -= v.amount;
        };
        if (move_a) add_transfer(prob.hull_a, w.la, va, 1.0);
        if (move_b) add_transfer(prob.hull_b, w.lb, vb, -1.0);

        const double t = transfer_step(agg, dz, dg, t_max, slope0, cfg);
        if (t <= 0.0) {
            PairSolution last = finish(agg, gap, it);
            throw NotConverged("nearest pair stalled at gap " + show(gap), std::move(last));
        }
        auto apply = [&](std::vector<double>& lambda, const Violation& v, double cap) {
            const double room_up = cap - lambda[v.up];
            if (t < std::min(room_up, lambda[v.down])) {
                lambda[v.up] += t;
                lambda[v.down] -= t;
            } else if (room_up <= lambda[v.down]) {
                lambda[v.down] -= room_up;
                lambda[v.up] = cap;
            } else {
                lambda[v.up] += lambda[v.down];
                lambda[v.down] = 0.0;
            }
        };
        if (move_a) apply(w.la, va, prob.hull_a.cap());
        if (move_b) apply(w.lb, vb, prob.hull_b.cap());
    }
    const Aggregate agg = aggregate(prob, w);
    PairSolution last = finish(agg, gap, opts.max_iters);
    throw NotConverged("nearest pair did not reach gap tolerance within " + std::to_string(opts.max_iters) +
                           " iterations (gap " + show(gap) + ")",
                       std::move(last));
}

}  // namespace

PairSolution solve_nearest_pair(const PairProblem& prob, const SolverOptions& opts) {
    validate_options(opts);
    const LpConfig& cfg = prob.cfg;
    if (prob.hull_a.dim() != cfg.dim() || prob.hull_b.dim() != cfg.dim())
        throw Error(ErrorCode::DimensionMismatch, "hull dimension differs from the configuration");
    return opts.strategy == Strategy::FrankWolfe ? frank_wolfe(prob, opts) : mass_transfer(prob, opts);
}

Projection project_point(const Vector& z, const ReducedHull& hull, const LpConfig& cfg, const SolverOptions& opts) {
    ReducedHull single({UncertainPoint{z, 0.0, Label::Positive}}, 1.0);
    PairSolution sol = solve_nearest_pair({hull, std::move(single), cfg}, opts);
    return {sol.u, sol.distance};
}

}  // namespace rsvm
