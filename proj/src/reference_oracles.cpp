#include "rsvm/reference_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <tuple>

namespace rsvm::oracle {

namespace {

using Flat = std::vector<double>;

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a[j] * b[j];
    return s;
}

// ---------------------------------------------------------------------------
// Weight grid

struct GridHull {
    std::size_t count = 0;
    std::size_t dim = 0;
    Flat sums;     // count x dim, sum_i lambda_i c_i
    Flat radius;   // sum_i lambda_i r_i
    std::vector<std::vector<int>> weights;  // grid numerators
};

// Number of ways to write n as m parts in [0, k].
double count_compositions(int n, std::size_t m, int k) {
    std::vector<double> ways(n + 1, 0.0);
    ways[0] = 1.0;
    for (std::size_t part = 0; part < m; ++part) {
        std::vector<double> next(n + 1, 0.0);
        double window = 0.0;
        for (int s = 0; s <= n; ++s) {
            window += ways[s];
            if (s - k - 1 >= 0) window -= ways[s - k - 1];
            next[s] = window;
        }
        ways.swap(next);
    }
    return ways[n];
}

GridHull enumerate(const ReducedHull& hull, int n, int k) {
    GridHull g;
    g.dim = hull.dim();
    const std::size_t m = hull.size();
    std::vector<int> w(m, 0);
    auto emit = [&] {
        const std::size_t base = g.sums.size();
        g.sums.resize(base + g.dim, 0.0);
        double r = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (w[i] == 0) continue;
            const double l = static_cast<double>(w[i]) / n;
            const auto& c = hull.members()[i].center;
            for (std::size_t j = 0; j < g.dim; ++j) g.sums[base + j] += l * c[j];
            r += l * hull.members()[i].radius;
        }
        g.radius.push_back(r);
        g.weights.push_back(w);
        ++g.count;
    };
    // depth-first over the first m-1 parts; the last part takes the remainder
    auto rec = [&](auto&& self, std::size_t i, int left) -> void {
        if (i + 1 == m) {
            if (left <= k) {
                w[i] = left;
                emit();
                w[i] = 0;
            }
            return;
        }
        for (int v = 0; v <= std::min(k, left); ++v) {
            w[i] = v;
            self(self, i + 1, left - v);
        }
        w[i] = 0;
    };
    rec(rec, 0, n);
    return g;
}

struct Best {
    double value = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    std::size_t j = 0;
    bool operator<(const Best& o) const { return std::tie(value, i, j) < std::tie(o.value, o.i, o.j); }
};

BruteResult weight_grid(const ReducedHull& a, const ReducedHull& b, const LpConfig& cfg, int n, int ka, int kb,
                        Execution ex) {
    const GridHull ga = enumerate(a, n, ka);
    const GridHull gb = enumerate(b, n, kb);
    const std::size_t dim = cfg.dim();
    const double p = cfg.p();
    const long na = static_cast<long>(ga.count);

    auto scan_row = [&](std::size_t i, Best& best, Flat& z) {
        for (std::size_t jj = 0; jj < gb.count; ++jj) {
            for (std::size_t d = 0; d < dim; ++d) z[d] = ga.sums[i * dim + d] - gb.sums[jj * dim + d];
            const double value = std::max(0.0, lp_norm(z, p) - ga.radius[i] - gb.radius[jj]);
            const Best cand{value, i, jj};
            if (cand < best) best = cand;
        }
    };

    Best best;
    if (ex == Execution::Serial) {
        Flat z(dim);
        for (long i = 0; i < na; ++i) scan_row(static_cast<std::size_t>(i), best, z);
    } else {
#pragma omp parallel
        {
            Best local;
            Flat z(dim);
#pragma omp for schedule(static) nowait
            for (long i = 0; i < na; ++i) scan_row(static_cast<std::size_t>(i), local, z);
#pragma omp critical
            if (local < best) best = local;
        }
    }

    // realize the pair with offsets along the center difference
    Flat z0(dim);
    for (std::size_t d = 0; d < dim; ++d) z0[d] = ga.sums[best.i * dim + d] - gb.sums[best.j * dim + d];
    const double n0 = lp_norm(z0, p);
    const double ra = ga.radius[best.i], rb = gb.radius[best.j];
    const double denom = std::max(n0, ra + rb);
    BruteResult res;
    res.method = BruteMethod::WeightGrid;
    res.distance = best.value;
    res.u = Vector(dim);
    res.v = Vector(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        const double shift = denom > 0.0 ? z0[d] / denom : 0.0;
        res.u[d] = ga.sums[best.i * dim + d] - ra * shift;
        res.v[d] = gb.sums[best.j * dim + d] + rb * shift;
    }
    res.evaluations = static_cast<double>(ga.count) * static_cast<double>(gb.count);
    return res;
}

// ---------------------------------------------------------------------------
// Direction grid

// Greedy capped weights for ascending (min) or descending (max) values.
std::vector<double> greedy_weights(const Flat& values, double cap, bool ascending) {
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return ascending ? values[x] < values[y] : values[x] > values[y];
    });
    std::vector<double> lam(values.size(), 0.0);
    double left = 1.0;
    for (std::size_t idx : order) {
        if (left <= 1e-15) break;
        lam[idx] = std::min(cap, left);
        left -= lam[idx];
    }
    return lam;
}

struct Separation {
    double gap;
    std::vector<double> la, lb;
};

// min over A of <., w> minus max over B of <., w>, for ||w||_q = 1
Separation separation(const ReducedHull& a, const ReducedHull& b, const Flat& w) {
    const std::size_t dim = w.size();
    Flat va(a.size()), vb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        va[i] = dot(a.members()[i].center.raw().data(), w.data(), dim) - a.members()[i].radius;
    for (std::size_t j = 0; j < b.size(); ++j)
        vb[j] = dot(b.members()[j].center.raw().data(), w.data(), dim) + b.members()[j].radius;
    Separation s{0.0, greedy_weights(va, a.cap(), true), greedy_weights(vb, b.cap(), false)};
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) lo += s.la[i] * va[i];
    for (std::size_t j = 0; j < vb.size(); ++j) hi += s.lb[j] * vb[j];
    s.gap = lo - hi;
    return s;
}

Flat unit_direction(std::size_t dim, std::size_t index, std::size_t total, double q) {
    Flat w(dim);
    if (dim == 1) {
        w[0] = index == 0 ? 1.0 : -1.0;
        return w;
    }
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(index) / static_cast<double>(total);
    w[0] = std::cos(theta);
    w[1] = std::sin(theta);
    const double n = lp_norm(w, q);
    w[0] /= n;
    w[1] /= n;
    return w;
}

BruteResult direction_grid(const ReducedHull& a, const ReducedHull& b, const LpConfig& cfg, std::size_t total,
                           Execution ex) {
    const std::size_t dim = cfg.dim();
    const double q = cfg.q();
    const long nt = static_cast<long>(total);
    // maximize the gap; Best minimizes, so store its negation
    auto eval = [&](std::size_t t) { return -separation(a, b, unit_direction(dim, t, total, q)).gap; };

    Best best;
    if (ex == Execution::Serial) {
        for (long t = 0; t < nt; ++t) {
            const Best cand{eval(static_cast<std::size_t>(t)), static_cast<std::size_t>(t), 0};
            if (cand < best) best = cand;
        }
    } else {
#pragma omp parallel
        {
            Best local;
#pragma omp for schedule(static) nowait
            for (long t = 0; t < nt; ++t) {
                const Best cand{eval(static_cast<std::size_t>(t)), static_cast<std::size_t>(t), 0};
                if (cand < local) local = cand;
            }
#pragma omp critical
            if (local < best) best = local;
        }
    }

    const Flat w = unit_direction(dim, best.i, total, q);
    const Separation s = separation(a, b, w);
    // primal unit vector attaining <x, w> = ||w||_q = 1
    Flat x(dim);
    for (std::size_t d = 0; d < dim; ++d) x[d] = (w[d] > 0.0 ? 1.0 : (w[d] < 0.0 ? -1.0 : 0.0)) * std::pow(std::abs(w[d]), q - 1.0);

    BruteResult res;
    res.method = BruteMethod::DirectionGrid;
    res.distance = std::max(0.0, s.gap);
    res.u = Vector(dim);
    res.v = Vector(dim);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t d = 0; d < dim; ++d)
            res.u[d] += s.la[i] * (a.members()[i].center[d] - a.members()[i].radius * x[d]);
    for (std::size_t j = 0; j < b.size(); ++j)
        for (std::size_t d = 0; d < dim; ++d)
            res.v[d] += s.lb[j] * (b.members()[j].center[d] + b.members()[j].radius * x[d]);
    res.evaluations = static_cast<double>(total) * static_cast<double>(a.size() + b.size());
    return res;
}

// ---------------------------------------------------------------------------
// Sampling

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct SplitMix64 {
    using result_type = std::uint64_t;
    std::uint64_t state;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() {
        state += 0x9e3779b97f4a7c15ULL;
        return mix64(state);
    }
};

// Uniform point of the unit l_p ball (generalized Gaussian construction).
void unit_ball_sample(SplitMix64& rng, double p, Flat& out) {
    std::gamma_distribution<double> gamma(1.0 / p, 1.0);
    std::exponential_distribution<double> expo(1.0);
    double acc = 0.0;
    for (double& g : out) {
        const double mag = std::pow(gamma(rng), 1.0 / p);
        g = (rng() & 1ULL) ? mag : -mag;
        acc += std::pow(mag, p);
    }
    acc += expo(rng);
    const double scale = std::pow(acc, -1.0 / p);
    for (double& g : out) g *= scale;
}

// ---------------------------------------------------------------------------
// Euclidean reference

void project_simplex(double* v, std::size_t n) {
    std::vector<double> s(v, v + n);
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cum += s[k];
        const double t = (cum - 1.0) / static_cast<double>(k + 1);
        if (s[k] - t > 0.0) theta = t;
    }
    for (std::size_t k = 0; k < n; ++k) v[k] = std::max(0.0, v[k] - theta);
}

struct Reduced {
    std::size_t dim, na, nb;
    Flat centers;  // (na + nb) x dim, A first
    Flat radius;

    struct Eval {
        double f;
        double h;
        double norm;
        Flat z0;
    };

    Eval evaluate(const Flat& lam) const {
        Eval e{0.0, 0.0, 0.0, Flat(dim, 0.0)};
        double shrink = 0.0;
        for (std::size_t i = 0; i < na + nb; ++i) {
            const double sgn = i < na ? 1.0 : -1.0;
            for (std::size_t d = 0; d < dim; ++d) e.z0[d] += sgn * lam[i] * centers[i * dim + d];
            shrink += lam[i] * radius[i];
        }
        e.norm = lp_norm(e.z0, 2.0);
        e.h = e.norm - shrink;
        e.f = e.h > 0.0 ? 0.5 * e.h * e.h : 0.0;
        return e;
    }

    Flat gradient(const Eval& e) const {
        Flat g(na + nb, 0.0);
        if (e.h <= 0.0) return g;
        for (std::size_t i = 0; i < na + nb; ++i) {
            const double sgn = i < na ? 1.0 : -1.0;
            g[i] = e.h * (sgn * dot(&centers[i * dim], e.z0.data(), dim) / e.norm - radius[i]);
        }
        return g;
    }

    void project(Flat& lam) const {
        project_simplex(lam.data(), na);
        project_simplex(lam.data() + na, nb);
    }

    // gradient minus its per-block minimum
    Flat centered(const Flat& g) const {
        double ma = std::numeric_limits<double>::infinity(), mb = ma;
        for (std::size_t i = 0; i < na; ++i) ma = std::min(ma, g[i]);
        for (std::size_t i = na; i < na + nb; ++i) mb = std::min(mb, g[i]);
        Flat c(g);
        for (std::size_t i = 0; i < na + nb; ++i) c[i] -= i < na ? ma : mb;
        return c;
    }

    double fw_gap(const Flat& lam, const Flat& g) const {
        const Flat c = centered(g);
        double gap = 0.0;
        for (std::size_t i = 0; i < na + nb; ++i) gap += lam[i] * c[i];
        return gap;
    }

    double slope(const Flat& lam, const Flat& dir, double t) const {
        Flat x(lam);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += t * dir[i];
        const Flat c = centered(gradient(evaluate(x)));
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += c[i] * dir[i];
        return s;
    }
};

}  // namespace

double hull_diameter(const ReducedHull& a, const ReducedHull& b, const LpConfig& cfg) {
    std::vector<const UncertainPoint*> all;
    for (const auto& m : a.members()) all.push_back(&m);
    for (const auto& m : b.members()) all.push_back(&m);
    double diam = 0.0;
    Flat diff(cfg.dim());
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i; j < all.size(); ++j) {
            for (std::size_t d = 0; d < cfg.dim(); ++d) diff[d] = all[i]->center[d] - all[j]->center[d];
            diam = std::max(diam, lp_norm(diff, cfg.p()) + all[i]->radius + all[j]->radius);
        }
    return diam;
}

BruteResult brute_nearest_pair(const ReducedHull& a, const ReducedHull& b, const LpConfig& cfg,
                               const OracleOptions& opts) {
    if (!(opts.grid_step > 0.0) || opts.grid_step > 1.0)
        throw Error(ErrorCode::InvalidArgument, "grid_step must lie in (0, 1]");
    if (a.dim() != cfg.dim() || b.dim() != cfg.dim())
        throw Error(ErrorCode::DimensionMismatch, "hull dimension differs from the configuration");
    const int n = static_cast<int>(std::lround(1.0 / opts.grid_step));
    const int ka = static_cast<int>(std::floor(a.cap() * n + 1e-9));
    const int kb = static_cast<int>(std::floor(b.cap() * n + 1e-9));
    const double na = count_compositions(n, a.size(), ka);
    const double nb = count_compositions(n, b.size(), kb);
    if (na >= 1.0 && nb >= 1.0 && na * nb <= opts.budget) return weight_grid(a, b, cfg, n, ka, kb, opts.execution);

    if (cfg.dim() <= 2) {
        const std::size_t total =
            cfg.dim() == 1 ? 2 : static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / opts.grid_step));
        if (static_cast<double>(total) * static_cast<double>(a.size() + b.size()) <= opts.budget)
            return direction_grid(a, b, cfg, total, opts.execution);
    }
    throw Error(ErrorCode::BudgetExceeded, "grid oracle exceeds its evaluation budget");
}

double sampled_worst_case_margin(const UncertainPoint& point, const RobustClassifier& clf, const LpConfig& cfg,
                                 const OracleOptions& opts) {
    if (opts.sample_count < 1) throw Error(ErrorCode::InvalidArgument, "sample_count must be positive");
    const double y = sign_of(point.label);
    const std::size_t dim = cfg.dim();
    const long count = static_cast<long>(opts.sample_count);
    const std::uint64_t seed = mix64(opts.rng_seed ^ 0x5851f42d4c957f2dULL);

    auto sample_value = [&](long s, Flat& delta) {
        SplitMix64 rng{mix64(seed + mix64(static_cast<std::uint64_t>(s)))};
        unit_ball_sample(rng, cfg.p(), delta);
        double v = 0.0;
        for (std::size_t d = 0; d < dim; ++d) v += (point.center[d] + point.radius * delta[d]) * clf.w[d];
        return y * (v + clf.b);
    };

    double best = std::numeric_limits<double>::infinity();
    if (opts.execution == Execution::Serial) {
        Flat delta(dim);
        for (long s = 0; s < count; ++s) best = std::min(best, sample_value(s, delta));
    } else {
#pragma omp parallel
        {
            Flat delta(dim);
#pragma omp for schedule(static) reduction(min : best)
            for (long s = 0; s < count; ++s) best = std::min(best, sample_value(s, delta));
        }
    }
    return best;
}

RobustClassifier reference_svm_euclidean(const Dataset& dataset, const EuclideanOptions& opts) {
    const LpConfig& cfg = dataset.cfg();
    if (!cfg.euclidean()) throw Error(ErrorCode::InvalidArgument, "the Euclidean reference requires p = 2");
    if (dataset.size() > 50) throw Error(ErrorCode::InvalidArgument, "the Euclidean reference handles m <= 50");
    const auto pos = dataset.indices(Label::Positive);
    const auto neg = dataset.indices(Label::Negative);
    if (pos.empty() || neg.empty()) throw Error(ErrorCode::InvalidArgument, "dataset needs points of both labels");

    Reduced r{cfg.dim(), pos.size(), neg.size(), {}, {}};
    for (const auto* idx : {&pos, &neg})
        for (std::size_t i : *idx) {
            for (double c : dataset[i].center) r.centers.push_back(c);
            r.radius.push_back(dataset[i].radius);
        }

    const std::size_t n = r.na + r.nb;
    Flat x(n, 0.0);
    for (std::size_t i = 0; i < r.na; ++i) x[i] = 1.0 / static_cast<double>(r.na);
    for (std::size_t j = 0; j < r.nb; ++j) x[r.na + j] = 1.0 / static_cast<double>(r.nb);

    // spectral projected gradient, exact line search on the directional derivative
    auto ex = r.evaluate(x);
    Flat g = r.gradient(ex);
    double step = 1.0;
    bool done = false;
    Flat trial(n), dir(n);
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        if (ex.f <= 0.5e-18) throw Error(ErrorCode::NonSeparable, "class hulls intersect");
        if (r.fw_gap(x, g) <= opts.gap_tol * (1.0 + ex.f)) {
            done = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - step * g[i];
        r.project(trial);
        for (std::size_t i = 0; i < n; ++i) dir[i] = trial[i] - x[i];
        const double s0 = r.slope(x, dir, 0.0);
        if (!(s0 < 0.0)) {
            // projected step collapsed; fall back to the Frank-Wolfe vertex
            const Flat c = r.centered(g);
            std::size_t ia = 0, ib = r.na;
            for (std::size_t i = 0; i < r.na; ++i)
                if (c[i] == 0.0) {
                    ia = i;
                    break;
                }
            for (std::size_t i = r.na; i < n; ++i)
                if (c[i] == 0.0) {
                    ib = i;
                    break;
                }
            for (std::size_t i = 0; i < n; ++i) dir[i] = ((i == ia || i == ib) ? 1.0 : 0.0) - x[i];
            if (!(r.slope(x, dir, 0.0) < 0.0)) break;
        }
        double t = 1.0;
        if (r.slope(x, dir, 1.0) > 0.0) {
            double lo = 0.0, hi = 1.0;
            for (int k = 0; k < 100 && hi - lo > 1e-17; ++k) {
                const double mid = 0.5 * (lo + hi);
                (r.slope(x, dir, mid) > 0.0 ? hi : lo) = mid;
            }
            t = lo > 0.0 ? lo : hi;
        }
        for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + t * dir[i];
        const auto et = r.evaluate(trial);
        const Flat gt = r.gradient(et);
        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double si = trial[i] - x[i];
            ss += si * si;
            sy += si * (gt[i] - g[i]);
        }
        step = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 1e12;
        x = trial;
        ex = et;
        g = gt;
    }
    if (!done && ex.f <= 0.5e-12) throw Error(ErrorCode::NonSeparable, "class hulls intersect");
    if (!done) throw Error(ErrorCode::NotConverged, "Euclidean reference did not reach its gap tolerance");

    const std::size_t dim = r.dim;
    Flat z(dim);
    for (std::size_t d = 0; d < dim; ++d) z[d] = ex.h / ex.norm * ex.z0[d];
    const double zn = lp_norm(z, 2.0);
    double alpha = std::numeric_limits<double>::infinity();
    double beta = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = dot(&r.centers[i * dim], z.data(), dim);
        if (i < r.na)
            alpha = std::min(alpha, v - r.radius[i] * zn);
        else
            beta = std::max(beta, v + r.radius[i] * zn);
    }
    if (!(alpha > beta)) throw Error(ErrorCode::NonSeparable, "no positive margin");
    RobustClassifier clf;
    clf.w = DualVector(dim);
    for (std::size_t d = 0; d < dim; ++d) clf.w[d] = 2.0 * z[d] / (alpha - beta);
    clf.b = -(alpha + beta) / (alpha - beta);
    clf.margin = 1.0 / lp_norm(clf.w.entries(), 2.0);
    return clf;
}

}  // namespace rsvm::oracle
