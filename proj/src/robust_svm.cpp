#include "rsvm/robust_svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace rsvm {

namespace {

std::string show(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct ClassHulls {
    ReducedHull pos;
    ReducedHull neg;
};

ClassHulls class_hulls(const Dataset& dataset, double cap) {
    if (!dataset.has_both_labels())
        throw Error(ErrorCode::InvalidArgument, "dataset needs points of both labels");
    return {ReducedHull::of_class(dataset, Label::Positive, cap), ReducedHull::of_class(dataset, Label::Negative, cap)};
}

std::size_t order_rank(double cap) {
    // ceil(1/D), robust to 1/D landing a hair above an integer
    return static_cast<std::size_t>(std::max(1.0, std::ceil(1.0 / cap - 1e-9)));
}

// sum_{+} lambda xbar - sum_{-} lambda xbar
Vector signed_combination(const std::vector<double>& lambdas, const std::vector<Vector>& realized,
                          const Dataset& dataset) {
    const std::size_t dim = dataset.cfg().dim();
    Vector pos(dim), neg(dim);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (lambdas[i] == 0.0) continue;
        if (dataset[i].label == Label::Positive)
            pos.add_scaled(lambdas[i], realized[i]);
        else
            neg.add_scaled(lambdas[i], realized[i]);
    }
    return pos - neg;
}

void check_sizes(const Dataset& dataset, std::size_t lambdas, std::size_t realized) {
    if (lambdas != dataset.size() || realized != dataset.size())
        throw Error(ErrorCode::DimensionMismatch, "certificate does not match the dataset size");
}

// theta in [0, 1] moves alpha and beta across the flat range between the k-th
// and (k+1)-th order statistics, which only exists when k D = 1.
CmSolution build_cm(const Dataset& dataset, const ClassHulls& hulls, PairSolution pair, std::optional<double> cap,
                    double theta = 0.0) {
    const LpConfig& cfg = dataset.cfg();
    CmSolution cm;
    cm.cap = cap;
    cm.w_cm = duality_map(pair.u - pair.v, cfg);

    const auto& pm = hulls.pos.members();
    const auto& nm = hulls.neg.members();
    std::vector<double> s(pm.size()), t(nm.size());
    for (std::size_t i = 0; i < pm.size(); ++i) s[i] = ball_support(pm[i], cm.w_cm, Sense::Min, cfg).value;
    for (std::size_t j = 0; j < nm.size(); ++j) t[j] = ball_support(nm[j], cm.w_cm, Sense::Max, cfg).value;

    const std::size_t k = cap ? order_rank(*cap) : 1;
    std::vector<double> ss = s, ts = t;
    std::sort(ss.begin(), ss.end());
    std::sort(ts.begin(), ts.end(), std::greater<>());
    cm.alpha = ss[std::min(k, ss.size()) - 1];
    cm.beta = ts[std::min(k, ts.size()) - 1];
    if (theta > 0.0) {
        if (k < ss.size()) cm.alpha += theta * (ss[k] - ss[k - 1]);
        if (k < ts.size()) cm.beta -= theta * (ts[k - 1] - ts[k]);
    }

    const std::size_t m = dataset.size();
    cm.slacks.assign(m, 0.0);
    cm.lambdas.assign(m, 0.0);
    cm.realized.assign(m, Vector(cfg.dim()));
    const auto& ps = hulls.pos.source_indices();
    const auto& ns = hulls.neg.source_indices();
    for (std::size_t i = 0; i < pm.size(); ++i) {
        cm.slacks[ps[i]] = std::max(0.0, cm.alpha - s[i]);
        cm.lambdas[ps[i]] = pair.hp_a.coefficients[i];
        cm.realized[ps[i]] = pm[i].center + pair.hp_a.displacements[i];
    }
    for (std::size_t j = 0; j < nm.size(); ++j) {
        cm.slacks[ns[j]] = std::max(0.0, t[j] - cm.beta);
        cm.lambdas[ns[j]] = pair.hp_b.coefficients[j];
        cm.realized[ns[j]] = nm[j].center + pair.hp_b.displacements[j];
    }
    cm.pair = std::move(pair);
    return cm;
}

// Re-solves close hulls with the pair tolerance scaled by (alpha - beta)^2 / 4.
CmSolution refine(const Dataset& dataset, const ClassHulls& hulls, CmSolution cm, const SolverOptions& opts) {
    const double ab = cm.alpha - cm.beta;
    const double scale = 0.25 * ab * ab;
    if (!(ab > 0.0) || scale >= 1.0) return cm;
    SolverOptions tight = opts;
    tight.gap_tol = std::max(opts.gap_tol * scale, 1e-300);
    PairSolution pair;
    try {
        pair = solve_nearest_pair({hulls.pos, hulls.neg, dataset.cfg()}, tight);
    } catch (const NotConverged& e) {
        if (!(e.best().gap < cm.pair->gap)) return cm;
        pair = e.best();
    }
    pair.touching = cm.pair->touching;
    return build_cm(dataset, hulls, std::move(pair), cm.cap);
}

TrainResult finalize(const Dataset& dataset, CmSolution cm) {
    SvmImage image = cm_to_svm(cm, dataset);
    TrainResult out;
    out.classifier = std::move(image.classifier);
    out.certificate = std::move(image.certificate);
    out.slacks = std::move(image.slacks);
    out.primal_objective = primal_objective(out.classifier, out.slacks, out.certificate.cap_bound, dataset.cfg());
    out.cm = std::move(cm);
    return out;
}

}  // namespace

RobustClassifier make_classifier(DualVector w, double b, const LpConfig& cfg) {
    const double n = dual_norm(w, cfg);
    if (n == 0.0) throw Error(ErrorCode::ZeroDirection, "classifier normal must be nonzero");
    return {std::move(w), b, 1.0 / n};
}

SlaterResult slater_check(const Dataset& dataset, const SolverOptions& opts) {
    const ClassHulls hulls = class_hulls(dataset, 1.0);
    SlaterResult res;
    res.pair = solve_nearest_pair({hulls.pos, hulls.neg, dataset.cfg()}, opts);
    res.holds = res.pair.distance > 10.0 * opts.gap_tol;
    if (!res.holds) return res;

    const LpConfig& cfg = dataset.cfg();
    const DualVector w = duality_map(res.pair.u - res.pair.v, cfg);
    double alpha = std::numeric_limits<double>::infinity();
    double beta = -std::numeric_limits<double>::infinity();
    for (const auto& pt : hulls.pos.members()) alpha = std::min(alpha, ball_support(pt, w, Sense::Min, cfg).value);
    for (const auto& pt : hulls.neg.members()) beta = std::max(beta, ball_support(pt, w, Sense::Max, cfg).value);
    if (!(alpha > beta)) {
        res.holds = false;
        return res;
    }
    // separating offsets pulled a quarter of the gap inwards
    const double quarter = 0.25 * (alpha - beta);
    const double a = alpha - quarter, b = beta + quarter;
    res.witness = make_classifier((2.0 / (a - b)) * w, -(a + b) / (a - b), cfg);
    return res;
}

TrainResult solve_hard(const HardSpec& spec, const SolverOptions& opts) {
    SlaterResult slater = slater_check(spec.dataset, opts);
    if (!slater.holds)
        throw Error(ErrorCode::NonSeparable, "class hulls intersect (distance " +
                                                 show(slater.pair.distance) + "); use the soft margin");
    const ClassHulls hulls = class_hulls(spec.dataset, 1.0);
    CmSolution cm = build_cm(spec.dataset, hulls, std::move(slater.pair), std::nullopt);
    return finalize(spec.dataset, refine(spec.dataset, hulls, std::move(cm), opts));
}

TrainResult solve_soft(const SoftSpec& spec, const SolverOptions& opts) {
    const ClassHulls hulls = class_hulls(spec.dataset, spec.cap);
    PairSolution pair = solve_nearest_pair({hulls.pos, hulls.neg, spec.dataset.cfg()}, opts);
    if (pair.touching)
        throw Error(ErrorCode::DegenerateMargin,
                    "reduced hulls intersect at D = " + show(spec.cap) + "; decrease D");
    CmSolution cm = build_cm(spec.dataset, hulls, std::move(pair), spec.cap);
    if (!(cm.alpha - cm.beta > opts.gap_tol))
        throw Error(ErrorCode::DegenerateMargin, "alpha - beta = " + show(cm.alpha - cm.beta));
    return finalize(spec.dataset, refine(spec.dataset, hulls, std::move(cm), opts));
}

TrainResult solve_soft_c(const Dataset& dataset, double c, const SolverOptions& opts, double rel_tol) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
    if (!dataset.has_both_labels())
        throw Error(ErrorCode::InvalidArgument, "dataset needs points of both labels");
    const double smallest =
        static_cast<double>(std::min(dataset.indices(Label::Positive).size(), dataset.indices(Label::Negative).size()));

    auto attempt = [&](double d) -> std::optional<TrainResult> {
        try {
            return solve_soft({dataset, d}, opts);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DegenerateMargin) return std::nullopt;
            throw;
        }
    };
    auto mapped_c = [](const std::optional<TrainResult>& r) {
        return r ? *r->certificate.cap_bound : std::numeric_limits<double>::infinity();
    };
    auto close = [&](double got) { return std::abs(got - c) <= rel_tol * c; };

    double lo = 1.0 / smallest, hi = 1.0;
    auto r_lo = attempt(lo);
    if (!r_lo) throw Error(ErrorCode::DegenerateMargin, "hulls intersect even at the smallest feasible D");
    if (close(mapped_c(r_lo))) return *r_lo;
    if (c < mapped_c(r_lo))
        throw Error(ErrorCode::InvalidArgument,
                    "C = " + show(c) + " is below the reachable minimum " + show(mapped_c(r_lo)));
    auto r_hi = attempt(hi);
    if (close(mapped_c(r_hi))) return *r_hi;
    if (c > mapped_c(r_hi))
        throw Error(ErrorCode::InvalidArgument,
                    "C = " + show(c) + " exceeds the reachable maximum " + show(mapped_c(r_hi)));
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto r = attempt(mid);
        const double got = mapped_c(r);
        if (close(got)) return *r;
        if (got < c)
            lo = mid;
        else
            hi = mid;
    }

    // C jumps at D = 1/k; inside the jump, move the offsets across their flat range
    const double k = std::round(1.0 / hi);
    const double d = 1.0 / k;
    if (!(k >= 1.0) || std::abs(d - hi) > 1e-9 * hi)
        throw Error(ErrorCode::NotConverged, "bisection on D did not match C = " + show(c));
    auto at_d = attempt(d);
    if (!at_d) throw Error(ErrorCode::NotConverged, "bisection on D did not match C = " + show(c));
    const ClassHulls hulls = class_hulls(dataset, d);
    const CmSolution flat = build_cm(dataset, hulls, *at_d->cm.pair, d, 1.0);
    const double width0 = at_d->cm.alpha - at_d->cm.beta;
    const double width1 = flat.alpha - flat.beta;
    const double target = 2.0 * d / c;
    if (!(width1 > width0) || target < width0 || target > width1) {
        if (close(mapped_c(at_d))) return *at_d;
        throw Error(ErrorCode::NotConverged, "bisection on D did not match C = " + show(c));
    }
    const double theta = (target - width0) / (width1 - width0);
    TrainResult out = finalize(dataset, build_cm(dataset, hulls, *at_d->cm.pair, d, theta));
    if (!close(*out.certificate.cap_bound))
        throw Error(ErrorCode::NotConverged, "bisection on D did not match C = " + show(c));
    return out;
}

double worst_case_margin(const UncertainPoint& point, const RobustClassifier& clf, const LpConfig& cfg) {
    const double y = sign_of(point.label);
    return y * (pairing(point.center, clf.w) + clf.b) - point.radius * dual_norm(clf.w, cfg);
}

int classify(const Vector& x, const RobustClassifier& clf) {
    const double v = pairing(x, clf.w) + clf.b;
    return (v > 0.0) - (v < 0.0);
}

KktReport kkt_check_rsvm(const RobustClassifier& clf, const DualCertificate& cert, const Dataset& dataset, double tol,
                         const std::vector<double>* slacks) {
    check_sizes(dataset, cert.lambdas.size(), cert.realized.size());
    if (slacks && slacks->size() != dataset.size())
        throw Error(ErrorCode::DimensionMismatch, "slacks do not match the dataset size");
    const LpConfig& cfg = dataset.cfg();
    KktReport r;
    r.tol = tol;
    double balance = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& pt = dataset[i];
        const double y = sign_of(pt.label);
        const double xi = slacks ? (*slacks)[i] : 0.0;
        const double lam = cert.lambdas[i];
        r.feasibility_residual = std::max(r.feasibility_residual, 1.0 - xi - worst_case_margin(pt, clf, cfg));
        r.feasibility_residual = std::max(r.feasibility_residual, -xi);
        r.feasibility_residual =
            std::max(r.feasibility_residual, primal_norm(cert.realized[i] - pt.center, cfg) - pt.radius);
        r.multiplier_sign_residual = std::max(r.multiplier_sign_residual, -lam);
        if (cert.cap_bound) r.multiplier_sign_residual = std::max(r.multiplier_sign_residual, lam - *cert.cap_bound);
        const double active = 1.0 - xi - y * (pairing(cert.realized[i], clf.w) + clf.b);
        r.complementarity_residual = std::max(r.complementarity_residual, std::abs(lam * active));
        if (cert.cap_bound && slacks)
            r.complementarity_residual = std::max(r.complementarity_residual, std::abs((*cert.cap_bound - lam) * xi));
        balance += y * lam;
    }
    r.balance_residual = std::abs(balance);
    const DualVector target = duality_map(signed_combination(cert.lambdas, cert.realized, dataset), cfg);
    r.stationarity_residual = dual_norm(clf.w - target, cfg);
    r.passed = r.feasibility_residual <= tol && r.stationarity_residual <= tol && r.multiplier_sign_residual <= tol &&
               r.complementarity_residual <= tol && r.balance_residual <= tol;
    return r;
}

KktReport kkt_check_rcm(const CmSolution& cm, const Dataset& dataset, double tol) {
    check_sizes(dataset, cm.lambdas.size(), cm.realized.size());
    if (cm.slacks.size() != dataset.size())
        throw Error(ErrorCode::DimensionMismatch, "slacks do not match the dataset size");
    const LpConfig& cfg = dataset.cfg();
    KktReport r;
    r.tol = tol;
    double mass_pos = 0.0, mass_neg = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& pt = dataset[i];
        const double xi = cm.slacks[i];
        const double lam = cm.lambdas[i];
        const bool pos = pt.label == Label::Positive;
        const double support = ball_support(pt, cm.w_cm, pos ? Sense::Min : Sense::Max, cfg).value;
        const double violation = pos ? cm.alpha - xi - support : support - cm.beta - xi;
        r.feasibility_residual = std::max({r.feasibility_residual, violation, -xi});
        r.feasibility_residual =
            std::max(r.feasibility_residual, primal_norm(cm.realized[i] - pt.center, cfg) - pt.radius);
        r.multiplier_sign_residual = std::max(r.multiplier_sign_residual, -lam);
        if (cm.cap) r.multiplier_sign_residual = std::max(r.multiplier_sign_residual, lam - *cm.cap);
        const double value = pairing(cm.realized[i], cm.w_cm);
        const double active = pos ? value - cm.alpha + xi : cm.beta + xi - value;
        r.complementarity_residual = std::max(r.complementarity_residual, std::abs(lam * active));
        const double cap = cm.cap ? *cm.cap : 1.0;
        r.complementarity_residual = std::max(r.complementarity_residual, std::abs((cap - lam) * xi));
        (pos ? mass_pos : mass_neg) += lam;
    }
    r.balance_residual = std::max(std::abs(mass_pos - 1.0), std::abs(mass_neg - 1.0));
    const DualVector target = duality_map(signed_combination(cm.lambdas, cm.realized, dataset), cfg);
    r.stationarity_residual = dual_norm(cm.w_cm - target, cfg);
    r.passed = r.feasibility_residual <= tol && r.stationarity_residual <= tol && r.multiplier_sign_residual <= tol &&
               r.complementarity_residual <= tol && r.balance_residual <= tol;
    return r;
}

DualityGap duality_gap(double primal_value, double dual_value, double tol) {
    const double gap = primal_value - dual_value;
    return {gap, std::abs(gap) <= tol * (1.0 + std::abs(primal_value))};
}

double primal_objective(const RobustClassifier& clf, const std::vector<double>& slacks, std::optional<double> c,
                        const LpConfig& cfg) {
    const double n = dual_norm(clf.w, cfg);
    double penalty = 0.0;
    if (c)
        for (double xi : slacks) penalty += xi;
    return 0.5 * n * n + (c ? *c * penalty : 0.0);
}

double dual_objective(const std::vector<double>& lambdas, const std::vector<Vector>& realized,
                      const Dataset& dataset) {
    check_sizes(dataset, lambdas.size(), realized.size());
    double mass = 0.0;
    for (double l : lambdas) mass += l;
    const double n = primal_norm(signed_combination(lambdas, realized, dataset), dataset.cfg());
    return mass - 0.5 * n * n;
}

SvmImage cm_to_svm(const CmSolution& cm, const Dataset& dataset) {
    const double denom = cm.alpha - cm.beta;
    if (!(denom > 0.0)) throw Error(ErrorCode::DegenerateMargin, "alpha - beta must be positive");
    const double scale = 2.0 / denom;
    SvmImage out;
    out.classifier = make_classifier(scale * cm.w_cm, -(cm.alpha + cm.beta) / denom, dataset.cfg());
    out.certificate.lambdas.reserve(cm.lambdas.size());
    for (double l : cm.lambdas) out.certificate.lambdas.push_back(scale * l);
    out.certificate.realized = cm.realized;
    if (cm.cap) out.certificate.cap_bound = scale * *cm.cap;
    out.certificate.dual_objective = dual_objective(out.certificate.lambdas, out.certificate.realized, dataset);
    out.slacks.reserve(cm.slacks.size());
    for (double xi : cm.slacks) out.slacks.push_back(scale * xi);
    return out;
}

CmSolution svm_to_cm(const RobustClassifier& clf, const DualCertificate& cert, const Dataset& dataset,
                     const std::vector<double>* slacks) {
    check_sizes(dataset, cert.lambdas.size(), cert.realized.size());
    double mass = 0.0;
    for (double l : cert.lambdas) mass += l;
    if (!(mass > 0.0)) throw Error(ErrorCode::DegenerateMargin, "multipliers sum to zero");
    const double scale = 2.0 / mass;
    CmSolution cm;
    cm.w_cm = scale * clf.w;
    cm.alpha = 2.0 * (1.0 - clf.b) / mass;
    cm.beta = 2.0 * (-1.0 - clf.b) / mass;
    for (double l : cert.lambdas) cm.lambdas.push_back(scale * l);
    cm.realized = cert.realized;
    cm.slacks.assign(dataset.size(), 0.0);
    if (slacks) {
        if (slacks->size() != dataset.size())
            throw Error(ErrorCode::DimensionMismatch, "slacks do not match the dataset size");
        for (std::size_t i = 0; i < slacks->size(); ++i) cm.slacks[i] = scale * (*slacks)[i];
    }
    if (cert.cap_bound) cm.cap = scale * *cert.cap_bound;
    return cm;
}

}  // namespace rsvm
