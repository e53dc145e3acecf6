#include "rsvm/lp_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rsvm {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ZeroDirection: return "ZeroDirection";
        case ErrorCode::InfeasibleCap: return "InfeasibleCap";
        case ErrorCode::InvalidHullPoint: return "InvalidHullPoint";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::NonSeparable: return "NonSeparable";
        case ErrorCode::DegenerateMargin: return "DegenerateMargin";
        case ErrorCode::OverlappingSets: return "OverlappingSets";
        case ErrorCode::CoincidentPoints: return "CoincidentPoints";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

LpConfig::LpConfig(double p, std::size_t dim) : p_(p), q_(0.0), dim_(dim) {
    if (!std::isfinite(p) || !(p > 1.0))
        throw Error(ErrorCode::InvalidArgument, "exponent p must satisfy 1 < p < inf, got " + std::to_string(p));
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
    q_ = p / (p - 1.0);
    if (std::abs(1.0 / p_ + 1.0 / q_ - 1.0) > 1e-12)
        throw Error(ErrorCode::InvalidArgument, "exponent too close to 1 for a stable conjugate");
}

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// ||v||_inf is factored out before raising to r.
double scaled_norm(std::span<const double> v, double r, double scale) {
    double acc = 0.0;
    for (double x : v) acc += std::pow(std::abs(x) / scale, r);
    return scale * std::pow(acc, 1.0 / r);
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double lp_norm(std::span<const double> v, double r) {
    const double m = max_abs(v);
    if (m == 0.0) return 0.0;
    if (r == 2.0) {
        double acc = 0.0;
        for (double x : v) acc += (x / m) * (x / m);
        return m * std::sqrt(acc);
    }
    return scaled_norm(v, r, m);
}

double pairing(const Vector& x, const DualVector& w) {
    if (x.size() != w.size())
        throw Error(ErrorCode::DimensionMismatch, "pairing of vectors with different lengths");
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += x[j] * w[j];
    return acc;
}

DualVector duality_map(const Vector& x, const LpConfig& cfg) {
    DualVector w(x.size());
    if (cfg.euclidean()) {
        for (std::size_t j = 0; j < x.size(); ++j) w[j] = x[j];
        return w;
    }
    const double n = primal_norm(x, cfg);
    if (n == 0.0) return w;
    // |x_j|^{p-1} sign(x_j) / ||x||^{p-2} == n * sign(x_j) * (|x_j| / n)^{p-1}
    const double e = cfg.p() - 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) w[j] = n * sign(x[j]) * std::pow(std::abs(x[j]) / n, e);
    return w;
}

Vector norming_direction(const DualVector& g, const LpConfig& cfg) {
    const double n = dual_norm(g, cfg);
    if (n == 0.0) throw Error(ErrorCode::ZeroDirection, "norming direction of the zero functional is undefined");
    Vector s(g.size());
    if (cfg.euclidean()) {
        for (std::size_t j = 0; j < g.size(); ++j) s[j] = -g[j] / n;
        return s;
    }
    const double e = cfg.q() - 1.0;
    for (std::size_t j = 0; j < g.size(); ++j) s[j] = -sign(g[j]) * std::pow(std::abs(g[j]) / n, e);
    return s;
}

double point_hyperplane_distance(const Vector& x0, const DualVector& w, double c, const LpConfig& cfg) {
    const double n = dual_norm(w, cfg);
    if (n == 0.0) throw Error(ErrorCode::ZeroDirection, "hyperplane normal must be nonzero");
    return std::abs(pairing(x0, w) - c) / n;
}

}  // namespace rsvm
