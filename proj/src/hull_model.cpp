#include "rsvm/hull_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rsvm {

namespace {

constexpr double kMassTol = 1e-10;

void check_point(const UncertainPoint& pt, std::size_t dim, std::size_t index) {
    if (pt.center.size() != dim)
        throw Error(ErrorCode::DimensionMismatch, "point " + std::to_string(index) + " has dimension " +
                                                      std::to_string(pt.center.size()) + ", expected " +
                                                      std::to_string(dim));
    for (double x : pt.center)
        if (!std::isfinite(x))
            throw Error(ErrorCode::InvalidArgument, "point " + std::to_string(index) + " has a non-finite coordinate");
    if (!std::isfinite(pt.radius) || pt.radius < 0.0)
        throw Error(ErrorCode::InvalidArgument, "point " + std::to_string(index) + " has a negative radius");
    if (pt.label != Label::Positive && pt.label != Label::Negative)
        throw Error(ErrorCode::InvalidArgument, "point " + std::to_string(index) + " has an unknown label");
}

}  // namespace

Dataset::Dataset(std::vector<UncertainPoint> points, LpConfig cfg) : points_(std::move(points)), cfg_(cfg) {
    for (std::size_t i = 0; i < points_.size(); ++i) check_point(points_[i], cfg_.dim(), i);
}

std::vector<std::size_t> Dataset::indices(Label y) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (points_[i].label == y) out.push_back(i);
    return out;
}

bool Dataset::has_both_labels() const {
    return !indices(Label::Positive).empty() && !indices(Label::Negative).empty();
}

ReducedHull::ReducedHull(std::vector<UncertainPoint> members, double cap) : members_(std::move(members)), cap_(cap) {
    if (members_.empty()) throw Error(ErrorCode::InvalidArgument, "reduced hull needs at least one member");
    if (!(cap_ > 0.0) || cap_ > 1.0)
        throw Error(ErrorCode::InfeasibleCap, "cap must lie in (0, 1], got " + std::to_string(cap_));
    if (cap_ * static_cast<double>(members_.size()) < 1.0 - 1e-12)
        throw Error(ErrorCode::InfeasibleCap, "cap " + std::to_string(cap_) + " times " +
                                                  std::to_string(members_.size()) + " members is below 1");
    const std::size_t dim = members_.front().center.size();
    for (std::size_t i = 0; i < members_.size(); ++i) check_point(members_[i], dim, i);
    source_.resize(members_.size());
    std::iota(source_.begin(), source_.end(), std::size_t{0});
}

ReducedHull ReducedHull::of_class(const Dataset& dataset, Label y, double cap) {
    const auto idx = dataset.indices(y);
    std::vector<UncertainPoint> members;
    members.reserve(idx.size());
    for (std::size_t i : idx) members.push_back(dataset[i]);
    ReducedHull hull(std::move(members), cap);
    hull.source_ = idx;
    return hull;
}

SupportPoint ball_support(const UncertainPoint& point, const DualVector& w, Sense sense, const LpConfig& cfg) {
    const double nominal = pairing(point.center, w);
    if (point.radius == 0.0) return {nominal, point.center};
    // norming_direction throws ZeroDirection for w = 0
    Vector s = norming_direction(w, cfg);
    const double wq = dual_norm(w, cfg);
    if (sense == Sense::Max) {
        s *= -1.0;
        return {nominal + point.radius * wq, point.center + point.radius * s};
    }
    return {nominal - point.radius * wq, point.center + point.radius * s};
}

std::vector<double> capped_simplex_fill(const std::vector<double>& costs, double cap, Sense sense) {
    const std::size_t m = costs.size();
    if (m == 0 || !(cap > 0.0) || cap * static_cast<double>(m) < 1.0 - 1e-12)
        throw Error(ErrorCode::InfeasibleCap, "capped simplex is empty");
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (sense == Sense::Min)
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return costs[a] < costs[b]; });
    else
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return costs[a] > costs[b]; });
    std::vector<double> lambda(m, 0.0);
    double remaining = 1.0;
    for (std::size_t k = 0; k < m && remaining > 0.0; ++k) {
        const double take = std::min(cap, remaining);
        lambda[order[k]] = take;
        remaining -= take;
        if (remaining < 1e-15) remaining = 0.0;
    }
    return lambda;
}

HullPoint lmo_reduced_hull(const ReducedHull& hull, const DualVector& w, Sense sense, const LpConfig& cfg) {
    HullPoint hp;
    std::vector<double> costs;
    costs.reserve(hull.size());
    hp.displacements.reserve(hull.size());
    for (const auto& member : hull.members()) {
        auto sp = ball_support(member, w, sense, cfg);
        costs.push_back(sp.value);
        hp.displacements.push_back(sp.realized - member.center);
    }
    hp.coefficients = capped_simplex_fill(costs, hull.cap(), sense);
    return hp;
}

double hull_support_value(const ReducedHull& hull, const DualVector& w, Sense sense, const LpConfig& cfg) {
    std::vector<double> costs;
    costs.reserve(hull.size());
    for (const auto& member : hull.members()) costs.push_back(ball_support(member, w, sense, cfg).value);
    const auto lambda = capped_simplex_fill(costs, hull.cap(), sense);
    double v = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) v += lambda[i] * costs[i];
    return v;
}

namespace {

void validate_structure(const HullPoint& hp, const ReducedHull& hull) {
    if (hp.coefficients.size() != hull.size() || hp.displacements.size() != hull.size())
        throw Error(ErrorCode::InvalidHullPoint, "hull point does not match the number of members");
    double mass = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const double l = hp.coefficients[i];
        if (!(l >= -kMassTol) || l > hull.cap() + kMassTol)
            throw Error(ErrorCode::InvalidHullPoint, "coefficient " + std::to_string(i) + " outside [0, cap]");
        if (hp.displacements[i].size() != hull.dim())
            throw Error(ErrorCode::InvalidHullPoint, "displacement " + std::to_string(i) + " has wrong dimension");
        mass += l;
    }
    if (std::abs(mass - 1.0) > kMassTol)
        throw Error(ErrorCode::InvalidHullPoint, "coefficients sum to " + std::to_string(mass));
}

}  // namespace

void validate_hull_point(const HullPoint& hp, const ReducedHull& hull, const LpConfig& cfg) {
    validate_structure(hp, hull);
    for (std::size_t i = 0; i < hull.size(); ++i)
        if (primal_norm(hp.displacements[i], cfg) > hull.members()[i].radius + kMassTol)
            throw Error(ErrorCode::InvalidHullPoint, "displacement " + std::to_string(i) + " leaves its ball");
}

Vector hull_point_embed(const HullPoint& hp, const ReducedHull& hull) {
    validate_structure(hp, hull);
    Vector out(hull.dim());
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const double l = hp.coefficients[i];
        if (l == 0.0) continue;
        out.add_scaled(l, hull.members()[i].center);
        out.add_scaled(l, hp.displacements[i]);
    }
    return out;
}

HullPoint initial_hull_point(const ReducedHull& hull) {
    HullPoint hp;
    hp.coefficients.assign(hull.size(), 0.0);
    hp.displacements.assign(hull.size(), Vector(hull.dim()));
    double remaining = 1.0;
    for (std::size_t i = 0; i < hull.size() && remaining > 0.0; ++i) {
        const double take = std::min(hull.cap(), remaining);
        hp.coefficients[i] = take;
        remaining -= take;
        if (remaining < 1e-15) remaining = 0.0;
    }
    return hp;
}

}  // namespace rsvm
