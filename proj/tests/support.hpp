#pragma once

// Shared instances and random generators for the test suites.

#include <cmath>
#include <random>
#include <vector>

#include "rsvm/robust_svm.hpp"

namespace testkit {

using namespace rsvm;

inline UncertainPoint pt(std::initializer_list<double> c, double r, int y) {
    return {Vector(c), r, y > 0 ? Label::Positive : Label::Negative};
}

/// centers +1 / -1, radius 0.25
inline Dataset hard_1d(double p = 2.0) { return Dataset({pt({1.0}, 0.25, 1), pt({-1.0}, 0.25, -1)}, LpConfig(p, 1)); }

/// + at {0, 2}, - at {1, 3}, no radius
inline Dataset crossed_1d(double p = 2.0) {
    return Dataset({pt({0.0}, 0, 1), pt({2.0}, 0, 1), pt({1.0}, 0, -1), pt({3.0}, 0, -1)}, LpConfig(p, 1));
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

inline Vector random_vector(std::mt19937_64& rng, std::size_t dim, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Vector v(dim);
    for (auto& x : v) x = n(rng);
    return v;
}

struct RandomSpec {
    std::size_t max_per_class = 10;
    std::size_t max_dim = 5;
    double max_radius = 0.3;
};

/// Two Gaussian clouds pushed apart along a random direction until the
/// robust classes are strictly separable.
inline Dataset random_separable(std::mt19937_64& rng, double p, const RandomSpec& spec = {}) {
    std::uniform_int_distribution<std::size_t> count(1, spec.max_per_class);
    std::uniform_int_distribution<std::size_t> dims(1, spec.max_dim);
    std::uniform_real_distribution<double> radius(0.0, spec.max_radius);
    const std::size_t dim = dims(rng);
    const std::size_t mp = count(rng), mn = count(rng);
    Vector dir = random_vector(rng, dim);
    dir *= 1.0 / lp_norm(dir.entries(), 2.0);
    std::vector<UncertainPoint> base;
    for (std::size_t i = 0; i < mp + mn; ++i)
        base.push_back({random_vector(rng, dim), radius(rng), i < mp ? Label::Positive : Label::Negative});
    for (double shift = 1.0;; shift *= 1.5) {
        std::vector<UncertainPoint> pts = base;
        for (auto& q : pts) q.center.add_scaled(q.label == Label::Positive ? shift : -shift, dir);
        Dataset d(std::move(pts), LpConfig(p, dim));
        if (slater_check(d).holds) return d;
    }
}

inline Dataset flip_labels(const Dataset& d) {
    std::vector<UncertainPoint> pts = d.points();
    for (auto& q : pts) q.label = flipped(q.label);
    return Dataset(std::move(pts), d.cfg());
}

inline Dataset translate(const Dataset& d, const Vector& t) {
    std::vector<UncertainPoint> pts = d.points();
    for (auto& q : pts) q.center += t;
    return Dataset(std::move(pts), d.cfg());
}

}  // namespace testkit
