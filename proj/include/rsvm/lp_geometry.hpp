#pragma once

// Finite-dimensional lp geometry: norms, the primal/dual pairing, the
// normalized duality mapping and point-to-hyperplane distances.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "rsvm/error.hpp"

namespace rsvm {

/// Coordinates tagged with the space they live in, so that primal points and
/// dual functionals cannot be mixed up by accident.
template <class Space>
class Coords {
public:
    Coords() = default;
    explicit Coords(std::size_t dim, double fill = 0.0) : v_(dim, fill) {}
    explicit Coords(std::vector<double> entries) : v_(std::move(entries)) {}
    Coords(std::initializer_list<double> entries) : v_(entries) {}

    std::size_t size() const noexcept { return v_.size(); }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }

    std::span<const double> entries() const noexcept { return v_; }
    std::span<double> entries() noexcept { return v_; }
    const std::vector<double>& raw() const noexcept { return v_; }

    auto begin() noexcept { return v_.begin(); }
    auto end() noexcept { return v_.end(); }
    auto begin() const noexcept { return v_.begin(); }
    auto end() const noexcept { return v_.end(); }

    Coords& operator+=(const Coords& o) {
        check_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    Coords& operator-=(const Coords& o) {
        check_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    Coords& operator*=(double s) noexcept {
        for (double& x : v_) x *= s;
        return *this;
    }
    /// this += s * o
    Coords& add_scaled(double s, const Coords& o) {
        check_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += s * o.v_[i];
        return *this;
    }

    friend Coords operator+(Coords a, const Coords& b) { return a += b; }
    friend Coords operator-(Coords a, const Coords& b) { return a -= b; }
    friend Coords operator-(Coords a) { return a *= -1.0; }
    friend Coords operator*(double s, Coords a) { return a *= s; }
    friend bool operator==(const Coords&, const Coords&) = default;

private:
    void check_same(const Coords& o) const {
        if (o.v_.size() != v_.size())
            throw Error(ErrorCode::DimensionMismatch, "coordinate vectors differ in length");
    }

    std::vector<double> v_;
};

struct PrimalSpace {};
struct DualSpace {};

/// Element of X = (R^n, ||.||_p).
using Vector = Coords<PrimalSpace>;
/// Element of X* = (R^n, ||.||_q).
using DualVector = Coords<DualSpace>;

/// Exponent pair 1 < p < inf, q = p / (p - 1), on a space of fixed dimension.
class LpConfig {
public:
    LpConfig(double p, std::size_t dim);

    double p() const noexcept { return p_; }
    double q() const noexcept { return q_; }
    std::size_t dim() const noexcept { return dim_; }
    bool euclidean() const noexcept { return p_ == 2.0; }

private:
    double p_;
    double q_;
    std::size_t dim_;
};

double lp_norm(std::span<const double> v, double r);

inline double primal_norm(const Vector& x, const LpConfig& cfg) { return lp_norm(x.entries(), cfg.p()); }
inline double dual_norm(const DualVector& w, const LpConfig& cfg) { return lp_norm(w.entries(), cfg.q()); }

/// Bilinear form <x, w> = w(x).
double pairing(const Vector& x, const DualVector& w);

/// Normalized duality mapping M(x): the unique w with <x, w> = ||x||_p^2 = ||w||_q^2.
/// M(0) = 0.
DualVector duality_map(const Vector& x, const LpConfig& cfg);

/// Unit vector s (||s||_p = 1) minimizing <s, g>; the minimum is -||g||_q.
/// Throws ZeroDirection for g = 0.
Vector norming_direction(const DualVector& g, const LpConfig& cfg);

/// |<x0, w> - c| / ||w||_q, the distance from x0 to {x : <x, w> = c}.
double point_hyperplane_distance(const Vector& x0, const DualVector& w, double c, const LpConfig& cfg);

}  // namespace rsvm
