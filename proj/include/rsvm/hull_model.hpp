#pragma once

// Uncertain labeled samples, datasets, and reduced convex hulls of
// uncertainty balls with closed-form linear minimization oracles.

#include <cstddef>
#include <vector>

#include "rsvm/lp_geometry.hpp"

namespace rsvm {

enum class Label : int { Negative = -1, Positive = 1 };

inline int sign_of(Label y) noexcept { return static_cast<int>(y); }
inline Label flipped(Label y) noexcept { return y == Label::Positive ? Label::Negative : Label::Positive; }

/// Nominal sample x_i with the ball K_i = {x : ||x - x_i||_p <= radius}.
struct UncertainPoint {
    Vector center;
    double radius = 0.0;
    Label label = Label::Positive;
};

class Dataset {
public:
    /// Validates dimensions and radii; does not require both labels.
    Dataset(std::vector<UncertainPoint> points, LpConfig cfg);

    const std::vector<UncertainPoint>& points() const noexcept { return points_; }
    const LpConfig& cfg() const noexcept { return cfg_; }
    std::size_t size() const noexcept { return points_.size(); }
    const UncertainPoint& operator[](std::size_t i) const { return points_[i]; }

    /// Dataset indices carrying `y`, ascending.
    std::vector<std::size_t> indices(Label y) const;
    bool has_both_labels() const;

private:
    std::vector<UncertainPoint> points_;
    LpConfig cfg_;
};

/// K_o(D): convex combinations of member balls with every weight capped at D.
class ReducedHull {
public:
    ReducedHull(std::vector<UncertainPoint> members, double cap);

    /// Members of `dataset` with label `y`, keeping their dataset indices.
    static ReducedHull of_class(const Dataset& dataset, Label y, double cap);

    const std::vector<UncertainPoint>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    double cap() const noexcept { return cap_; }
    std::size_t dim() const noexcept { return members_.front().center.size(); }
    /// Dataset position of each member (identity when built directly).
    const std::vector<std::size_t>& source_indices() const noexcept { return source_; }

private:
    std::vector<UncertainPoint> members_;
    double cap_;
    std::vector<std::size_t> source_;
};

/// A point of a reduced hull: sum_i lambda_i (center_i + delta_i).
struct HullPoint {
    std::vector<double> coefficients;
    std::vector<Vector> displacements;
};

enum class Sense { Min, Max };

struct SupportPoint {
    double value;
    Vector realized;
};

/// Extremum of <x, w> over one uncertainty ball, with the point attaining it.
SupportPoint ball_support(const UncertainPoint& point, const DualVector& w, Sense sense, const LpConfig& cfg);

/// Greedy fill of the capped simplex {0 <= lambda <= cap, sum lambda = 1}
/// minimizing (Min) or maximizing (Max) sum lambda_i costs_i. Ties go to the
/// lower index.
std::vector<double> capped_simplex_fill(const std::vector<double>& costs, double cap, Sense sense);

/// Linear minimization (or maximization) oracle of <., w> over K_o(D).
HullPoint lmo_reduced_hull(const ReducedHull& hull, const DualVector& w, Sense sense, const LpConfig& cfg);

/// Extremal value of <., w> over K_o(D).
double hull_support_value(const ReducedHull& hull, const DualVector& w, Sense sense, const LpConfig& cfg);

/// Throws InvalidHullPoint when `hp` does not describe a point of `hull`.
void validate_hull_point(const HullPoint& hp, const ReducedHull& hull, const LpConfig& cfg);

Vector hull_point_embed(const HullPoint& hp, const ReducedHull& hull);

/// Members starting from index 0 receive weight `cap` until the mass is used up.
HullPoint initial_hull_point(const ReducedHull& hull);

}  // namespace rsvm
