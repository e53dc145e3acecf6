#pragma once

// Brute-force and sampling oracles that avoid the solver's numerical kernels
// (only lp_norm and pairing are shared). Test-only.

#include <cstdint>
#include <string>

#include "rsvm/robust_svm.hpp"

namespace rsvm::oracle {

enum class Execution { Serial, Parallel };

struct OracleOptions {
    double grid_step = 1e-3;
    std::size_t sample_count = 100000;
    std::uint64_t rng_seed = 0;
    double budget = 1e7;  // grid evaluations
    Execution execution = Execution::Parallel;
};

enum class BruteMethod {
    /// exact weight grid with the optimal radial offsets; distance is an upper bound
    WeightGrid,
    /// grid over unit dual directions of the separation gap (dim <= 2); a lower bound
    DirectionGrid,
};

struct BruteResult {
    double distance = 0.0;
    Vector u;
    Vector v;
    BruteMethod method = BruteMethod::WeightGrid;
    double evaluations = 0;
};

/// max ||c_i - c_j|| + r_i + r_j over all members of both hulls.
double hull_diameter(const ReducedHull& a, const ReducedHull& b, const LpConfig& cfg);

/// Throws BudgetExceeded when neither grid fits `opts.budget`.
BruteResult brute_nearest_pair(const ReducedHull& a, const ReducedHull& b, const LpConfig& cfg,
                               const OracleOptions& opts = {});

/// Smallest y (<x + delta, w> + b) over `sample_count` uniform draws of delta
/// from the point's ball. Identical for a fixed seed regardless of threads.
double sampled_worst_case_margin(const UncertainPoint& point, const RobustClassifier& clf, const LpConfig& cfg,
                                 const OracleOptions& opts = {});

struct EuclideanOptions {
    double gap_tol = 1e-12;
    std::size_t max_iters = 2000000;
};

/// Hard-margin robust classifier for p = 2 by spectral projected gradient on
/// the product of simplices. Throws NonSeparable or NotConverged.
RobustClassifier reference_svm_euclidean(const Dataset& dataset, const EuclideanOptions& opts = {});

}  // namespace rsvm::oracle
