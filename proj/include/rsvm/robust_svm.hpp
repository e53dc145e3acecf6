#pragma once

// Robust hard- and soft-margin classifiers trained through the nearest-pair
// problem between (reduced) class hulls, plus optimality certificates.

#include <optional>
#include <vector>

#include "rsvm/nearest_pair.hpp"

namespace rsvm {

struct HardSpec {
    Dataset dataset;
};

struct SoftSpec {
    Dataset dataset;
    double cap = 1.0;  // D
};

/// Solution of the closest-margin formulation; per-point vectors are in
/// dataset order.
struct CmSolution {
    DualVector w_cm;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> slacks;
    std::vector<double> lambdas;
    std::vector<Vector> realized;
    std::optional<double> cap;  // D; none for the hard margin
    std::optional<PairSolution> pair;
};

struct RobustClassifier {
    DualVector w;
    double b = 0.0;
    double margin = 0.0;  // 1 / ||w||_q
};

struct DualCertificate {
    std::vector<double> lambdas;
    std::vector<Vector> realized;
    double dual_objective = 0.0;
    std::optional<double> cap_bound;  // C
};

struct KktReport {
    double feasibility_residual = 0.0;
    double stationarity_residual = 0.0;
    double multiplier_sign_residual = 0.0;
    double complementarity_residual = 0.0;
    double balance_residual = 0.0;
    double tol = 0.0;
    bool passed = false;
};

struct TrainResult {
    RobustClassifier classifier;
    CmSolution cm;
    DualCertificate certificate;
    std::vector<double> slacks;  // xi of the soft primal, zero for hard margin
    double primal_objective = 0.0;
};

struct SlaterResult {
    bool holds = false;
    std::optional<RobustClassifier> witness;
    PairSolution pair;
};

inline constexpr double kKktTol = 1e-6;

/// Nearest pair of the full class hulls; holds iff their distance exceeds
/// 10 * gap_tol. The witness satisfies every robust constraint with margin 2.
SlaterResult slater_check(const Dataset& dataset, const SolverOptions& opts = {});

/// Throws NonSeparable when the class hulls (numerically) intersect.
TrainResult solve_hard(const HardSpec& spec, const SolverOptions& opts = {});

/// Throws InfeasibleCap, or DegenerateMargin when alpha - beta is not positive.
TrainResult solve_soft(const SoftSpec& spec, const SolverOptions& opts = {});

/// Soft margin parameterized by C. Bisects on D until the mapped C matches
/// within `rel_tol`; the result is approximate in that sense.
TrainResult solve_soft_c(const Dataset& dataset, double c, const SolverOptions& opts = {}, double rel_tol = 1e-4);

double worst_case_margin(const UncertainPoint& point, const RobustClassifier& clf, const LpConfig& cfg);

/// Sign of <x, w> + b: -1, 0 or +1.
int classify(const Vector& x, const RobustClassifier& clf);

RobustClassifier make_classifier(DualVector w, double b, const LpConfig& cfg);

/// Residuals of the robust hard-margin (or, with slacks, soft-margin)
/// optimality system. Never throws on a wrong-but-consistent input.
KktReport kkt_check_rsvm(const RobustClassifier& clf, const DualCertificate& cert, const Dataset& dataset,
                         double tol = kKktTol, const std::vector<double>* slacks = nullptr);

KktReport kkt_check_rcm(const CmSolution& cm, const Dataset& dataset, double tol = kKktTol);

struct DualityGap {
    double gap = 0.0;
    bool consistent = false;
};

DualityGap duality_gap(double primal_value, double dual_value, double tol = 1e-8);

/// 1/2 ||w||_q^2 + C sum xi.
double primal_objective(const RobustClassifier& clf, const std::vector<double>& slacks, std::optional<double> c,
                        const LpConfig& cfg);
/// sum lambda - 1/2 ||sum y lambda xbar||_p^2.
double dual_objective(const std::vector<double>& lambdas, const std::vector<Vector>& realized, const Dataset& dataset);

struct SvmImage {
    RobustClassifier classifier;
    DualCertificate certificate;
    std::vector<double> slacks;
};

SvmImage cm_to_svm(const CmSolution& cm, const Dataset& dataset);

/// Inverse scaling; `slacks` are the soft-margin xi (zero when omitted).
CmSolution svm_to_cm(const RobustClassifier& clf, const DualCertificate& cert, const Dataset& dataset,
                     const std::vector<double>* slacks = nullptr);

}  // namespace rsvm
