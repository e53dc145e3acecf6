#include <doctest.h>

#include <random>

#include "rsvm/reference_oracles.hpp"
#include "rsvm/robust_svm.hpp"
#include "support.hpp"

using namespace rsvm;
using testkit::pt;

namespace {

const SolverOptions kTight{1e-12, 200000};

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

double max_abs_diff(const DualVector& a, const DualVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Dataset duplicated(const Dataset& d) {
    std::vector<UncertainPoint> pts = d.points();
    for (const auto& q : d.points()) pts.push_back(q);
    return Dataset(std::move(pts), d.cfg());
}

double smallest_class(const Dataset& d) {
    return static_cast<double>(std::min(d.indices(Label::Positive).size(), d.indices(Label::Negative).size()));
}

}  // namespace

TEST_CASE("hard margin on two 1D balls") {
    const Dataset d = testkit::hard_1d();
    const auto r = solve_hard({d});
    CHECK(r.classifier.w[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(r.classifier.b) <= 1e-12);
    CHECK(r.classifier.margin == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(r.certificate.lambdas[0] == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(r.certificate.lambdas[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(r.primal_objective == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(r.certificate.dual_objective == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(r.cm.w_cm[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(r.cm.alpha == doctest::Approx(1.125).epsilon(1e-12));
    CHECK(r.cm.beta == doctest::Approx(-1.125).epsilon(1e-12));
    const auto kkt = kkt_check_rsvm(r.classifier, r.certificate, d);
    CHECK(kkt.passed);
    CHECK(kkt_check_rcm(r.cm, d).passed);
    for (const auto& q : d.points()) CHECK(worst_case_margin(q, r.classifier, d.cfg()) == doctest::Approx(1.0));
}

TEST_CASE("hard margin on two 2D points") {
    const Dataset d({pt({1, 0}, 0, 1), pt({-1, 0}, 0, -1)}, LpConfig(3.0, 2));
    const auto r = solve_hard({d});
    CHECK(r.classifier.w[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r.classifier.w[1]) <= 1e-12);
    CHECK(std::abs(r.classifier.b) <= 1e-12);
    CHECK(classify(Vector{0.3, 5}, r.classifier) == 1);
    CHECK(classify(Vector{-0.3, 5}, r.classifier) == -1);
    CHECK(classify(Vector{0.0, 5}, r.classifier) == 0);
}

TEST_CASE("soft margin on crossed 1D points") {
    const Dataset d = testkit::crossed_1d();
    CHECK(code_of([&] { solve_hard({d}); }) == ErrorCode::NonSeparable);
    const auto r = solve_soft({d, 0.5});
    CHECK(r.classifier.w[0] == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
    CHECK(r.classifier.b == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(*r.certificate.cap_bound == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(r.cm.alpha == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(r.cm.beta == doctest::Approx(-3.0).epsilon(1e-10));
    const double want[] = {0.0, 4.0 / 3.0, 4.0 / 3.0, 0.0};
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(r.slacks[i] - want[i]) <= 1e-10);
    CHECK(r.primal_objective == doctest::Approx(10.0 / 9.0).epsilon(1e-10));
    CHECK(r.certificate.dual_objective == doctest::Approx(10.0 / 9.0).epsilon(1e-10));
    CHECK(kkt_check_rsvm(r.classifier, r.certificate, d, kKktTol, &r.slacks).passed);
    CHECK(kkt_check_rcm(r.cm, d).passed);

    const auto rc = solve_soft_c(d, 1.0 / 3.0);
    CHECK(*rc.cm.cap == doctest::Approx(0.5));
    CHECK(rc.classifier.w[0] == doctest::Approx(-2.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("error classes") {
    const Dataset cross = testkit::crossed_1d();
    CHECK(code_of([&] { solve_soft({cross, 0.3}); }) == ErrorCode::InfeasibleCap);
    CHECK(code_of([&] { solve_soft({cross, 1.0}); }) == ErrorCode::DegenerateMargin);
    CHECK(*solve_soft_c(cross, 100.0).certificate.cap_bound == doctest::Approx(100.0).epsilon(1e-4));
    CHECK(code_of([&] { solve_soft_c(cross, 1e-3); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { solve_soft_c(cross, -1.0); }) == ErrorCode::InvalidArgument);
    const Dataset one_label({pt({1}, 0, 1), pt({2}, 0, 1)}, LpConfig(2.0, 1));
    CHECK(code_of([&] { solve_hard({one_label}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { make_classifier(DualVector{0.0, 0.0}, 1.0, LpConfig(2.0, 2)); }) ==
          ErrorCode::ZeroDirection);
    const auto r = solve_hard({testkit::hard_1d()});
    CHECK(code_of([&] { kkt_check_rsvm(r.classifier, r.certificate, cross); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("corrupted certificates fail the KKT check") {
    const Dataset d = testkit::hard_1d();
    const auto r = solve_hard({d});

    RobustClassifier shifted = r.classifier;
    shifted.b += 0.5;
    CHECK_FALSE(kkt_check_rsvm(shifted, r.certificate, d).passed);

    DualCertificate zero = r.certificate;
    zero.lambdas.assign(2, 0.0);
    const auto kz = kkt_check_rsvm(r.classifier, zero, d);
    CHECK_FALSE(kz.passed);
    CHECK(kz.stationarity_residual == doctest::Approx(dual_norm(r.classifier.w, d.cfg())).epsilon(1e-12));

    DualCertificate unbalanced = r.certificate;
    unbalanced.lambdas[0] -= 0.1;
    const auto ku = kkt_check_rsvm(r.classifier, unbalanced, d);
    CHECK_FALSE(ku.passed);
    CHECK(ku.balance_residual == doctest::Approx(0.1).epsilon(1e-12));

    DualCertificate negative = r.certificate;
    negative.lambdas[1] = -0.2;
    CHECK(kkt_check_rsvm(r.classifier, negative, d).multiplier_sign_residual >= 0.2);

    CmSolution cm = r.cm;
    cm.alpha += 0.3;
    CHECK_FALSE(kkt_check_rcm(cm, d).passed);
}

TEST_CASE("random instances: certificates, margins and the oracle") {
    std::mt19937_64 rng(41);
    for (double p : {1.5, 2.0, 3.0})
        for (int trial = 0; trial < 15; ++trial) {
            const Dataset d = testkit::random_separable(rng, p, {6, 4, 0.3});
            const auto r = solve_hard({d}, kTight);
            const auto kkt = kkt_check_rsvm(r.classifier, r.certificate, d);
            CHECK(kkt.passed);
            CHECK(kkt_check_rcm(r.cm, d).passed);
            CHECK(duality_gap(r.primal_objective, r.certificate.dual_objective, kKktTol).consistent);
            CHECK(r.classifier.margin == doctest::Approx(r.cm.pair->distance / 2.0).epsilon(1e-6));
            double tightest = std::numeric_limits<double>::infinity();
            for (const auto& q : d.points()) {
                const double m = worst_case_margin(q, r.classifier, d.cfg());
                CHECK(m >= 1.0 - 1e-6);
                tightest = std::min(tightest, m);
                oracle::OracleOptions o;
                o.sample_count = 2000;
                CHECK(oracle::sampled_worst_case_margin(q, r.classifier, d.cfg(), o) >= m - 1e-12);
            }
            CHECK(tightest == doctest::Approx(1.0).epsilon(1e-6));

            const auto slater = slater_check(d);
            REQUIRE(slater.holds);
            for (const auto& q : d.points()) CHECK(worst_case_margin(q, *slater.witness, d.cfg()) >= 1.0);
        }
}

TEST_CASE("label flip is exact and translation shifts only the offset") {
    std::mt19937_64 rng(42);
    for (double p : {1.5, 2.0, 3.0})
        for (int trial = 0; trial < 10; ++trial) {
            const Dataset d = testkit::random_separable(rng, p, {6, 4, 0.3});
            const auto r = solve_hard({d});
            const auto f = solve_hard({testkit::flip_labels(d)});
            CHECK(f.classifier.w == -r.classifier.w);
            CHECK(f.classifier.b == -r.classifier.b);

            const Vector t = testkit::random_vector(rng, d.cfg().dim(), 2.0);
            const auto s = solve_hard({testkit::translate(d, t)}, kTight);
            const auto r2 = solve_hard({d}, kTight);
            CHECK(max_abs_diff(s.classifier.w, r2.classifier.w) <= 1e-6 * (1.0 + dual_norm(r2.classifier.w, d.cfg())));
            CHECK(std::abs(s.classifier.b - (r2.classifier.b - pairing(t, r2.classifier.w))) <=
                  1e-6 * (1.0 + std::abs(r2.classifier.b)));
        }
}

TEST_CASE("soft margin invariants") {
    std::mt19937_64 rng(43);
    for (double p : {1.5, 2.0, 3.0})
        for (int trial = 0; trial < 10; ++trial) {
            const Dataset d = testkit::random_separable(rng, p, {6, 3, 0.3});

            SUBCASE("D = 1 reproduces the hard margin") {
                const auto h = solve_hard({d}, kTight);
                const auto s = solve_soft({d, 1.0}, kTight);
                CHECK(max_abs_diff(s.classifier.w, h.classifier.w) <= 1e-6);
                CHECK(s.classifier.b == doctest::Approx(h.classifier.b).epsilon(1e-6));
            }
            SUBCASE("duplicating every point with half the cap changes nothing") {
                const double cap = std::min(1.0, 2.0 / smallest_class(d));
                const auto s = solve_soft({d, cap}, kTight);
                const auto t = solve_soft({duplicated(d), cap / 2.0}, kTight);
                CHECK(max_abs_diff(s.classifier.w, t.classifier.w) <= 1e-6);
                CHECK(s.classifier.b == doctest::Approx(t.classifier.b).epsilon(1e-6));
            }
            SUBCASE("soft certificates and the round trip") {
                const double cap = std::min(1.0, 1.5 / smallest_class(d));
                const auto s = solve_soft({d, cap}, kTight);
                CHECK(kkt_check_rsvm(s.classifier, s.certificate, d, kKktTol, &s.slacks).passed);
                CHECK(kkt_check_rcm(s.cm, d).passed);
                CHECK(duality_gap(s.primal_objective, s.certificate.dual_objective, kKktTol).consistent);
                const SvmImage img = cm_to_svm(s.cm, d);
                const CmSolution back = svm_to_cm(img.classifier, img.certificate, d, &img.slacks);
                CHECK(max_abs_diff(back.w_cm, s.cm.w_cm) <= 1e-10);
                CHECK(back.alpha == doctest::Approx(s.cm.alpha).epsilon(1e-10));
                CHECK(back.beta == doctest::Approx(s.cm.beta).epsilon(1e-10));
                for (std::size_t i = 0; i < d.size(); ++i) {
                    CHECK(std::abs(back.lambdas[i] - s.cm.lambdas[i]) <= 1e-10);
                    CHECK(std::abs(back.slacks[i] - s.cm.slacks[i]) <= 1e-10);
                }
            }
        }
}

TEST_CASE("solve_soft_c matches the requested C") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 5; ++trial) {
        const Dataset d = testkit::random_separable(rng, 2.0, {6, 3, 0.2});
        const double lo = *solve_soft({d, 1.0 / smallest_class(d)}).certificate.cap_bound;
        const double hi = *solve_soft({d, 1.0}).certificate.cap_bound;
        const double c = 0.5 * (lo + hi);
        const auto r = solve_soft_c(d, c);
        CHECK(std::abs(*r.certificate.cap_bound - c) <= 1e-4 * c);
    }
}

TEST_CASE("solve_soft_c inside the jump of C at D = 1/k") {
    const Dataset d({pt({0, 0}, 0.1, 1), pt({1, 2}, 0.2, 1), pt({2, -1}, 0, 1), pt({0.5, 0.5}, 0.1, -1),
                     pt({3, 1}, 0.1, -1), pt({4, -2}, 0.3, -1)},
                    LpConfig(2.0, 2));
    const double below = *solve_soft({d, 0.5 - 1e-7}, kTight).certificate.cap_bound;
    const double at = *solve_soft({d, 0.5}, kTight).certificate.cap_bound;
    REQUIRE(at > below * 1.01);
    const double c = 0.5 * (below + at);
    const auto r = solve_soft_c(d, c, kTight);
    CHECK(*r.cm.cap == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(*r.certificate.cap_bound - c) <= 1e-4 * c);
    CHECK(kkt_check_rsvm(r.classifier, r.certificate, d, kKktTol, &r.slacks).passed);
    CHECK(kkt_check_rcm(r.cm, d).passed);
    CHECK(duality_gap(r.primal_objective, r.certificate.dual_objective, kKktTol).consistent);
}

TEST_CASE("objective helpers") {
    const LpConfig cfg(2.0, 1);
    const auto clf = make_classifier(DualVector{2.0}, 1.0, cfg);
    CHECK(clf.margin == 0.5);
    CHECK(primal_objective(clf, {0.5, 0.25}, 2.0, cfg) == doctest::Approx(2.0 + 1.5));
    CHECK(duality_gap(1.0, 1.0 - 1e-10).consistent);
    CHECK_FALSE(duality_gap(1.0, 0.9).consistent);
}
