#include <doctest.h>

#include <random>

#include "rsvm/hull_model.hpp"
#include "support.hpp"

using namespace rsvm;
using testkit::pt;

namespace {

ReducedHull hull_from_costs(std::size_t m, double cap) {
    std::vector<UncertainPoint> members;
    for (std::size_t i = 0; i < m; ++i) members.push_back(pt({double(i + 1)}, 0.0, 1));
    return ReducedHull(members, cap);
}

// uniform-ish point of the unit l_p ball by rejection from the cube
Vector ball_sample(std::mt19937_64& rng, const LpConfig& cfg) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Vector v(cfg.dim());
        for (auto& x : v) x = u(rng);
        if (primal_norm(v, cfg) <= 1.0) return v;
    }
}

}  // namespace

TEST_CASE("dataset validation") {
    const LpConfig cfg(2.0, 2);
    CHECK_THROWS_AS(Dataset({pt({1, 2, 3}, 0, 1)}, cfg), Error);
    CHECK_THROWS_AS(Dataset({pt({1, 2}, -0.1, 1)}, cfg), Error);
    CHECK_THROWS_AS(Dataset({pt({1, std::nan("")}, 0, 1)}, cfg), Error);
    const Dataset d({pt({0, 0}, 0, 1), pt({1, 0}, 0, -1), pt({2, 0}, 0, 1)}, cfg);
    CHECK(d.indices(Label::Positive) == std::vector<std::size_t>{0, 2});
    CHECK(d.indices(Label::Negative) == std::vector<std::size_t>{1});
    CHECK(d.has_both_labels());
    CHECK_FALSE(Dataset({pt({0, 0}, 0, 1)}, cfg).has_both_labels());
}

TEST_CASE("reduced hull cap feasibility") {
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;
    };
    CHECK(code_of([] { hull_from_costs(3, 0.3); }) == ErrorCode::InfeasibleCap);
    CHECK(code_of([] { hull_from_costs(3, 0.0); }) == ErrorCode::InfeasibleCap);
    CHECK(code_of([] { hull_from_costs(3, 1.5); }) == ErrorCode::InfeasibleCap);
    CHECK(code_of([] { ReducedHull({}, 1.0); }) == ErrorCode::InvalidArgument);
    CHECK_NOTHROW(hull_from_costs(3, 1.0 / 3.0));
    const Dataset d({pt({0}, 0, 1), pt({1}, 0, -1), pt({2}, 0, 1)}, LpConfig(2.0, 1));
    const ReducedHull pos = ReducedHull::of_class(d, Label::Positive, 0.5);
    CHECK(pos.size() == 2);
    CHECK(pos.source_indices() == std::vector<std::size_t>{0, 2});
}

TEST_CASE("ball_support examples") {
    const LpConfig cfg(2.0, 2);
    const auto a = ball_support(pt({1, 0}, 0.25, 1), DualVector{4.0 / 3.0, 0}, Sense::Min, cfg);
    CHECK(a.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.realized[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(a.realized[1] == 0.0);

    const auto b = ball_support(pt({2, -1}, 0.0, 1), DualVector{3, 5}, Sense::Min, cfg);
    CHECK(b.value == 1.0);
    CHECK(b.realized == Vector{2, -1});

    const auto c = ball_support(pt({0, 0}, 1.0, 1), DualVector{0, 2}, Sense::Min, cfg);
    CHECK(c.value == -2.0);
    CHECK(c.realized == Vector{0, -1});

    const auto d = ball_support(pt({0, 0}, 1.0, 1), DualVector{0, 2}, Sense::Max, cfg);
    CHECK(d.value == 2.0);
    CHECK(d.realized == Vector{0, 1});

    CHECK_NOTHROW(ball_support(pt({1, 1}, 0.0, 1), DualVector{0, 0}, Sense::Min, cfg));
    try {
        ball_support(pt({1, 1}, 0.5, 1), DualVector{0, 0}, Sense::Min, cfg);
        FAIL("expected ZeroDirection");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroDirection);
    }
}

TEST_CASE("ball_support is never beaten by sampled ball points") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0.0, 1.0);
    for (double p : {1.5, 2.0, 3.0}) {
        const LpConfig cfg(p, 3);
        for (int trial = 0; trial < 20; ++trial) {
            const UncertainPoint q{testkit::random_vector(rng, 3), 0.1 + std::abs(n(rng)), Label::Positive};
            const DualVector w{n(rng), n(rng), n(rng)};
            const auto lo = ball_support(q, w, Sense::Min, cfg);
            const auto hi = ball_support(q, w, Sense::Max, cfg);
            CHECK(primal_norm(lo.realized - q.center, cfg) <= q.radius + 1e-12);
            CHECK(pairing(lo.realized, w) == doctest::Approx(lo.value).epsilon(1e-12));
            CHECK(pairing(hi.realized, w) == doctest::Approx(hi.value).epsilon(1e-12));
            for (int s = 0; s < 2000; ++s) {
                const Vector x = q.center + q.radius * ball_sample(rng, cfg);
                CHECK(pairing(x, w) >= lo.value - 1e-9);
                CHECK(pairing(x, w) <= hi.value + 1e-9);
            }
        }
    }
}

TEST_CASE("support monotone in the radius") {
    const LpConfig cfg(3.0, 2);
    const DualVector w{0.3, -1.2};
    double prev = std::numeric_limits<double>::infinity();
    for (double r = 0.0; r < 2.0; r += 0.1) {
        const double v = ball_support(pt({1, 2}, r, 1), w, Sense::Min, cfg).value;
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("capped simplex greedy fill") {
    const std::vector<double> costs{1, 2, 3};
    auto objective = [&](const std::vector<double>& l) { return l[0] * 1 + l[1] * 2 + l[2] * 3; };
    const auto a = capped_simplex_fill(costs, 0.4, Sense::Min);
    CHECK(a[0] == 0.4);
    CHECK(a[1] == 0.4);
    CHECK(a[2] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(objective(a) == doctest::Approx(1.8).epsilon(1e-15));
    const auto b = capped_simplex_fill(costs, 1.0, Sense::Min);
    CHECK(b == std::vector<double>{1, 0, 0});
    const auto c = capped_simplex_fill(costs, 0.5, Sense::Min);
    CHECK(c == std::vector<double>{0.5, 0.5, 0});
    CHECK(objective(c) == 1.5);
    const auto d = capped_simplex_fill(costs, 0.5, Sense::Max);
    CHECK(d == std::vector<double>{0, 0.5, 0.5});

    SUBCASE("ties go to the lowest index") {
        CHECK(capped_simplex_fill({2, 1, 1, 1}, 0.5, Sense::Min) == std::vector<double>{0, 0.5, 0.5, 0});
        CHECK(capped_simplex_fill({5, 5, 5}, 1.0, Sense::Max) == std::vector<double>{1, 0, 0});
    }
    CHECK_THROWS_AS(capped_simplex_fill(costs, 0.3, Sense::Min), Error);
}

TEST_CASE("lmo over the reduced hull matches the greedy example") {
    const ReducedHull h = hull_from_costs(3, 0.4);
    const LpConfig cfg(2.0, 1);
    const HullPoint hp = lmo_reduced_hull(h, DualVector{1.0}, Sense::Min, cfg);
    CHECK(hp.coefficients[0] == 0.4);
    CHECK(hp.coefficients[1] == 0.4);
    CHECK(hp.coefficients[2] == doctest::Approx(0.2));
    CHECK(pairing(hull_point_embed(hp, h), DualVector{1.0}) == doctest::Approx(1.8));
    CHECK(hull_support_value(h, DualVector{1.0}, Sense::Min, cfg) == doctest::Approx(1.8));
    CHECK(hull_support_value(h, DualVector{1.0}, Sense::Max, cfg) == doctest::Approx(2.2).epsilon(1e-12));
}

TEST_CASE("lmo certificate against random feasible hull points") {
    std::mt19937_64 rng(22);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double p : {1.5, 2.0, 3.0}) {
        const LpConfig cfg(p, 3);
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<UncertainPoint> members;
            const std::size_t m = 2 + trial % 5;
            for (std::size_t i = 0; i < m; ++i) members.push_back({testkit::random_vector(rng, 3), u(rng), Label::Positive});
            const double cap = std::max(1.0 / static_cast<double>(m), u(rng));
            const ReducedHull hull(members, cap);
            const DualVector w{n(rng), n(rng), n(rng)};
            const HullPoint best = lmo_reduced_hull(hull, w, Sense::Min, cfg);
            CHECK_NOTHROW(validate_hull_point(best, hull, cfg));
            double mass = 0.0;
            for (double l : best.coefficients) {
                CHECK(l >= 0.0);
                CHECK(l <= cap);
                mass += l;
            }
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
            const double best_value = pairing(hull_point_embed(best, hull), w);
            for (int s = 0; s < 50; ++s) {
                // greedy vertex for random costs, random offsets inside the balls
                std::vector<double> costs(m);
                for (auto& c : costs) c = n(rng);
                HullPoint hp;
                hp.coefficients = capped_simplex_fill(costs, cap, Sense::Min);
                for (std::size_t i = 0; i < m; ++i) {
                    Vector d = testkit::random_vector(rng, 3);
                    d *= members[i].radius * u(rng) / primal_norm(d, cfg);
                    hp.displacements.push_back(d);
                }
                CHECK(pairing(hull_point_embed(hp, hull), w) >= best_value - 1e-9);
            }
        }
    }
}

TEST_CASE("hull_point_embed examples and validation") {
    const ReducedHull single({pt({2, 0}, 0.0, 1)}, 1.0);
    CHECK(hull_point_embed({{1.0}, {Vector(2)}}, single) == Vector{2, 0});

    const ReducedHull seg({pt({0}, 0.0, 1), pt({2}, 0.0, 1)}, 1.0);
    CHECK(hull_point_embed({{0.5, 0.5}, {Vector(1), Vector(1)}}, seg) == Vector{1});

    const ReducedHull ball({pt({1, 0}, 0.25, 1)}, 1.0);
    CHECK(hull_point_embed({{1.0}, {Vector{-0.25, 0}}}, ball) == Vector{0.75, 0});

    const LpConfig cfg(2.0, 2);
    auto code_of = [&](const HullPoint& hp, const ReducedHull& h) {
        try {
            validate_hull_point(hp, h, cfg);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;
    };
    CHECK(code_of({{1.0}, {Vector{-0.3, 0}}}, ball) == ErrorCode::InvalidHullPoint);
    CHECK(code_of({{0.9}, {Vector(2)}}, ball) == ErrorCode::InvalidHullPoint);
    CHECK(code_of({{1.0, 0.0}, {Vector(2)}}, ball) == ErrorCode::InvalidHullPoint);
    CHECK(code_of({{1.0}, {Vector(3)}}, ball) == ErrorCode::InvalidHullPoint);
    CHECK_THROWS_AS(hull_point_embed({{0.5}, {Vector(2)}}, ball), Error);
}

TEST_CASE("initial hull point fills the first members") {
    const ReducedHull h = hull_from_costs(4, 0.3);
    const HullPoint hp = initial_hull_point(h);
    CHECK(hp.coefficients[0] == 0.3);
    CHECK(hp.coefficients[1] == 0.3);
    CHECK(hp.coefficients[2] == 0.3);
    CHECK(hp.coefficients[3] == doctest::Approx(0.1));
    CHECK_NOTHROW(validate_hull_point(hp, h, LpConfig(2.0, 1)));
}
