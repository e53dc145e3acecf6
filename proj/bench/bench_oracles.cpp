// Serial vs OpenMP timings of the grid and sampling oracles.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "rsvm/reference_oracles.hpp"

using namespace rsvm;
using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double seconds(F&& f, int reps) {
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) f();
    return std::chrono::duration<double>(Clock::now() - t0).count() / reps;
}

void row(const char* name, double serial, double parallel, bool same) {
    std::printf("%-28s serial %9.4f s   parallel %9.4f s   speedup %5.2fx   identical %s\n", name, serial, parallel,
                serial / parallel, same ? "yes" : "NO");
}

}  // namespace

int main() {
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
    const LpConfig cfg(3.0, 2);
    const ReducedHull a({{Vector{2, 0}, 0.3, Label::Positive}, {Vector{3, 1}, 0.2, Label::Positive}}, 1.0);
    const ReducedHull b({{Vector{-2, 0}, 0.3, Label::Negative}, {Vector{-3, -1}, 0.1, Label::Negative}}, 1.0);
    const ReducedHull b3({{Vector{-2, 0}, 0.3, Label::Negative},
                          {Vector{-3, -1}, 0.1, Label::Negative},
                          {Vector{-2.5, 1}, 0.2, Label::Negative}},
                         1.0);

    oracle::OracleOptions serial, parallel;
    serial.execution = oracle::Execution::Serial;
    parallel.execution = oracle::Execution::Parallel;

    {
        oracle::BruteResult rs, rp;
        const double ts = seconds([&] { rs = oracle::brute_nearest_pair(a, b, cfg, serial); }, 3);
        const double tp = seconds([&] { rp = oracle::brute_nearest_pair(a, b, cfg, parallel); }, 3);
        row("weight grid (2+2, 1e6 cells)", ts, tp, rs.distance == rp.distance && rs.u == rp.u);
    }
    {
        oracle::BruteResult rs, rp;
        const double ts = seconds([&] { rs = oracle::brute_nearest_pair(a, b3, cfg, serial); }, 3);
        const double tp = seconds([&] { rp = oracle::brute_nearest_pair(a, b3, cfg, parallel); }, 3);
        row("direction grid (2+3)", ts, tp, rs.distance == rp.distance && rs.u == rp.u);
    }
    {
        const UncertainPoint q{Vector{1, 0.5}, 0.25, Label::Positive};
        const RobustClassifier clf{DualVector{1.2, -0.4}, 0.1, 0.0};
        serial.sample_count = parallel.sample_count = 1000000;
        double vs = 0, vp = 0;
        const double ts = seconds([&] { vs = oracle::sampled_worst_case_margin(q, clf, cfg, serial); }, 3);
        const double tp = seconds([&] { vp = oracle::sampled_worst_case_margin(q, clf, cfg, parallel); }, 3);
        row("sampled margin (1e6 draws)", ts, tp, vs == vp);
    }
    return 0;
}
