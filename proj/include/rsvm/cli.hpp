#pragma once

// Dataset ingestion, run configuration and JSON reports for the command-line
// front end.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsvm/robust_svm.hpp"

namespace rsvm::cli {

using json = nlohmann::json;

/// CSV with header `label,radius,f1,...,fn`; errors name the offending line.
Dataset load_dataset(const std::string& path, double p = 2.0);
Dataset parse_dataset(std::istream& in, double p = 2.0);

enum class Mode { Hard, Soft };

struct RunConfig {
    double p = 2.0;
    Mode mode = Mode::Hard;
    std::optional<double> cap_d;
    double tol = 1e-8;
    std::size_t max_iters = 200000;
    std::uint64_t seed = 0;
    std::string input_path;
    std::string output_path;
};

void validate(const RunConfig& cfg);

struct SamplingCheck {
    std::uint64_t seed = 0;
    std::size_t samples_per_point = 0;
    /// min over points of (sampled worst case - closed form); never negative
    double min_excess = 0.0;
};

struct SolverStats {
    std::size_t iterations = 0;
    double pair_distance = 0.0;
    double pair_gap = 0.0;
    double wall_time_s = 0.0;
};

struct RunReport {
    RunConfig config;
    bool slater_holds = false;
    RobustClassifier classifier;
    DualCertificate certificate;
    std::vector<double> slacks;
    double alpha = 0.0;
    double beta = 0.0;
    double primal_objective = 0.0;
    DualityGap gap;
    KktReport kkt;
    std::optional<KktReport> kkt_cm;
    SolverStats stats;
    SamplingCheck sampling;
    bool passed = false;
};

json to_json(const RunReport& report);
RunReport report_from_json(const json& j);
std::string serialize(const RunReport& report);

/// Trains and certifies; throws Error on failure. Does not touch output_path.
RunReport run(const RunConfig& config);

/// run() plus I/O: writes the report atomically, prints a JSON reason to
/// `err` on failure. Returns 0 on pass, 2 on NonSeparable in hard mode,
/// 1 otherwise (including a written report that failed verification).
int run_to_file(const RunConfig& config, std::ostream& err);

std::string error_json(const Error& e);

struct PolylinePoint {
    double theta;
    double x;
    double y;
};

/// Max-sense support points of the reduced class hull over `resolution`
/// equally spaced directions theta_k = 2 pi k / resolution. Requires dim 2.
std::vector<PolylinePoint> emit_hull_polyline(const Dataset& dataset, Label cls, double cap, std::size_t resolution);

void write_polyline_csv(const std::vector<PolylinePoint>& rows, std::ostream& out);

}  // namespace rsvm::cli
