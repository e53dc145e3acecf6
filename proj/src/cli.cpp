#include "rsvm/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rsvm/reference_oracles.hpp"

namespace rsvm::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void fail(ErrorCode code, std::size_t line, const std::string& what) {
    throw Error(code, "line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view field, std::size_t line, const char* name) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
        fail(ErrorCode::ParseError, line, std::string("malformed ") + name + " '" + std::string(field) + "'");
    if (!std::isfinite(v)) fail(ErrorCode::ParseError, line, std::string("non-finite ") + name);
    return v;
}

const char* mode_name(Mode m) { return m == Mode::Hard ? "hard" : "soft"; }

Mode mode_from(const std::string& s) {
    if (s == "hard") return Mode::Hard;
    if (s == "soft") return Mode::Soft;
    throw Error(ErrorCode::InvalidArgument, "mode must be hard or soft, got '" + s + "'");
}

json vec(const Coords<PrimalSpace>& v) { return json(std::vector<double>(v.begin(), v.end())); }
json vec(const Coords<DualSpace>& v) { return json(std::vector<double>(v.begin(), v.end())); }

template <class V>
V vec_from(const json& j) {
    return V(j.get<std::vector<double>>());
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json kkt_json(const KktReport& k) {
    return {{"feasibility_residual", k.feasibility_residual},
            {"stationarity_residual", k.stationarity_residual},
            {"multiplier_sign_residual", k.multiplier_sign_residual},
            {"complementarity_residual", k.complementarity_residual},
            {"balance_residual", k.balance_residual},
            {"tol", k.tol},
            {"passed", k.passed}};
}

KktReport kkt_from(const json& j) {
    KktReport k;
    k.feasibility_residual = j.at("feasibility_residual").get<double>();
    k.stationarity_residual = j.at("stationarity_residual").get<double>();
    k.multiplier_sign_residual = j.at("multiplier_sign_residual").get<double>();
    k.complementarity_residual = j.at("complementarity_residual").get<double>();
    k.balance_residual = j.at("balance_residual").get<double>();
    k.tol = j.at("tol").get<double>();
    k.passed = j.at("passed").get<bool>();
    return k;
}

json config_json(const RunConfig& c) {
    return {{"p", c.p},           {"mode", mode_name(c.mode)}, {"cap_d", opt(c.cap_d)},
            {"tol", c.tol},       {"max_iters", c.max_iters},  {"seed", c.seed},
            {"input_path", c.input_path}, {"output_path", c.output_path}};
}

RunConfig config_from(const json& j) {
    RunConfig c;
    c.p = j.at("p").get<double>();
    c.mode = mode_from(j.at("mode").get<std::string>());
    c.cap_d = opt_from(j.at("cap_d"));
    c.tol = j.at("tol").get<double>();
    c.max_iters = j.at("max_iters").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.input_path = j.at("input_path").get<std::string>();
    c.output_path = j.at("output_path").get<std::string>();
    return c;
}

constexpr std::size_t kSamplesPerPoint = 2000;

}  // namespace

Dataset parse_dataset(std::istream& in, double p) {
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    bool have_header = false;
    std::vector<UncertainPoint> points;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = trim(line);
        if (lineno == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
        if (view.empty()) continue;
        const auto fields = split(view);
        if (!have_header) {
            if (fields.size() < 3 || fields[0] != "label" || fields[1] != "radius")
                fail(ErrorCode::ParseError, lineno, "header must be label,radius,f1,...,fn");
            for (std::size_t k = 2; k < fields.size(); ++k)
                if (fields[k] != "f" + std::to_string(k - 1))
                    fail(ErrorCode::ParseError, lineno, "expected column f" + std::to_string(k - 1));
            width = fields.size();
            have_header = true;
            continue;
        }
        if (fields.size() != width)
            fail(ErrorCode::ParseError, lineno,
                 "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
        const double label = parse_number(fields[0], lineno, "label");
        if (label != 1.0 && label != -1.0)
            fail(ErrorCode::InvalidArgument, lineno, "unknown label '" + std::string(fields[0]) + "'");
        const double radius = parse_number(fields[1], lineno, "radius");
        if (radius < 0.0) fail(ErrorCode::InvalidArgument, lineno, "negative radius");
        Vector center(width - 2);
        for (std::size_t k = 2; k < width; ++k) center[k - 2] = parse_number(fields[k], lineno, "feature");
        points.push_back({std::move(center), radius, label > 0 ? Label::Positive : Label::Negative});
    }
    if (!have_header) throw Error(ErrorCode::ParseError, "empty dataset file");
    if (points.empty()) throw Error(ErrorCode::ParseError, "dataset has a header but no rows");
    return Dataset(std::move(points), LpConfig(p, width - 2));
}

Dataset load_dataset(const std::string& path, double p) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    return parse_dataset(in, p);
}

void validate(const RunConfig& c) {
    (void)LpConfig(c.p, 1);
    if (c.mode == Mode::Soft) {
        if (!c.cap_d) throw Error(ErrorCode::InvalidArgument, "soft mode needs --cap-d");
        if (!(*c.cap_d > 0.0) || *c.cap_d > 1.0) throw Error(ErrorCode::InfeasibleCap, "cap-d must lie in (0, 1]");
    } else if (c.cap_d) {
        throw Error(ErrorCode::InvalidArgument, "--cap-d applies to soft mode only");
    }
    validate_options({c.tol, c.max_iters});
}

json to_json(const RunReport& r) {
    json realized = json::array();
    for (const auto& x : r.certificate.realized) realized.push_back(vec(x));
    json j = {
        {"config", config_json(r.config)},
        {"slater_holds", r.slater_holds},
        {"classifier", {{"w", vec(r.classifier.w)}, {"b", r.classifier.b}, {"margin", r.classifier.margin}}},
        {"certificate",
         {{"lambdas", r.certificate.lambdas},
          {"realized", realized},
          {"dual_objective", r.certificate.dual_objective},
          {"cap_bound", opt(r.certificate.cap_bound)}}},
        {"slacks", r.slacks},
        {"alpha", r.alpha},
        {"beta", r.beta},
        {"primal_objective", r.primal_objective},
        {"duality_gap", {{"gap", r.gap.gap}, {"consistent", r.gap.consistent}}},
        {"kkt", kkt_json(r.kkt)},
        {"kkt_cm", r.kkt_cm ? kkt_json(*r.kkt_cm) : json(nullptr)},
        {"solver",
         {{"iterations", r.stats.iterations},
          {"pair_distance", r.stats.pair_distance},
          {"pair_gap", r.stats.pair_gap},
          {"wall_time_s", r.stats.wall_time_s}}},
        {"sampling",
         {{"seed", r.sampling.seed},
          {"samples_per_point", r.sampling.samples_per_point},
          {"min_excess", r.sampling.min_excess}}},
        {"passed", r.passed},
    };
    return j;
}

RunReport report_from_json(const json& j) {
    RunReport r;
    r.config = config_from(j.at("config"));
    r.slater_holds = j.at("slater_holds").get<bool>();
    const auto& c = j.at("classifier");
    r.classifier.w = vec_from<DualVector>(c.at("w"));
    r.classifier.b = c.at("b").get<double>();
    r.classifier.margin = c.at("margin").get<double>();
    const auto& cert = j.at("certificate");
    r.certificate.lambdas = cert.at("lambdas").get<std::vector<double>>();
    for (const auto& x : cert.at("realized")) r.certificate.realized.push_back(vec_from<Vector>(x));
    r.certificate.dual_objective = cert.at("dual_objective").get<double>();
    r.certificate.cap_bound = opt_from(cert.at("cap_bound"));
    r.slacks = j.at("slacks").get<std::vector<double>>();
    r.alpha = j.at("alpha").get<double>();
    r.beta = j.at("beta").get<double>();
    r.primal_objective = j.at("primal_objective").get<double>();
    r.gap.gap = j.at("duality_gap").at("gap").get<double>();
    r.gap.consistent = j.at("duality_gap").at("consistent").get<bool>();
    r.kkt = kkt_from(j.at("kkt"));
    if (!j.at("kkt_cm").is_null()) r.kkt_cm = kkt_from(j.at("kkt_cm"));
    const auto& s = j.at("solver");
    r.stats.iterations = s.at("iterations").get<std::size_t>();
    r.stats.pair_distance = s.at("pair_distance").get<double>();
    r.stats.pair_gap = s.at("pair_gap").get<double>();
    r.stats.wall_time_s = s.at("wall_time_s").get<double>();
    const auto& m = j.at("sampling");
    r.sampling.seed = m.at("seed").get<std::uint64_t>();
    r.sampling.samples_per_point = m.at("samples_per_point").get<std::size_t>();
    r.sampling.min_excess = m.at("min_excess").get<double>();
    r.passed = j.at("passed").get<bool>();
    return r;
}

std::string serialize(const RunReport& report) { return to_json(report).dump(2) + "\n"; }

RunReport run(const RunConfig& config) {
    validate(config);
    const Dataset dataset = load_dataset(config.input_path, config.p);
    const SolverOptions opts{config.tol, config.max_iters};

    const auto start = std::chrono::steady_clock::now();
    RunReport rep;
    rep.config = config;
    TrainResult tr;
    if (config.mode == Mode::Hard) {
        tr = solve_hard({dataset}, opts);
        rep.slater_holds = true;
    } else {
        rep.slater_holds = slater_check(dataset, opts).holds;
        tr = solve_soft({dataset, *config.cap_d}, opts);
    }
    rep.stats.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.stats.iterations = tr.cm.pair->iterations;
    rep.stats.pair_distance = tr.cm.pair->distance;
    rep.stats.pair_gap = tr.cm.pair->gap;

    rep.classifier = tr.classifier;
    rep.certificate = tr.certificate;
    rep.slacks = tr.slacks;
    rep.alpha = tr.cm.alpha;
    rep.beta = tr.cm.beta;
    rep.primal_objective = tr.primal_objective;
    rep.gap = duality_gap(tr.primal_objective, tr.certificate.dual_objective, kKktTol);
    const bool soft = config.mode == Mode::Soft;
    rep.kkt = kkt_check_rsvm(tr.classifier, tr.certificate, dataset, kKktTol, soft ? &tr.slacks : nullptr);
    if (soft) rep.kkt_cm = kkt_check_rcm(tr.cm, dataset, kKktTol);

    oracle::OracleOptions mc;
    mc.sample_count = kSamplesPerPoint;
    double excess = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        mc.rng_seed = config.seed + i;
        const double sampled = oracle::sampled_worst_case_margin(dataset[i], tr.classifier, dataset.cfg(), mc);
        excess = std::min(excess, sampled - worst_case_margin(dataset[i], tr.classifier, dataset.cfg()));
    }
    rep.sampling = {config.seed, kSamplesPerPoint, excess};

    rep.passed = rep.kkt.passed && (!rep.kkt_cm || rep.kkt_cm->passed) && rep.gap.consistent &&
                 rep.sampling.min_excess >= -1e-9;
    return rep;
}

std::string error_json(const Error& e) {
    return json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump();
}

int run_to_file(const RunConfig& config, std::ostream& err) {
    try {
        const RunReport rep = run(config);
        const std::string text = serialize(rep);
        const std::filesystem::path out(config.output_path);
        std::filesystem::path tmp = out;
        tmp += ".tmp";
        {
            std::ofstream f(tmp, std::ios::binary);
            if (!f) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
            f << text;
            if (!f.flush()) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        }
        std::error_code ec;
        std::filesystem::rename(tmp, out, ec);
        if (ec) {
            std::filesystem::remove(tmp, ec);
            throw Error(ErrorCode::IoError, "cannot move report to " + out.string());
        }
        if (!rep.passed) {
            err << json{{"error", "VerificationFailed"}, {"message", "certificate checks failed; see report"}}.dump()
                << "\n";
            return 1;
        }
        return 0;
    } catch (const Error& e) {
        err << error_json(e) << "\n";
        return (e.code() == ErrorCode::NonSeparable && config.mode == Mode::Hard) ? 2 : 1;
    } catch (const std::exception& e) {
        err << json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
}

std::vector<PolylinePoint> emit_hull_polyline(const Dataset& dataset, Label cls, double cap, std::size_t resolution) {
    const LpConfig& cfg = dataset.cfg();
    if (cfg.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "hull polylines need 2D data");
    if (resolution < 1) throw Error(ErrorCode::InvalidArgument, "resolution must be positive");
    if (dataset.indices(cls).empty()) throw Error(ErrorCode::InvalidArgument, "class has no points");
    const ReducedHull hull = ReducedHull::of_class(dataset, cls, cap);
    std::vector<PolylinePoint> rows;
    rows.reserve(resolution);
    for (std::size_t k = 0; k < resolution; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(resolution);
        const DualVector w{std::cos(theta), std::sin(theta)};
        const Vector x = hull_point_embed(lmo_reduced_hull(hull, w, Sense::Max, cfg), hull);
        rows.push_back({theta, x[0], x[1]});
    }
    return rows;
}

void write_polyline_csv(const std::vector<PolylinePoint>& rows, std::ostream& out) {
    out << "theta,x,y\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.theta, r.x, r.y);
        out << buf;
    }
}

}  // namespace rsvm::cli
