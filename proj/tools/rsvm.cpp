#include <iostream>

#include <CLI11.hpp>

#include "rsvm/cli.hpp"

using rsvm::cli::Mode;

int main(int argc, char** argv) {
    CLI::App app{"Robust max-margin classifiers in lp spaces"};
    app.require_subcommand(1);

    rsvm::cli::RunConfig cfg;
    std::string mode = "hard";
    double cap_d = 0.0;
    auto* train = app.add_subcommand("train", "train a classifier and write a JSON report");
    train->add_option("--input", cfg.input_path, "dataset CSV")->required();
    train->add_option("--output", cfg.output_path, "report JSON")->required();
    train->add_option("--p", cfg.p, "norm exponent, 1 < p < inf")->required();
    train->add_option("--mode", mode, "hard or soft")->required()->check(CLI::IsMember({"hard", "soft"}));
    auto* cap_opt = train->add_option("--cap-d", cap_d, "reduced-hull cap D in (0, 1], soft mode");
    train->add_option("--tol", cfg.tol, "solver gap tolerance");
    train->add_option("--max-iters", cfg.max_iters, "solver iteration budget");
    train->add_option("--seed", cfg.seed, "seed of the sampled robustness check");

    std::string hull_input, hull_class;
    double hull_cap = 1.0, hull_p = 2.0;
    std::size_t resolution = 0;
    auto* hull = app.add_subcommand("hull", "print a reduced class hull boundary as CSV theta,x,y");
    hull->add_option("--input", hull_input, "dataset CSV")->required();
    hull->add_option("--class", hull_class, "+ or -")->required()->check(CLI::IsMember({"+", "-"}));
    hull->add_option("--cap-d", hull_cap, "cap D in (0, 1]")->required();
    hull->add_option("--resolution", resolution, "number of directions")->required();
    hull->add_option("--p", hull_p, "norm exponent (default 2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (*train) {
        cfg.mode = mode == "soft" ? Mode::Soft : Mode::Hard;
        if (cap_opt->count() > 0) cfg.cap_d = cap_d;
        return rsvm::cli::run_to_file(cfg, std::cerr);
    }
    try {
        const auto data = rsvm::cli::load_dataset(hull_input, hull_p);
        const auto cls = hull_class == "+" ? rsvm::Label::Positive : rsvm::Label::Negative;
        rsvm::cli::write_polyline_csv(rsvm::cli::emit_hull_polyline(data, cls, hull_cap, resolution), std::cout);
    } catch (const rsvm::Error& e) {
        std::cerr << rsvm::cli::error_json(e) << "\n";
        return 1;
    }
    return 0;
}
