#include <CLI11.hpp>
#include <iostream>

#include "spinlab/cli/config.hpp"
#include "spinlab/cli/jobs.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spinlab: exact, analytic and stochastic solvers for the gain/loss spin chain"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = -1;
    std::string out_dir;

    for (const auto& kind : spinlab::cli::kJobKinds) {
        auto* sub = app.add_subcommand(kind, "run a " + kind + " job");
        sub->add_option("--config", config_path, "job configuration file")->required();
        sub->add_option("--seed", seed, "override the master seed")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--workers", workers, "worker thread count (0 = hardware)");
        sub->add_option("--out", out_dir, "override the output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        spinlab::cli::JobConfig cfg = spinlab::cli::load_config_file(config_path);
        std::string sub = app.get_subcommands().front()->get_name();
        if (cfg.job != sub)
            throw std::invalid_argument("config declares job '" + cfg.job +
                                        "' but the subcommand is '" + sub + "'");
        if (seed_set) cfg.seed = seed;
        if (workers >= 0) cfg.workers = workers;
        if (!out_dir.empty()) cfg.out_dir = out_dir;

        spinlab::cli::JobOutcome outcome = spinlab::cli::run_job(cfg);
        std::cout << "job " << cfg.job << ": " << outcome.n_points << " points, "
                  << outcome.n_errors << " errors\n";
        for (const auto& f : outcome.files) std::cout << "  wrote " << f << "\n";
        std::cout << "  manifest " << outcome.manifest_path << "\n";
        return outcome.exit_code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
