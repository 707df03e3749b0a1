#include "rwave/config.hpp"
#include "rwave/runner.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct CommonOptions {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("--config", opts.config_path, "Path to a key = value config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "Master seed override");
    sub->add_option("--out", opts.out_dir, "Output directory override");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rwave: numerical laboratory for the stochastic wave equation "
                 "driven by rough spatial noise"};
    app.require_subcommand(1);

    CommonOptions opts;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "Run the fixed-point solver over an ensemble and save the solution"},
        {"holder", "Estimate time/space regularity exponents from an ensemble"},
        {"kernels-verify", "Cross-check the kernel closed forms and identities"},
        {"chaos", "Evaluate spectral second moments and the divergence scan"},
        {"params", "Check exponent systems and write the feasibility region"},
        {"covariance", "Compare empirical noise covariance against the exact law"},
    };
    for (const auto& [name, description] : commands)
        add_common(app.add_subcommand(name, description), opts);

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    opts.seed_given = sub->count("--seed") > 0;

    rwave::ParseOutcome outcome =
        opts.config_path.empty()
            ? rwave::parse_config("", sub->get_name())
            : rwave::parse_config_file(opts.config_path, sub->get_name());
    for (const std::string& warning : outcome.warnings)
        std::cerr << "warning: " << warning << "\n";
    if (!outcome.ok()) {
        for (const std::string& error : outcome.errors) std::cerr << "error: " << error << "\n";
        return 2;
    }
    if (opts.seed_given) outcome.config.seed = opts.seed;
    if (!opts.out_dir.empty()) outcome.config.out_dir = opts.out_dir;

    try {
        const rwave::RunResult result = rwave::run_experiment(outcome.config);
        for (const std::string& name : result.outputs)
            std::cout << outcome.config.out_dir << "/" << name << "\n";
        if (result.exit_code != 0) {
            std::cerr << "error: at least one check exceeded its tolerance (see "
                      << outcome.config.out_dir << "/kernels_report.csv)\n";
            return result.exit_code;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
