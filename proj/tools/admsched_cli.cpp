#include "admsched/experiment.hpp"
#include "admsched/oracle.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>

int main(int argc, char** argv)
{
    CLI::App app{"Random admissible-set scheduling on the unit circle"};
    app.require_subcommand(1);

    std::string run_path;
    auto* run = app.add_subcommand("run", "Simulate one configuration and write CSV outputs");
    run->add_option("config", run_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
    std::optional<std::uint64_t> slots;
    run->add_option("--slots", slots, "Override the configured slot count (e.g. 1000000)");

    std::string sweep_path;
    auto* sweep = app.add_subcommand("sweep", "Run a lambda x seed grid and write the summary CSV");
    sweep->add_option("config", sweep_path, "Sweep JSON")->required()->check(CLI::ExistingFile);

    admsched::OracleLimits limits;
    auto* oracle = app.add_subcommand("oracle", "Cross-check fast routines against exhaustive enumeration");
    oracle->add_option("--n-max", limits.n_max, "Largest random instance size")->check(CLI::Range(0, 20));
    oracle->add_option("--trials", limits.trials, "Random instances per check");
    oracle->add_option("--draws", limits.draws, "Sampler draws for the uniformity test");
    oracle->add_option("--seed", limits.seed, "Seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto config = admsched::load_config(run_path);
            if (slots)
                config.slots = *slots;
            return admsched::cmd_run(config, std::cout);
        }
        if (*sweep)
            return admsched::cmd_sweep(admsched::load_sweep(sweep_path), std::cout);
        if (*oracle) {
            const auto report = admsched::run_oracle(limits);
            admsched::print_report(std::cout, report);
            return report.ok() ? 0 : 1;
        }
    } catch (const admsched::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
