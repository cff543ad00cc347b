// corrnoise — command-line front end for the scenario runners.
//
// Exit codes: 0 success, 1 configuration/input error, 2 validation failure,
// 3 runtime failure (integration diverged, resource limits, I/O).

#include <CLI11.hpp>

#include "corrnoise/config.hpp"
#include "corrnoise/errors.hpp"
#include "corrnoise/experiments.hpp"
#include "corrnoise/validate.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<int> workers;
    std::optional<std::string> engine;
    std::optional<long> seed;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("--config", opts.config_path, "Scenario config file (key = value lines)");
    sub->add_option("--out", opts.out, "Output root directory (default: results)");
    sub->add_option("--workers", opts.workers, "Worker threads for sweeps (default: all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--engine", opts.engine, "Engine: full, reduced or auto")
        ->check(CLI::IsMember({"full", "reduced", "auto"}));
    sub->add_option("--seed", opts.seed, "Recorded in the summary and used for random validation inputs");
}

corrnoise::ScenarioConfig load(corrnoise::Scenario scenario, const CommonOptions& opts) {
    using namespace corrnoise;
    const ConfigMap entries = opts.config_path.empty() ? ConfigMap{} : read_config_file(opts.config_path);
    ScenarioConfig config = make_config(scenario, entries);
    if (opts.out) config.out_dir = *opts.out;
    if (opts.workers) config.workers = *opts.workers;
    if (opts.engine) config.engine = parse_engine(*opts.engine);
    if (opts.seed) config.seed = *opts.seed;
    config.validate();
    return config;
}

int run(corrnoise::Scenario scenario, const CommonOptions& opts) {
    using namespace corrnoise;
    const ScenarioConfig config = load(scenario, opts);
    if (scenario == Scenario::Validate) {
        const auto report = run_validate(config);
        for (const auto& s : report.suites) {
            std::cout << (s.passed ? "PASS  " : "FAIL  ") << s.name;
            if (!s.passed) std::cout << "  (" << s.detail << ")";
            std::cout << '\n';
        }
        const auto loc = write_outputs(report.result, config.out_dir);
        std::cout << "wrote " << loc.dir.string() << '\n';
        return report.all_passed() ? 0 : 2;
    }
    const auto result = run_scenario(config);
    const auto loc = write_outputs(result, config.out_dir);
    std::cout << "wrote " << loc.csv.string() << " (" << result.rows.size() << " rows)\n"
              << "wrote " << loc.summary.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin networks under spatially correlated noise: scenario runner"};
    app.require_subcommand(1);

    struct Entry {
        const char* name;
        const char* help;
        corrnoise::Scenario scenario;
    };
    const Entry entries[] = {
        {"evolve", "Time-resolved site observables for one configuration", corrnoise::Scenario::Evolve},
        {"sweep-xi", "Transfer quality against correlation length for several chain lengths",
         corrnoise::Scenario::SweepXi},
        {"blocking", "Long-time relaxation of uncoupled spins in a common bath", corrnoise::Scenario::Blocking},
        {"strobe", "Refocusing-time decay over many passes", corrnoise::Scenario::Strobe},
        {"validate", "Cross-engine and invariant self-checks", corrnoise::Scenario::Validate},
    };
    CommonOptions opts;
    std::optional<corrnoise::Scenario> chosen;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        add_common(sub, opts);
        const auto scenario = e.scenario;
        sub->callback([&chosen, scenario] { chosen = scenario; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        return run(*chosen, opts);
    } catch (const corrnoise::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const corrnoise::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
