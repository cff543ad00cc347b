// config.hpp — Scenario configuration: flat `key = value` text, one entry per
// line, '#' starts a comment, lists are comma separated.
//
// Lengths are in units of the site spacing d, times in units of 1/g, and
// energies/rates in the same units as g.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "corrnoise/model.hpp"

namespace corrnoise {

enum class Scenario { Evolve, SweepXi, Blocking, Strobe, Validate };
enum class EngineChoice { Full, Reduced, Auto };
enum class Topology { Chain, Uncoupled };
enum class Fault { None, SignFlip, LargeDt };

struct ScenarioConfig {
    Scenario scenario{Scenario::Evolve};

    // Network
    Topology topology{Topology::Chain};
    int n_spins{20};
    double g{1.0};
    double omega_q{100.0};
    double v{0.0};  // uniform dephasing coupling
    double nu{0.0}; // uniform relaxation coupling
    std::vector<double> dephasing_couplings;  // per-site override (length N)
    std::vector<double> relaxation_couplings; // per-site override (length N)

    // Bath
    double xi{0.0};
    double c_dephasing{1.0};
    double c_relax_down{1.0};
    double c_relax_up{0.0};

    // Integration
    EngineChoice engine{EngineChoice::Auto};
    double dt{0.0};      // 0 selects the engine default
    double t_final{0.0}; // 0 selects the scenario default
    int sample_every{0}; // 0: 25 samples per pass pi/(2g)
    int initial_site{1}; // 1-based

    // Sweeps and scenario extras
    std::vector<double> xi_list;  // empty: xi_points log-spaced in [xi_min, xi_max]
    double xi_min{0.1};
    double xi_max{100.0};
    int xi_points{32};
    std::vector<int> n_list;
    int passes{200};
    Fault inject_fault{Fault::None};

    // Run control
    std::filesystem::path out_dir{"results"};
    int workers{0}; // 0: hardware concurrency
    long seed{0};   // recorded only; the dynamics are deterministic

    // Scenario defaults; each scenario starts from its standard parameter set.
    static ScenarioConfig defaults(Scenario scenario);

    NetworkSpec network(int n_spins) const;
    NetworkSpec network() const { return network(n_spins); }
    NoiseSpec noise(double xi) const;
    NoiseSpec noise() const { return noise(xi); }
    std::vector<double> xi_grid() const;

    // Throws ConfigError on missing or inconsistent scenario fields.
    void validate() const;
};

using ConfigMap = std::map<std::string, std::string>;

// Throws ConfigError on malformed lines or duplicate keys.
ConfigMap parse_config_text(const std::string& text);
ConfigMap read_config_file(const std::filesystem::path& path);

// Applies `entries` on top of the scenario defaults. A `scenario` entry must
// agree with `scenario`. Unknown keys are errors.
ScenarioConfig make_config(Scenario scenario, const ConfigMap& entries);

Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario scenario);
EngineChoice parse_engine(const std::string& name);
std::string engine_name(EngineChoice engine);

} // namespace corrnoise
