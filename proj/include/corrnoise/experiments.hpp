// experiments.hpp — Scenario runners binding the engines and analytics into
// the named experiments (evolve, sweep-xi, blocking, strobe), plus the
// worker pool and output writing shared by the CLI.

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrnoise/analytics.hpp"
#include "corrnoise/config.hpp"
#include "corrnoise/fitting.hpp"
#include "corrnoise/result_io.hpp"

namespace corrnoise {

struct ScenarioResult {
    Scenario scenario{Scenario::Evolve};
    std::vector<ResultRow> rows;
    nlohmann::json summary;
};

// 0 means hardware concurrency (at least 1).
int resolve_workers(int requested);

// Runs task(0..count-1) on `workers` threads. The first exception thrown by a
// task is rethrown after all workers have stopped.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

enum class EngineKind { Full, Reduced };

// Auto selects the reduced engine unless an upward rate needs the full
// space; for validation runs it selects the full engine up to 8 spins.
EngineKind resolve_engine(EngineChoice choice, int n_spins, double c_relax_up, bool validation = false);
std::string engine_kind_name(EngineKind kind);

// Largest step <= max_dt that divides `period` into an integer number of
// steps that is a multiple of `multiple`.
double aligned_step(double max_dt, double period, int multiple = 1);

// One trajectory from a single excited site (0-based), on either engine.
struct Trajectory {
    TimeSeries series;
    Eigen::MatrixXcd final_rho;
    double dt{0.0};
    EngineKind engine{EngineKind::Reduced};
};

struct RunControl {
    double t_final{0.0};
    double dt{0.0};       // <= 0: engine default (shrunk to divide `period` when given)
    int sample_every{0};  // 0: derived from samples_per_period, or every step
    double period{0.0};   // > 0 aligns steps and samples to multiples of this time
    int samples_per_period{1};
};

Trajectory simulate_from_site(const NetworkSpec& net, const NoiseSpec& noise, EngineKind engine, int site,
                              const RunControl& control, const SampleHook& hook = {});

// ---- sweep-xi --------------------------------------------------------------

struct SweepCurve {
    int n_spins{0};
    std::vector<std::pair<double, double>> points; // (xi, quality)
    double packet_halfwidth{0.0};
    bool packet_degenerate{false};
    std::optional<CriticalXi> critical;
    std::string error; // extraction failure, partial results kept
};

struct SweepReport {
    std::vector<SweepCurve> curves;
    std::optional<LinearFit> fit; // xi_c against w_p
    std::string fit_error;
};

// Half width of the coherent packet at t = pi/(4g) for an N-spin chain.
PacketWidth coherent_packet_halfwidth(int n_spins, double g);

SweepReport sweep_xi(const ScenarioConfig& config);

// ---- blocking --------------------------------------------------------------

struct BlockingPoint {
    int n_spins{0};
    double sz_first{0.0};
    double energy_above_ground{0.0};
    double transferred{0.0};
    FinalStatePrediction predicted;
    double t{0.0};
    bool converged{false};
};

std::vector<BlockingPoint> blocking(const ScenarioConfig& config);

// ---- strobe ----------------------------------------------------------------

struct StrobeReport {
    int n_spins{0};
    double pass_time{0.0};
    std::vector<double> t;
    std::vector<double> refocus_population; // excitation probability at the refocusing end
    std::vector<double> sz_first;
    std::vector<double> sz_last;
    std::vector<double> purity;
    std::vector<double> fidelity_plus;  // against (|1>+|N>)/sqrt2 mixed half-half with |g>
    std::vector<double> fidelity_minus; // same with (|1>-|N>)/sqrt2
    TwoRateFit fit;
    std::size_t breakpoint_pass{0};
};

// Samples a chain started in |1> at every multiple of `pass_time` (the
// refocusing times) for `passes` passes, on the reduced engine.
StrobeReport strobe(const NetworkSpec& net, const NoiseSpec& noise, int passes, double pass_time,
                    double dt = 0.0);

// ---- scenarios -------------------------------------------------------------

ScenarioResult run_evolve(const ScenarioConfig& config);
ScenarioResult run_sweep_xi(const ScenarioConfig& config);
ScenarioResult run_blocking(const ScenarioConfig& config);
ScenarioResult run_strobe(const ScenarioConfig& config);
ScenarioResult run_scenario(const ScenarioConfig& config);

nlohmann::json config_to_json(const ScenarioConfig& config);

struct OutputLocation {
    std::filesystem::path dir;
    std::filesystem::path csv;
    std::filesystem::path summary;
};

// Writes <out_root>/<scenario>_<timestamp>/{data.csv, summary.json}.
// Throws ResourceError when the directory cannot be created or written.
OutputLocation write_outputs(const ScenarioResult& result, const std::filesystem::path& out_root);

} // namespace corrnoise
