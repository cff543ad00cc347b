#include "corrnoise/experiments.hpp"

#include "corrnoise/errors.hpp"
#include "corrnoise/full_engine.hpp"
#include "corrnoise/observables.hpp"
#include "corrnoise/reduced_engine.hpp"
#include "corrnoise/validate.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

namespace corrnoise {

namespace {

nlohmann::json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double pass_time(double g) { return std::numbers::pi / (2.0 * g); }

} // namespace

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    const auto threads = static_cast<std::size_t>(std::max(1, std::min<int>(resolve_workers(workers),
                                                                           static_cast<int>(std::max<std::size_t>(count, 1)))));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (!stop.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                stop = true;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
}

EngineKind resolve_engine(EngineChoice choice, int n_spins, double c_relax_up, bool validation) {
    switch (choice) {
    case EngineChoice::Full: return EngineKind::Full;
    case EngineChoice::Reduced: return EngineKind::Reduced;
    case EngineChoice::Auto: break;
    }
    if (c_relax_up > 0.0) return EngineKind::Full;
    if (validation && n_spins <= 8) return EngineKind::Full;
    return EngineKind::Reduced;
}

std::string engine_kind_name(EngineKind kind) { return kind == EngineKind::Full ? "full" : "reduced"; }

double aligned_step(double max_dt, double period, int multiple) {
    if (!(max_dt > 0.0) || !(period > 0.0) || multiple < 1) throw InputError("aligned_step: bad arguments");
    const double blocks = std::ceil(period / (max_dt * multiple) - 1e-9);
    return period / (std::max(1.0, blocks) * multiple);
}

namespace {

template <class Liouvillian>
EvolveOptions plan_run(const Liouvillian& l, const RunControl& c) {
    EvolveOptions opts;
    opts.t_final = c.t_final;
    double step = c.dt > 0.0 ? c.dt : l.default_dt();
    opts.sample_every = c.sample_every > 0 ? c.sample_every : 1;
    if (c.period > 0.0) {
        if (c.dt <= 0.0) step = aligned_step(step, c.period, c.samples_per_period);
        if (c.sample_every <= 0) {
            const auto per_period = static_cast<long>(std::llround(c.period / step));
            opts.sample_every = static_cast<int>(std::max(1L, per_period / std::max(1, c.samples_per_period)));
        }
    }
    opts.dt = step;
    return opts;
}

} // namespace

Trajectory simulate_from_site(const NetworkSpec& net, const NoiseSpec& noise, EngineKind engine, int site,
                              const RunControl& control, const SampleHook& hook) {
    const auto kernel = build_kernel(net.positions, noise.xi);
    Trajectory out;
    out.engine = engine;
    if (engine == EngineKind::Full) {
        FullLiouvillian l(net, kernel, noise);
        const std::array<int, 1> up{site};
        auto r = evolve_full(FullState::product(net.n_spins, up), l, plan_run(l, control), hook);
        out.series = std::move(r.series);
        out.final_rho = std::move(r.final_state.rho);
        out.dt = r.dt;
    } else {
        ReducedLiouvillian l(net, kernel, noise);
        auto r = evolve_reduced(ReducedState::site(net.n_spins, site), l, plan_run(l, control), hook);
        out.series = std::move(r.series);
        out.final_rho = std::move(r.final_state.rho);
        out.dt = r.dt;
    }
    return out;
}

// ---- sweep-xi ----------------------------------------------------------------

PacketWidth coherent_packet_halfwidth(int n_spins, double g) {
    const auto net = NetworkSpec::chain(n_spins, g);
    ReducedLiouvillian l(net, CorrelationKernel::identity(n_spins), NoiseSpec{});
    const double half = pass_time(g) / 2.0;
    auto r = evolve_reduced(ReducedState::site(n_spins, 0), l, plan_run(l, RunControl{half, 0.0, 0, half, 1}));
    return packet_halfwidth(observe(r.final_state).sz);
}

SweepReport sweep_xi(const ScenarioConfig& config) {
    const auto grid = config.xi_grid();
    const std::size_t n_count = config.n_list.size();
    const std::size_t per_n = grid.size() + 1; // last slot: packet width
    const double period = pass_time(config.g);

    SweepReport report;
    report.curves.resize(n_count);
    for (std::size_t i = 0; i < n_count; ++i) {
        report.curves[i].n_spins = config.n_list[i];
        report.curves[i].points.resize(grid.size());
    }
    parallel_for(n_count * per_n, config.workers, [&](std::size_t task) {
        const std::size_t ni = task / per_n, xi_i = task % per_n;
        auto& curve = report.curves[ni];
        const int n = curve.n_spins;
        if (xi_i == grid.size()) {
            const auto w = coherent_packet_halfwidth(n, config.g);
            curve.packet_halfwidth = w.halfwidth;
            curve.packet_degenerate = w.degenerate;
            return;
        }
        const double xi = grid[xi_i];
        const auto net = config.network(n);
        const auto noise = config.noise(xi);
        const auto engine = resolve_engine(config.engine, n, noise.c_relax_up);
        const auto traj = simulate_from_site(net, noise, engine, 0, RunControl{period, config.dt, 0, period, 1});
        curve.points[xi_i] = {xi, transfer_quality(traj.series, config.g, traj.dt / 2.0)};
    });

    std::vector<double> widths, critical;
    for (auto& curve : report.curves) {
        try {
            curve.critical = critical_xi(curve.points);
            widths.push_back(curve.packet_halfwidth);
            critical.push_back(curve.critical->xi);
        } catch (const ExtractionError& e) {
            curve.error = e.what();
        }
    }
    try {
        report.fit = linear_fit(widths, critical);
    } catch (const std::exception& e) {
        report.fit_error = e.what();
    }
    return report;
}

// ---- blocking ----------------------------------------------------------------

std::vector<BlockingPoint> blocking(const ScenarioConfig& config) {
    std::vector<BlockingPoint> points(config.n_list.size());
    parallel_for(points.size(), config.workers, [&](std::size_t i) {
        const int n = config.n_list[i];
        const auto net = config.network(n);
        const auto noise = config.noise();
        ReducedLiouvillian l(net, build_kernel(net.positions, noise.xi), noise);
        const auto run = evolve_until_stationary(ReducedState::site(n, 0), l, config.dt);
        const auto obs = observe(run.state);
        auto& p = points[i];
        p.n_spins = n;
        p.sz_first = obs.sz(0);
        p.energy_above_ground = (obs.sz.array() + 1.0).sum();
        p.transferred = p.energy_above_ground - (obs.sz(0) + 1.0);
        p.predicted = predict_final_state(net.relaxation_couplings);
        p.t = run.t;
        p.converged = run.converged;
    });
    return points;
}

// ---- strobe ------------------------------------------------------------------

StrobeReport strobe(const NetworkSpec& net, const NoiseSpec& noise, int passes, double period, double dt) {
    if (passes < 1) throw InputError("strobe: passes must be >= 1");
    const int n = net.n_spins;
    ReducedLiouvillian l(net, build_kernel(net.positions, noise.xi), noise);
    const auto opts = plan_run(l, RunControl{passes * period, dt > 0.0 ? aligned_step(dt, period) : 0.0, 0, period, 1});
    const auto plus = end_pair_ground_mixture(n, EndPairSign::Plus);
    const auto minus = end_pair_ground_mixture(n, EndPairSign::Minus);

    StrobeReport r;
    r.n_spins = n;
    r.pass_time = period;
    evolve_reduced(ReducedState::site(n, 0), l, opts, [&](double t, const Eigen::MatrixXcd& rho) {
        const auto k = std::llround(t / period);
        const int refocus = (k % 2 == 1) ? n - 1 : 0;
        r.t.push_back(t);
        r.refocus_population.push_back(rho(refocus, refocus).real());
        r.sz_first.push_back(2.0 * rho(0, 0).real() - 1.0);
        r.sz_last.push_back(2.0 * rho(n - 1, n - 1).real() - 1.0);
        r.purity.push_back(purity(rho));
        r.fidelity_plus.push_back(fidelity(rho, plus));
        r.fidelity_minus.push_back(fidelity(rho, minus));
    });
    r.fit = fit_two_exponential(r.t, r.refocus_population, 3);
    r.breakpoint_pass = r.fit.breakpoint;
    return r;
}

// ---- scenarios ---------------------------------------------------------------

nlohmann::json config_to_json(const ScenarioConfig& c) {
    nlohmann::json j;
    j["scenario"] = scenario_name(c.scenario);
    j["topology"] = c.topology == Topology::Chain ? "chain" : "uncoupled";
    j["n_spins"] = c.n_spins;
    j["g"] = number(c.g);
    j["omega_q"] = number(c.omega_q);
    j["v"] = number(c.v);
    j["nu"] = number(c.nu);
    j["dephasing_couplings"] = c.dephasing_couplings;
    j["relaxation_couplings"] = c.relaxation_couplings;
    j["xi"] = number(c.xi);
    j["c_dephasing"] = number(c.c_dephasing);
    j["c_relax_down"] = number(c.c_relax_down);
    j["c_relax_up"] = number(c.c_relax_up);
    j["engine"] = engine_name(c.engine);
    j["dt"] = number(c.dt);
    j["t_final"] = number(c.t_final);
    j["sample_every"] = c.sample_every;
    j["initial_site"] = c.initial_site;
    j["xi_grid"] = c.xi_grid();
    j["n_list"] = c.n_list;
    j["passes"] = c.passes;
    j["seed"] = c.seed;
    return j;
}

ScenarioResult run_evolve(const ScenarioConfig& config) {
    const auto net = config.network();
    const auto noise = config.noise();
    const auto engine = resolve_engine(config.engine, config.n_spins, noise.c_relax_up);
    const double period = pass_time(config.g);
    const double t_final = config.t_final > 0.0 ? config.t_final : 4.0 * period;
    const auto traj = simulate_from_site(net, noise, engine, config.initial_site - 1,
                                         RunControl{t_final, config.dt, config.sample_every, period, 25});

    ScenarioResult out;
    out.scenario = Scenario::Evolve;
    const auto& s = traj.series;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& obs = s.samples[i];
        for (int j = 0; j < config.n_spins; ++j) {
            ResultRow row;
            row.scenario = "evolve";
            row.n_spins = config.n_spins;
            row.xi = config.xi;
            row.t = s.t[i];
            row.site = j + 1;
            row.sz = obs.sz(j);
            row.abs_sx = obs.abs_sx(j);
            row.purity = obs.purity;
            out.rows.push_back(std::move(row));
        }
    }
    auto& sum = out.summary;
    sum["config"] = config_to_json(config);
    sum["engine"] = engine_kind_name(engine);
    sum["frame"] = "rotating";
    sum["dt"] = traj.dt;
    sum["samples"] = s.size();
    sum["final_purity"] = s.samples.back().purity;
    if (config.topology == Topology::Chain && config.initial_site == 1 && t_final >= period) {
        try {
            sum["quality"] = transfer_quality(s, config.g, traj.dt / 2.0);
        } catch (const SamplingGridError&) {
            sum["quality"] = nullptr;
        }
    }
    return out;
}

ScenarioResult run_sweep_xi(const ScenarioConfig& config) {
    const auto report = sweep_xi(config);
    ScenarioResult out;
    out.scenario = Scenario::SweepXi;
    const double period = pass_time(config.g);
    nlohmann::json curves = nlohmann::json::array();
    for (const auto& c : report.curves) {
        for (const auto& [xi, q] : c.points) {
            ResultRow row;
            row.scenario = "sweep-xi";
            row.n_spins = c.n_spins;
            row.xi = xi;
            row.t = period;
            row.site = c.n_spins;
            row.quality = q;
            out.rows.push_back(std::move(row));
        }
        nlohmann::json cj;
        cj["n_spins"] = c.n_spins;
        cj["packet_halfwidth"] = c.packet_halfwidth;
        cj["packet_degenerate"] = c.packet_degenerate;
        if (c.critical) {
            cj["xi_c"] = c.critical->xi;
            cj["xi_c_cell"] = {c.points[c.critical->cell].first, c.points[c.critical->cell + 1].first};
            cj["max_gradient"] = c.critical->max_gradient;
        } else {
            cj["xi_c"] = nullptr;
            cj["error"] = c.error;
        }
        curves.push_back(cj);
    }
    auto& sum = out.summary;
    sum["config"] = config_to_json(config);
    sum["curves"] = curves;
    if (report.fit) {
        sum["fit"] = {{"slope", report.fit->slope}, {"intercept", report.fit->intercept},
                      {"r_squared", report.fit->r_squared}};
    } else {
        sum["fit"] = nullptr;
        sum["fit_error"] = report.fit_error;
    }
    return out;
}

ScenarioResult run_blocking(const ScenarioConfig& config) {
    const auto points = blocking(config);
    ScenarioResult out;
    out.scenario = Scenario::Blocking;
    nlohmann::json table = nlohmann::json::array();
    bool all_converged = true;
    for (const auto& p : points) {
        ResultRow row;
        row.scenario = "blocking";
        row.n_spins = p.n_spins;
        row.xi = config.xi;
        row.t = p.t;
        row.site = 1;
        row.sz = p.sz_first;
        row.extra = "predicted_sz=" + format_number(p.predicted.sz_first) +
                    ";energy=" + format_number(p.energy_above_ground) +
                    ";predicted_energy=" + format_number(p.predicted.energy_above_ground) +
                    ";transferred=" + format_number(p.transferred) +
                    ";predicted_transferred=" + format_number(p.predicted.transferred) +
                    ";converged=" + (p.converged ? "1" : "0");
        out.rows.push_back(std::move(row));
        all_converged = all_converged && p.converged;
        table.push_back({{"n_spins", p.n_spins},
                         {"sz_first", p.sz_first},
                         {"predicted_sz_first", p.predicted.sz_first},
                         {"energy_above_ground", p.energy_above_ground},
                         {"predicted_energy_above_ground", p.predicted.energy_above_ground},
                         {"transferred", p.transferred},
                         {"predicted_transferred", p.predicted.transferred},
                         {"t", p.t},
                         {"converged", p.converged}});
    }
    out.summary["config"] = config_to_json(config);
    out.summary["points"] = table;
    out.summary["all_converged"] = all_converged;
    return out;
}

ScenarioResult run_strobe(const ScenarioConfig& config) {
    const auto net = config.network();
    const auto report = strobe(net, config.noise(), config.passes, pass_time(config.g), config.dt);
    ScenarioResult out;
    out.scenario = Scenario::Strobe;
    const int n = config.n_spins;
    for (std::size_t k = 0; k < report.t.size(); ++k) {
        const std::string extra = "pass=" + std::to_string(k) +
                                  ";refocus_population=" + format_number(report.refocus_population[k]) +
                                  ";fidelity_minus=" + format_number(report.fidelity_minus[k]);
        for (int site : {1, n}) {
            ResultRow row;
            row.scenario = "strobe";
            row.n_spins = n;
            row.xi = config.xi;
            row.t = report.t[k];
            row.site = site;
            row.sz = site == 1 ? report.sz_first[k] : report.sz_last[k];
            row.purity = report.purity[k];
            row.fidelity = report.fidelity_plus[k];
            row.extra = extra;
            out.rows.push_back(std::move(row));
        }
    }
    auto& sum = out.summary;
    sum["config"] = config_to_json(config);
    sum["pass_time"] = report.pass_time;
    sum["fit_ok"] = report.fit.ok;
    if (report.fit.ok) {
        const std::size_t b = report.breakpoint_pass;
        sum["fast_rate"] = report.fit.fast_rate;
        sum["slow_rate"] = report.fit.slow_rate;
        sum["rate_ratio"] = number(report.fit.slow_rate / report.fit.fast_rate);
        sum["breakpoint_pass"] = b;
        sum["breakpoint_t"] = report.t[b];
        sum["fidelity_plus_at_breakpoint"] = report.fidelity_plus[b];
        sum["fidelity_minus_at_breakpoint"] = report.fidelity_minus[b];
    }
    auto best = [&](const std::vector<double>& f) {
        const auto it = std::max_element(f.begin(), f.end());
        return nlohmann::json{{"value", *it}, {"pass", it - f.begin()}};
    };
    sum["max_fidelity_plus"] = best(report.fidelity_plus);
    sum["max_fidelity_minus"] = best(report.fidelity_minus);
    return out;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
    switch (config.scenario) {
    case Scenario::Evolve: return run_evolve(config);
    case Scenario::SweepXi: return run_sweep_xi(config);
    case Scenario::Blocking: return run_blocking(config);
    case Scenario::Strobe: return run_strobe(config);
    case Scenario::Validate: return run_validate(config).result;
    }
    throw ContractError("unknown scenario");
}

OutputLocation write_outputs(const ScenarioResult& result, const std::filesystem::path& out_root) {
    namespace fs = std::filesystem;
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &utc);
    const std::string base = scenario_name(result.scenario) + "_" + stamp;

    OutputLocation loc;
    std::error_code ec;
    fs::create_directories(out_root, ec);
    if (ec) throw ResourceError("cannot create output directory " + out_root.string() + ": " + ec.message());
    loc.dir = out_root / base;
    for (int suffix = 2; fs::exists(loc.dir); ++suffix) loc.dir = out_root / (base + "_" + std::to_string(suffix));
    if (!fs::create_directory(loc.dir, ec) || ec) {
        throw ResourceError("cannot create output directory " + loc.dir.string());
    }
    loc.csv = loc.dir / "data.csv";
    loc.summary = loc.dir / "summary.json";
    {
        std::ofstream csv(loc.csv);
        write_csv(csv, result.rows);
        if (!csv) throw ResourceError("cannot write " + loc.csv.string());
    }
    {
        std::ofstream js(loc.summary);
        js << result.summary.dump(2) << '\n';
        if (!js) throw ResourceError("cannot write " + loc.summary.string());
    }
    return loc;
}

} // namespace corrnoise
