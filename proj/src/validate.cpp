#include "corrnoise/validate.hpp"

#include "corrnoise/analytics.hpp"
#include "corrnoise/errors.hpp"
#include "corrnoise/full_engine.hpp"
#include "corrnoise/observables.hpp"
#include "corrnoise/reduced_engine.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace corrnoise {

namespace {

struct Check {
    bool ok{true};
    std::ostringstream detail;

    void expect(bool condition, const std::string& what) {
        if (!condition) {
            if (!ok) detail << "; ";
            ok = false;
            detail << what;
        }
    }
};

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(3);
    s << x;
    return s.str();
}

Eigen::MatrixXcd random_density(int dim, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = {g(rng), g(rng)};
    Eigen::MatrixXcd rho = a * a.adjoint();
    return rho / rho.trace();
}

// Full and reduced propagation of |1> on the same step; returns the largest
// element deviation of the projected full state over the run.
double engine_deviation(const NetworkSpec& net, const NoiseSpec& noise, bool flip_sign) {
    const int n = net.n_spins;
    const auto kernel = build_kernel(net.positions, noise.xi);
    FullLiouvillian full(net, kernel, noise);
    ReducedLiouvillian reduced = flip_sign
        ? ReducedLiouvillian(-build_hamiltonian_reduced(net), build_dephasing_rates(net, kernel, noise),
                             build_jump_operators(net, kernel, noise))
        : ReducedLiouvillian(net, kernel, noise);
    const double dt = std::min(full.default_dt(), reduced.default_dt());
    const EvolveOptions opts{std::numbers::pi, dt, 5};
    std::vector<Eigen::MatrixXcd> a, b;
    const std::array<int, 1> first{0};
    evolve_full(FullState::product(n, first), full, opts,
                [&](double, const Eigen::MatrixXcd& rho) { a.push_back(project_to_reduced(FullState{n, rho}).rho); });
    evolve_reduced(ReducedState::site(n, 0), reduced, opts,
                   [&](double, const Eigen::MatrixXcd& rho) { b.push_back(rho); });
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        worst = std::max(worst, (a[i] - b[i]).cwiseAbs().maxCoeff());
    }
    return worst;
}

void suite_hamiltonian_projection(Check& c) {
    for (int n : {2, 4, 6}) {
        const auto net = NetworkSpec::chain(n);
        const auto full = build_hamiltonian_full(net);
        const double ground = full(0, 0).real();
        FullState as_state{n, full};
        Eigen::MatrixXd projected = project_to_reduced(as_state).rho.real();
        projected.diagonal().array() -= ground;
        const double dev = (projected - build_hamiltonian_reduced(net, Frame::Lab)).cwiseAbs().maxCoeff();
        c.expect(dev < 1e-12, "N=" + std::to_string(n) + " projection deviates by " + fmt(dev));
    }
}

void suite_engine_equivalence(Check& c, bool flip_sign) {
    for (int n : {4, 5}) {
        for (double xi : {0.2, 2.0, 20.0}) {
            for (bool dephasing : {true, false}) {
                const auto net = NetworkSpec::chain(n, 1.0, 100.0, dephasing ? 1.0 : 0.0, dephasing ? 0.0 : 1.0);
                const NoiseSpec noise{xi, 1.0, 1.0, 0.0};
                const double dev = engine_deviation(net, noise, flip_sign && n == 5);
                c.expect(dev < 1e-6, "N=" + std::to_string(n) + " xi=" + fmt(xi) +
                                         (dephasing ? " dephasing" : " relaxation") + " deviation " + fmt(dev));
            }
        }
    }
}

void suite_trajectory_invariants(Check& c, bool large_dt, std::mt19937& rng) {
    const int n = 4;
    const auto net = NetworkSpec::chain(n, 1.0, 100.0, 1.0, 1.0);
    const NoiseSpec noise{2.0, 0.5, 0.5, 0.0};
    FullLiouvillian l(net, build_kernel(net.positions, 2.0), noise);
    // Classic RK4 is unstable beyond |z| ~ 2.8 on the negative real axis.
    const double dt = large_dt ? 2.0 * 2.8 / l.frequency_scale() * 4.0 : 0.0;
    double worst_trace = 0.0, worst_herm = 0.0, worst_eig = 0.0, worst_rise = 0.0;
    double previous = 1e300;
    evolve_full(FullState{n, random_density(16, rng)}, l, EvolveOptions{2.0, dt, 1},
                [&](double, const Eigen::MatrixXcd& rho) {
                    worst_trace = std::max(worst_trace, std::abs(rho.trace() - 1.0));
                    worst_herm = std::max(worst_herm, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
                    worst_eig = std::min(worst_eig, min_eigenvalue(rho));
                    double sz = 0.0;
                    for (int a = 0; a < 16; ++a) sz += rho(a, a).real() * (2.0 * excitation_count(a) - n);
                    worst_rise = std::max(worst_rise, sz - previous);
                    previous = sz;
                });
    c.expect(worst_trace < 1e-8, "trace drift " + fmt(worst_trace));
    c.expect(worst_herm < 1e-8, "Hermiticity error " + fmt(worst_herm));
    c.expect(worst_eig > -1e-6, "negative eigenvalue " + fmt(worst_eig));
    c.expect(worst_rise <= 1e-10, "<S_z> increased by " + fmt(worst_rise));
}

void suite_block_conservation(Check& c, std::mt19937& rng) {
    const int n = 4;
    const auto net = NetworkSpec::chain(n, 1.0, 100.0, 1.0, 0.0);
    const NoiseSpec noise{0.7, 1.0, 0.0, 0.0};
    FullLiouvillian l(net, build_kernel(net.positions, 0.7), noise);
    const FullState start{n, random_density(16, rng)};
    auto blocks = [&](const Eigen::MatrixXcd& rho) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
        for (int a = 0; a < 16; ++a) b(excitation_count(a)) += rho(a, a).real();
        return b;
    };
    const Eigen::VectorXd initial = blocks(start.rho);
    double worst = 0.0;
    evolve_full(start, l, EvolveOptions{2.0, 0.0, 5}, [&](double, const Eigen::MatrixXcd& rho) {
        worst = std::max(worst, (blocks(rho) - initial).cwiseAbs().maxCoeff());
    });
    c.expect(worst < 1e-8, "block population drift " + fmt(worst));
}

void suite_jump_reconstruction(Check& c, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int n : {3, 6, 9}) {
        NetworkSpec net = NetworkSpec::chain(n);
        for (int j = 0; j < n; ++j) net.relaxation_couplings(j) = u(rng);
        for (double xi : {0.0, 1.0, 5.0, kPerfectCorrelation}) {
            const auto kernel = build_kernel(net.positions, xi);
            const NoiseSpec noise{xi, 0.0, 1.0, 0.0};
            Eigen::MatrixXcd rho = random_density(n + 1, rng);
            const auto jumps = build_jump_operators(net, kernel, noise);
            const double dev =
                (jumps.apply(rho) - apply_relaxation_double_sum(rho, net, kernel, noise)).cwiseAbs().maxCoeff();
            c.expect(dev < 1e-10, "N=" + std::to_string(n) + " xi=" + fmt(xi) + " deviation " + fmt(dev));
        }
    }
}

void suite_dephasing_limits(Check& c) {
    const int n = 4;
    const double cd = 0.5, gamma = 2.0 * cd;
    const auto net = NetworkSpec::uncoupled(n, 100.0, 1.0, 0.0);
    const NoiseSpec noise{0.0, cd, 0.0, 0.0};
    for (auto limit : {CorrelationLimit::Uncorrelated, CorrelationLimit::Perfect}) {
        const auto kernel =
            limit == CorrelationLimit::Uncorrelated ? CorrelationKernel::identity(n) : CorrelationKernel::all_ones(n);
        double worst = 0.0;
        for (std::uint32_t a = 0; a < 16; ++a) {
            for (std::uint32_t b = 0; b < 16; ++b) {
                FullState s{n, Eigen::MatrixXcd::Zero(16, 16)};
                s.rho(a, b) = 1.0;
                const double rate = -apply_dephasing_dissipator(s, net, kernel, noise)(a, b).real();
                std::vector<int> ua, ub;
                for (int j = 0; j < n; ++j) {
                    if (spin_up(n, a, j)) ua.push_back(j);
                    if (spin_up(n, b, j)) ub.push_back(j);
                }
                worst = std::max(worst, std::abs(rate - rate_oracle(ua, ub, limit, gamma)));
            }
        }
        c.expect(worst < 1e-12, std::string(limit == CorrelationLimit::Uncorrelated ? "n_f" : "n_e^2") +
                                    " rule off by " + fmt(worst));
    }
}

void suite_coherent_transfer(Check& c, const ScenarioConfig& config) {
    const int n = std::max(2, config.n_spins);
    const auto engine = resolve_engine(config.engine, n, 0.0, true);
    const auto net = NetworkSpec::chain(n, config.g);
    const double period = std::numbers::pi / (2.0 * config.g);
    const auto traj = simulate_from_site(net, NoiseSpec{}, engine, 0, RunControl{2.0 * period, 0.0, 0, period, 1});
    const double q = transfer_quality(traj.series, config.g, traj.dt / 2.0);
    c.expect(q > 1.0 - 1e-6, "quality " + fmt(1.0 - q) + " below 1");
    const double back = traj.series.samples.back().sz(0);
    c.expect(back > 1.0 - 1e-6, "no return to the first site after pi/g");
}

void suite_final_state(Check& c) {
    for (int n = 1; n <= 8; ++n) {
        const auto net = NetworkSpec::uncoupled(n, 100.0, 0.0, 1.0);
        const auto kernel = CorrelationKernel::all_ones(n);
        const NoiseSpec noise{kPerfectCorrelation, 0.0, 1.0, 0.0};
        const auto predicted = predict_final_state(net, kernel, noise);
        const auto run = evolve_until_stationary(ReducedState::site(n, 0), ReducedLiouvillian(net, kernel, noise));
        const double got = observe(run.state).sz(0);
        c.expect(run.converged && std::abs(got - predicted.sz_first) < 1e-3,
                 "n=" + std::to_string(n) + " got " + fmt(got) + " predicted " + fmt(predicted.sz_first));
    }
}

void suite_subradiant(Check& c, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.2, 2.0);
    std::normal_distribution<double> g;
    for (int n : {3, 5}) {
        NetworkSpec net = NetworkSpec::uncoupled(n, 100.0, 0.0, 1.0);
        for (int j = 0; j < n; ++j) net.relaxation_couplings(j) = u(rng);
        const NoiseSpec noise{kPerfectCorrelation, 0.0, 1.0, 0.0};
        ReducedLiouvillian l(net, CorrelationKernel::all_ones(n), noise);
        const auto basis = stationary_subspace(net.relaxation_couplings);
        Eigen::VectorXd coeff(n - 1);
        for (int j = 0; j < n - 1; ++j) coeff(j) = g(rng);
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n + 1);
        psi.head(n) = (basis.states * coeff).cast<std::complex<double>>();
        const double lifetime = 1.0 / net.relaxation_couplings.squaredNorm();
        const auto r = evolve_reduced(ReducedState::pure(n, psi), l, EvolveOptions{10.0 * lifetime, 0.0, 1 << 30});
        const double loss = std::abs(r.final_state.rho(n, n));
        c.expect(loss < 1e-8, "n=" + std::to_string(n) + " lost " + fmt(loss));
    }
}

} // namespace

bool ValidationReport::all_passed() const {
    for (const auto& s : suites)
        if (!s.passed) return false;
    return true;
}

ValidationReport run_validate(const ScenarioConfig& config) {
    std::mt19937 rng(static_cast<std::mt19937::result_type>(config.seed));
    const bool sign_flip = config.inject_fault == Fault::SignFlip;
    const bool large_dt = config.inject_fault == Fault::LargeDt;

    const std::vector<std::pair<std::string, std::function<void(Check&)>>> suites = {
        {"hamiltonian-projection", [&](Check& c) { suite_hamiltonian_projection(c); }},
        {"full-vs-reduced", [&](Check& c) { suite_engine_equivalence(c, sign_flip); }},
        {"trajectory-invariants", [&](Check& c) { suite_trajectory_invariants(c, large_dt, rng); }},
        {"excitation-block-conservation", [&](Check& c) { suite_block_conservation(c, rng); }},
        {"jump-reconstruction", [&](Check& c) { suite_jump_reconstruction(c, rng); }},
        {"dephasing-rate-limits", [&](Check& c) { suite_dephasing_limits(c); }},
        {"coherent-transfer", [&](Check& c) { suite_coherent_transfer(c, config); }},
        {"final-state-prediction", [&](Check& c) { suite_final_state(c); }},
        {"subradiant-protection", [&](Check& c) { suite_subradiant(c, rng); }},
    };

    ValidationReport report;
    report.result.scenario = Scenario::Validate;
    nlohmann::json list = nlohmann::json::array();
    for (const auto& [name, run] : suites) {
        Check check;
        try {
            run(check);
        } catch (const IntegrationDiverged& e) {
            check.ok = false;
            check.detail << "integration diverged: " << e.what();
        } catch (const std::exception& e) {
            check.ok = false;
            check.detail << "error: " << e.what();
        }
        SuiteResult s{name, check.ok, check.detail.str()};
        ResultRow row;
        row.scenario = "validate";
        row.quality = s.passed ? 1.0 : 0.0;
        row.extra = "suite=" + name + ";passed=" + (s.passed ? "1" : "0");
        report.result.rows.push_back(std::move(row));
        list.push_back({{"suite", name}, {"passed", s.passed}, {"detail", s.detail}});
        report.suites.push_back(std::move(s));
    }
    report.result.summary["config"] = config_to_json(config);
    report.result.summary["suites"] = list;
    report.result.summary["all_passed"] = report.all_passed();
    return report;
}

} // namespace corrnoise
