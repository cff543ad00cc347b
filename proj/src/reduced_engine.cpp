#include "corrnoise/reduced_engine.hpp"

#include "corrnoise/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace corrnoise {

namespace {

constexpr double kPsdTol = 1e-12;

Eigen::MatrixXd relaxation_matrix(const NetworkSpec& net, const CorrelationKernel& kernel,
                                  double amplitude) {
    const Eigen::VectorXd& nu = net.relaxation_couplings;
    return amplitude * (nu * nu.transpose()).cwiseProduct(kernel.matrix());
}

void require_kernel_size(const NetworkSpec& net, const CorrelationKernel& kernel) {
    if (kernel.size() != net.n_spins) throw InputError("kernel size does not match the network");
}

// Full-space basis indices of |1>, ..., |N>, |g>.
std::vector<Eigen::Index> sector_indices(int n_spins) {
    std::vector<Eigen::Index> idx;
    idx.reserve(n_spins + 1);
    for (int j = 0; j < n_spins; ++j) {
        const std::array<int, 1> up{j};
        idx.push_back(static_cast<Eigen::Index>(full_basis_index(n_spins, up)));
    }
    idx.push_back(0);
    return idx;
}

} // namespace

ReducedState ReducedState::site(int n_spins, int site) {
    if (n_spins < 1) throw InputError("reduced state needs at least one spin");
    if (site < 0 || site >= n_spins) throw InputError("site index out of range");
    ReducedState s;
    s.n_spins = n_spins;
    s.rho = Eigen::MatrixXcd::Zero(n_spins + 1, n_spins + 1);
    s.rho(site, site) = 1.0;
    return s;
}

ReducedState ReducedState::ground(int n_spins) {
    if (n_spins < 1) throw InputError("reduced state needs at least one spin");
    ReducedState s;
    s.n_spins = n_spins;
    s.rho = Eigen::MatrixXcd::Zero(n_spins + 1, n_spins + 1);
    s.rho(n_spins, n_spins) = 1.0;
    return s;
}

ReducedState ReducedState::pure(int n_spins, const Eigen::VectorXcd& psi) {
    if (psi.size() != n_spins + 1) throw InputError("state vector must have length N+1");
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw InputError("state vector must be nonzero");
    const Eigen::VectorXcd u = psi / norm;
    ReducedState s;
    s.n_spins = n_spins;
    s.rho = u * u.adjoint();
    return s;
}

Eigen::MatrixXcd JumpOperatorSet::op(std::size_t a) const {
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n_spins + 1, n_spins + 1);
    l.row(n_spins).head(n_spins) = (std::sqrt(rates.at(a)) * modes.col(static_cast<Eigen::Index>(a)))
                                       .transpose()
                                       .cast<std::complex<double>>();
    return l;
}

Eigen::MatrixXd JumpOperatorSet::reconstruct() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_spins, n_spins);
    for (std::size_t a = 0; a < rates.size(); ++a) {
        const auto col = modes.col(static_cast<Eigen::Index>(a));
        m += rates[a] * col * col.transpose();
    }
    return m;
}

Eigen::MatrixXcd JumpOperatorSet::apply(const Eigen::MatrixXcd& rho) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (std::size_t a = 0; a < rates.size(); ++a) {
        const Eigen::MatrixXcd l = op(a);
        const Eigen::MatrixXcd ldl = l.adjoint() * l;
        out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
    }
    return out;
}

Eigen::MatrixXd build_hamiltonian_reduced(const NetworkSpec& net, Frame frame) {
    net.validate();
    const int n = net.n_spins;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
    h.topLeftCorner(n, n) = net.coupling;
    if (frame == Frame::Lab) {
        // E(|j>) - E(|g>) = 2 omega_q; the ground energy -N omega_q is dropped.
        for (int j = 0; j < n; ++j) h(j, j) = 2.0 * net.omega_q;
    }
    return h;
}

DephasingRateMatrix build_dephasing_rates(const NetworkSpec& net, const CorrelationKernel& kernel,
                                          const NoiseSpec& noise) {
    net.validate();
    require_kernel_size(net, kernel);
    const int n = net.n_spins;
    const Eigen::VectorXd& v = net.dephasing_couplings;
    const Eigen::MatrixXd w = (v * v.transpose()).cwiseProduct(kernel.matrix());

    // Sign vectors: z(a)_m = +1 if spin m is up in basis state a.
    Eigen::MatrixXd z = -Eigen::MatrixXd::Ones(n, n + 1);
    for (int j = 0; j < n; ++j) z(j, j) = 1.0;

    DephasingRateMatrix rates;
    rates.lambda = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int a = 0; a <= n; ++a) {
        for (int b = a + 1; b <= n; ++b) {
            const Eigen::VectorXd dz = z.col(a) - z.col(b);
            const double value = 0.5 * noise.c_dephasing * dz.dot(w * dz);
            rates.lambda(a, b) = value;
            rates.lambda(b, a) = value;
        }
    }
    return rates;
}

JumpOperatorSet build_jump_operators(const NetworkSpec& net, const CorrelationKernel& kernel,
                                     const NoiseSpec& noise) {
    net.validate();
    require_kernel_size(net, kernel);
    JumpOperatorSet set;
    set.n_spins = net.n_spins;
    set.modes = Eigen::MatrixXd(net.n_spins, 0);
    const Eigen::MatrixXd m = relaxation_matrix(net, kernel, noise.c_relax_down);
    const double scale = m.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) return set;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw NumericalPsdError("eigendecomposition of M failed");
    const Eigen::VectorXd& evals = solver.eigenvalues();
    const double top = evals.maxCoeff();
    if (evals.minCoeff() < -kPsdTol * top) {
        throw NumericalPsdError("relaxation correlation matrix is not positive semidefinite (min eigenvalue " +
                                std::to_string(evals.minCoeff()) + ")");
    }
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = evals.size() - 1; i >= 0; --i) {
        if (evals(i) > kPsdTol * top) keep.push_back(i);
    }
    set.modes = Eigen::MatrixXd(net.n_spins, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t a = 0; a < keep.size(); ++a) {
        set.rates.push_back(evals(keep[a]));
        set.modes.col(static_cast<Eigen::Index>(a)) = solver.eigenvectors().col(keep[a]);
    }
    return set;
}

Eigen::MatrixXcd apply_relaxation_double_sum(const Eigen::MatrixXcd& rho, const NetworkSpec& net,
                                             const CorrelationKernel& kernel,
                                             const NoiseSpec& noise) {
    require_kernel_size(net, kernel);
    const int n = net.n_spins;
    if (rho.rows() != n + 1 || rho.cols() != n + 1) throw InputError("reduced rho must be (N+1)x(N+1)");
    const Eigen::MatrixXd m = relaxation_matrix(net, kernel, noise.c_relax_down);
    const int g = n;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (m(j, k) == 0.0) continue;
            // S-_k rho S+_j = rho_kj |g><g|
            out(g, g) += m(j, k) * rho(k, j);
            // S+_j S-_k = |j><k|
            Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n + 1, n + 1);
            p(j, k) = 1.0;
            out -= 0.5 * m(j, k) * (p * rho + rho * p);
        }
    }
    return out;
}

ReducedLiouvillian::ReducedLiouvillian(const NetworkSpec& net, const CorrelationKernel& kernel,
                                       const NoiseSpec& noise, Frame frame)
    : n_spins_(net.n_spins), frame_(frame), omega_q_(net.omega_q) {
    noise.validate();
    if (noise.c_relax_up > 0.0) {
        throw InputError("reduced engine requires c_relax_up = 0 (upward rates leave the "
                         "single-excitation sector); use the full engine");
    }
    hamiltonian_ = build_hamiltonian_reduced(net, frame);
    rates_ = build_dephasing_rates(net, kernel, noise);
    jumps_ = build_jump_operators(net, kernel, noise);
    finish_setup();
}

ReducedLiouvillian::ReducedLiouvillian(Eigen::MatrixXd hamiltonian, DephasingRateMatrix rates,
                                       JumpOperatorSet jumps, Frame frame, double omega_q)
    : n_spins_(jumps.n_spins), frame_(frame), omega_q_(omega_q),
      hamiltonian_(std::move(hamiltonian)), rates_(std::move(rates)), jumps_(std::move(jumps)) {
    const int d = n_spins_ + 1;
    if (hamiltonian_.rows() != d || hamiltonian_.cols() != d || rates_.lambda.rows() != d ||
        rates_.lambda.cols() != d) {
        throw InputError("reduced Liouvillian parts have inconsistent sizes");
    }
    finish_setup();
}

void ReducedLiouvillian::finish_setup() {
    decay_block_ = jumps_.reconstruct();
    const double hamiltonian_radius = hamiltonian_.cwiseAbs().rowwise().sum().maxCoeff();
    const double decay_scale = rates_.lambda.maxCoeff() + decay_block_.trace();
    frequency_scale_ = 2.0 * hamiltonian_radius + decay_scale;
}

double ReducedLiouvillian::default_dt() const {
    if (frequency_scale_ <= 0.0) return 0.05;
    return kStepTimesScale / frequency_scale_;
}

double ReducedLiouvillian::smallest_decay_rate() const {
    if (jumps_.rates.empty()) return 0.0;
    const double top = *std::max_element(jumps_.rates.begin(), jumps_.rates.end());
    double lowest = top;
    for (double r : jumps_.rates) {
        if (r > 1e-9 * top) lowest = std::min(lowest, r);
    }
    return lowest;
}

Eigen::MatrixXcd ReducedLiouvillian::apply(const Eigen::MatrixXcd& rho) const {
    const int n = n_spins_;
    const std::complex<double> minus_i(0.0, -1.0);
    Eigen::MatrixXcd out = minus_i * (hamiltonian_ * rho - rho * hamiltonian_);
    out -= rates_.lambda.cwiseProduct(rho);
    if (!jumps_.rates.empty()) {
        const auto ee = rho.topLeftCorner(n, n);
        out(n, n) += (decay_block_.cwiseProduct(ee)).sum();
        out.topRows(n) -= 0.5 * (decay_block_ * rho.topRows(n));
        out.leftCols(n) -= 0.5 * (rho.leftCols(n) * decay_block_);
    }
    return out;
}

Evolution<ReducedState> evolve_reduced(const ReducedState& rho0, const ReducedLiouvillian& liouvillian,
                                       const EvolveOptions& options, const SampleHook& hook) {
    if (rho0.n_spins != liouvillian.n_spins() || rho0.rho.rows() != rho0.dim() ||
        rho0.rho.cols() != rho0.dim()) {
        throw InputError("initial state does not match the Liouvillian");
    }
    const double dt = options.dt > 0.0 ? options.dt : liouvillian.default_dt();
    const auto plan = detail::plan_steps(options.t_final, dt);

    Evolution<ReducedState> result;
    result.dt = plan.dt;
    result.series.frame = liouvillian.frame();
    result.series.omega_q = liouvillian.omega_q();
    auto sample = [&](double t, const Eigen::MatrixXcd& rho) {
        detail::check_density_matrix(rho, t);
        result.series.t.push_back(t);
        result.series.samples.push_back(observe(ReducedState{rho0.n_spins, rho}));
        if (hook) hook(t, rho);
    };
    auto rhs = [&](const Eigen::MatrixXcd& rho) { return liouvillian.apply(rho); };
    result.final_state.n_spins = rho0.n_spins;
    result.final_state.rho = detail::integrate_rk4(rho0.rho, rhs, plan, options.sample_every, sample);
    return result;
}

StationaryRun evolve_until_stationary(const ReducedState& rho0, const ReducedLiouvillian& liouvillian,
                                      double dt, double rate_tol) {
    const double lowest = liouvillian.smallest_decay_rate();
    const double cap = lowest > 0.0 ? 50.0 / lowest : 1.0;
    const double chunk = std::min(1.0, cap);
    StationaryRun run;
    run.state = rho0;
    EvolveOptions opts;
    opts.t_final = chunk;
    opts.dt = dt;
    opts.sample_every = 1 << 30;
    while (run.t < cap - 1e-12) {
        // Coherences between decaying and stationary states relax at half the
        // population rate, so the whole matrix is watched, not just the
        // excited population.
        const Eigen::MatrixXcd before = run.state.rho;
        auto step = evolve_reduced(run.state, liouvillian, opts);
        run.state = std::move(step.final_state);
        run.t += chunk;
        if ((run.state.rho - before).cwiseAbs().maxCoeff() / chunk < rate_tol) {
            run.converged = true;
            break;
        }
    }
    return run;
}

ReducedState project_to_reduced(const FullState& full) {
    const auto idx = sector_indices(full.n_spins);
    ReducedState r;
    r.n_spins = full.n_spins;
    const auto d = static_cast<Eigen::Index>(idx.size());
    r.rho = Eigen::MatrixXcd(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) r.rho(a, b) = full.rho(idx[a], idx[b]);
    }
    return r;
}

FullState embed_in_full(const ReducedState& reduced) {
    const auto idx = sector_indices(reduced.n_spins);
    FullState f;
    f.n_spins = reduced.n_spins;
    const Eigen::Index dim = Eigen::Index{1} << reduced.n_spins;
    f.rho = Eigen::MatrixXcd::Zero(dim, dim);
    const auto d = static_cast<Eigen::Index>(idx.size());
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) f.rho(idx[a], idx[b]) = reduced.rho(a, b);
    }
    return f;
}

Observables observe(const ReducedState& state) {
    const int n = state.n_spins;
    Observables obs;
    obs.sz.resize(n);
    obs.abs_sx.resize(n);
    for (int j = 0; j < n; ++j) {
        obs.sz(j) = 2.0 * state.rho(j, j).real() - 1.0;
        obs.abs_sx(j) = 2.0 * std::abs(state.rho(j, n));
    }
    obs.purity = state.rho.cwiseAbs2().sum();
    return obs;
}

} // namespace corrnoise
