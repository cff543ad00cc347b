#include "corrnoise/full_engine.hpp"

#include "corrnoise/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace corrnoise {

namespace {

using Triplet = Eigen::Triplet<std::complex<double>>;

void require_within_cap(int n_spins, int cap) {
    if (n_spins > cap) {
        throw ResourceError("full engine is capped at " + std::to_string(cap) +
                            " spins (requested " + std::to_string(n_spins) +
                            "); use the reduced engine for single-excitation dynamics");
    }
}

std::uint32_t site_bit(int n_spins, int site) {
    return std::uint32_t{1} << (n_spins - 1 - site);
}

void require_dims(const FullState& state, const NetworkSpec& net) {
    const int dim = 1 << net.n_spins;
    if (state.n_spins != net.n_spins || state.rho.rows() != dim || state.rho.cols() != dim) {
        throw InputError("density matrix dimension does not match the network");
    }
}

// M_jk = a_j a_k K_jk c
Eigen::MatrixXd weighted_kernel(const Eigen::VectorXd& amplitudes, const CorrelationKernel& kernel,
                                double c) {
    return c * (amplitudes * amplitudes.transpose()).cwiseProduct(kernel.matrix());
}

SparseMatrixC raising_from(const SparseMatrixC& lowering) {
    return SparseMatrixC(lowering.transpose());
}

} // namespace

std::uint32_t full_basis_index(int n_spins, std::span<const int> up_sites) {
    std::uint32_t index = 0;
    for (int site : up_sites) {
        if (site < 0 || site >= n_spins) throw InputError("site index out of range");
        index |= site_bit(n_spins, site);
    }
    return index;
}

bool spin_up(int n_spins, std::uint32_t index, int site) {
    return (index & site_bit(n_spins, site)) != 0;
}

int excitation_count(std::uint32_t index) { return std::popcount(index); }

FullState FullState::product(int n_spins, std::span<const int> up_sites) {
    if (n_spins < 1 || n_spins > 30) throw InputError("unsupported spin count");
    const int dim = 1 << n_spins;
    FullState s;
    s.n_spins = n_spins;
    s.rho = Eigen::MatrixXcd::Zero(dim, dim);
    const auto idx = full_basis_index(n_spins, up_sites);
    s.rho(idx, idx) = 1.0;
    return s;
}

FullState FullState::pure(int n_spins, const Eigen::VectorXcd& psi) {
    if (psi.size() != (Eigen::Index{1} << n_spins)) throw InputError("state vector has wrong dimension");
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw InputError("state vector must be nonzero");
    const Eigen::VectorXcd u = psi / norm;
    FullState s;
    s.n_spins = n_spins;
    s.rho = u * u.adjoint();
    return s;
}

SparseMatrixC sigma_minus(int n_spins, int site) {
    const int dim = 1 << n_spins;
    const auto bit = site_bit(n_spins, site);
    std::vector<Triplet> entries;
    entries.reserve(dim / 2);
    for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(dim); ++a) {
        if (a & bit) entries.emplace_back(static_cast<int>(a ^ bit), static_cast<int>(a), 1.0);
    }
    SparseMatrixC op(dim, dim);
    op.setFromTriplets(entries.begin(), entries.end());
    return op;
}

Eigen::VectorXd sigma_z_diagonal(int n_spins, int site) {
    const int dim = 1 << n_spins;
    Eigen::VectorXd z(dim);
    for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(dim); ++a) {
        z(a) = spin_up(n_spins, a, site) ? 1.0 : -1.0;
    }
    return z;
}

namespace {

SparseMatrixC hamiltonian_sparse(const NetworkSpec& net, Frame frame) {
    const int n = net.n_spins;
    const int dim = 1 << n;
    std::vector<Triplet> entries;
    for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(dim); ++a) {
        if (frame == Frame::Lab) {
            const int up = excitation_count(a);
            entries.emplace_back(a, a, net.omega_q * (2.0 * up - n));
        }
        // (c/2)(XX + YY) = c (S+_j S-_k + S-_j S+_k): swaps an up/down pair.
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const double c = net.coupling(j, k);
                if (j == k || c == 0.0) continue;
                if (spin_up(n, a, k) && !spin_up(n, a, j)) {
                    const auto b = a ^ site_bit(n, j) ^ site_bit(n, k);
                    entries.emplace_back(b, a, c);
                }
            }
        }
    }
    SparseMatrixC h(dim, dim);
    h.setFromTriplets(entries.begin(), entries.end());
    return h;
}

} // namespace

Eigen::MatrixXcd build_hamiltonian_full(const NetworkSpec& net, Frame frame, int cap) {
    net.validate();
    require_within_cap(net.n_spins, cap);
    return Eigen::MatrixXcd(hamiltonian_sparse(net, frame));
}

Eigen::MatrixXcd apply_dephasing_dissipator(const FullState& state, const NetworkSpec& net,
                                            const CorrelationKernel& kernel,
                                            const NoiseSpec& noise) {
    require_dims(state, net);
    const int n = net.n_spins;
    const Eigen::MatrixXd w = weighted_kernel(net.dephasing_couplings, kernel, noise.c_dephasing);
    std::vector<Eigen::VectorXd> z;
    for (int j = 0; j < n; ++j) z.push_back(sigma_z_diagonal(n, j));

    const Eigen::MatrixXcd& rho = state.rho;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (w(j, k) == 0.0) continue;
            const Eigen::VectorXd zjzk = z[j].cwiseProduct(z[k]);
            out += w(j, k) * (z[k].asDiagonal() * rho * z[j].asDiagonal()
                              - 0.5 * (zjzk.asDiagonal() * rho + rho * zjzk.asDiagonal()));
        }
    }
    return out;
}

Eigen::MatrixXcd apply_relaxation_dissipator(const FullState& state, const NetworkSpec& net,
                                             const CorrelationKernel& kernel,
                                             const NoiseSpec& noise) {
    require_dims(state, net);
    const int n = net.n_spins;
    const Eigen::MatrixXd down = weighted_kernel(net.relaxation_couplings, kernel, noise.c_relax_down);
    const Eigen::MatrixXd up = weighted_kernel(net.relaxation_couplings, kernel, noise.c_relax_up);
    std::vector<SparseMatrixC> lower, raise;
    for (int j = 0; j < n; ++j) {
        lower.push_back(sigma_minus(n, j));
        raise.push_back(raising_from(lower.back()));
    }

    const Eigen::MatrixXcd& rho = state.rho;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (down(j, k) != 0.0) {
                const SparseMatrixC pk = raise[j] * lower[k];
                const Eigen::MatrixXcd lr = lower[k] * rho;
                out += down(j, k) * (Eigen::MatrixXcd(lr * raise[j])
                                     - 0.5 * (Eigen::MatrixXcd(pk * rho) + Eigen::MatrixXcd(rho * pk)));
            }
            if (up(j, k) != 0.0) {
                const SparseMatrixC pk = lower[j] * raise[k];
                const Eigen::MatrixXcd rr = raise[k] * rho;
                out += up(j, k) * (Eigen::MatrixXcd(rr * lower[j])
                                   - 0.5 * (Eigen::MatrixXcd(pk * rho) + Eigen::MatrixXcd(rho * pk)));
            }
        }
    }
    return out;
}

FullLiouvillian::FullLiouvillian(const NetworkSpec& net, const CorrelationKernel& kernel,
                                 const NoiseSpec& noise, Frame frame, int cap)
    : n_spins_(net.n_spins), dim_(0), frame_(frame), omega_q_(net.omega_q) {
    net.validate();
    noise.validate();
    require_within_cap(net.n_spins, cap);
    if (kernel.size() != net.n_spins) throw InputError("kernel size does not match the network");
    const int n = n_spins_;
    dim_ = 1 << n;

    hamiltonian_ = hamiltonian_sparse(net, frame);

    // Dephasing: every Z is diagonal, so the double sum acts elementwise with
    // rate G_ab - G_aa/2 - G_bb/2 where G_ab = z(b)^T W z(a).
    const Eigen::MatrixXd w = weighted_kernel(net.dephasing_couplings, kernel, noise.c_dephasing);
    has_dephasing_ = w.cwiseAbs().maxCoeff() > 0.0;
    double max_dephasing = 0.0;
    if (has_dephasing_) {
        Eigen::MatrixXd z(dim_, n);
        for (int j = 0; j < n; ++j) z.col(j) = sigma_z_diagonal(n, j);
        const Eigen::MatrixXd g = z * w * z.transpose();
        const Eigen::VectorXd diag = g.diagonal();
        dephasing_rates_ = g - 0.5 * (diag.replicate(1, dim_) + diag.transpose().replicate(dim_, 1));
        max_dephasing = dephasing_rates_.cwiseAbs().maxCoeff();
    }

    const Eigen::MatrixXd down = weighted_kernel(net.relaxation_couplings, kernel, noise.c_relax_down);
    const Eigen::MatrixXd up = weighted_kernel(net.relaxation_couplings, kernel, noise.c_relax_up);
    std::vector<SparseMatrixC> lower;
    for (int j = 0; j < n; ++j) lower.push_back(sigma_minus(n, j));

    if (down.cwiseAbs().maxCoeff() > 0.0) {
        down_anticomm_ = SparseMatrixC(dim_, dim_);
        for (int j = 0; j < n; ++j) {
            SparseMatrixC collective(dim_, dim_);
            for (int k = 0; k < n; ++k) {
                if (down(j, k) != 0.0) collective += down(j, k) * lower[k];
            }
            raising_.push_back(raising_from(lower[j]));
            down_anticomm_ += SparseMatrixC(raising_.back() * collective);
            collective_down_.push_back(std::move(collective));
        }
    }
    if (up.cwiseAbs().maxCoeff() > 0.0) {
        up_anticomm_ = SparseMatrixC(dim_, dim_);
        for (int j = 0; j < n; ++j) {
            SparseMatrixC collective(dim_, dim_);
            for (int k = 0; k < n; ++k) {
                if (up(j, k) != 0.0) collective += up(j, k) * raising_from(lower[k]);
            }
            lowering_.push_back(lower[j]);
            up_anticomm_ += SparseMatrixC(lower[j] * collective);
            collective_up_.push_back(std::move(collective));
        }
    }

    // Commutator eigenvalues span at most twice the Hamiltonian's Gershgorin
    // radius; dissipative rates add on top.
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(dim_);
    for (int col = 0; col < hamiltonian_.outerSize(); ++col) {
        for (SparseMatrixC::InnerIterator it(hamiltonian_, col); it; ++it) row_sums(it.row()) += std::abs(it.value());
    }
    frequency_scale_ = 2.0 * row_sums.maxCoeff() + max_dephasing + down.trace() + up.trace();
}

double FullLiouvillian::default_dt() const {
    if (frequency_scale_ <= 0.0) return 0.05;
    return kStepTimesScale / frequency_scale_;
}

Eigen::MatrixXcd FullLiouvillian::apply(const Eigen::MatrixXcd& rho) const {
    const std::complex<double> minus_i(0.0, -1.0);
    Eigen::MatrixXcd out = minus_i * (Eigen::MatrixXcd(hamiltonian_ * rho) -
                                      Eigen::MatrixXcd(rho * hamiltonian_));
    if (has_dephasing_) out += dephasing_rates_.cast<std::complex<double>>().cwiseProduct(rho);
    if (!collective_down_.empty()) {
        for (std::size_t j = 0; j < collective_down_.size(); ++j) {
            const Eigen::MatrixXcd lr = collective_down_[j] * rho;
            out += lr * raising_[j];
        }
        out -= 0.5 * (Eigen::MatrixXcd(down_anticomm_ * rho) + Eigen::MatrixXcd(rho * down_anticomm_));
    }
    if (!collective_up_.empty()) {
        for (std::size_t j = 0; j < collective_up_.size(); ++j) {
            const Eigen::MatrixXcd rr = collective_up_[j] * rho;
            out += rr * lowering_[j];
        }
        out -= 0.5 * (Eigen::MatrixXcd(up_anticomm_ * rho) + Eigen::MatrixXcd(rho * up_anticomm_));
    }
    return out;
}

Evolution<FullState> evolve_full(const FullState& rho0, const FullLiouvillian& liouvillian,
                                 const EvolveOptions& options, const SampleHook& hook) {
    if (rho0.n_spins != liouvillian.n_spins() || rho0.dim() != liouvillian.dim()) {
        throw InputError("initial state does not match the Liouvillian");
    }
    const double dt = options.dt > 0.0 ? options.dt : liouvillian.default_dt();
    const auto plan = detail::plan_steps(options.t_final, dt);

    Evolution<FullState> result;
    result.dt = plan.dt;
    result.series.frame = liouvillian.frame();
    result.series.omega_q = liouvillian.omega_q();
    auto sample = [&](double t, const Eigen::MatrixXcd& rho) {
        detail::check_density_matrix(rho, t);
        FullState view{rho0.n_spins, rho};
        result.series.t.push_back(t);
        result.series.samples.push_back(observe(view));
        if (hook) hook(t, rho);
    };
    auto rhs = [&](const Eigen::MatrixXcd& rho) { return liouvillian.apply(rho); };
    result.final_state.n_spins = rho0.n_spins;
    result.final_state.rho = detail::integrate_rk4(rho0.rho, rhs, plan, options.sample_every, sample);
    return result;
}

Observables observe(const FullState& state) {
    const int n = state.n_spins;
    const auto dim = static_cast<std::uint32_t>(state.dim());
    Observables obs;
    obs.sz = Eigen::VectorXd::Zero(n);
    obs.abs_sx = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        const auto bit = site_bit(n, j);
        std::complex<double> lower{0.0, 0.0};
        double sz = 0.0;
        for (std::uint32_t a = 0; a < dim; ++a) {
            const double p = state.rho(a, a).real();
            if (a & bit) {
                sz += p;
                lower += state.rho(a, a ^ bit);
            } else {
                sz -= p;
            }
        }
        obs.sz(j) = sz;
        obs.abs_sx(j) = 2.0 * std::abs(lower);
    }
    obs.purity = state.rho.cwiseAbs2().sum();
    return obs;
}

} // namespace corrnoise
