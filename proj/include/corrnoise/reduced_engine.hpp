// reduced_engine.hpp — Propagation restricted to the single-excitation sector
// plus the ground state, basis {|1>, ..., |N>, |g>} with |g> last.
//
// XY coupling and sigma_z dephasing conserve the excitation number and vacuum
// relaxation only moves |j> -> |g>, so this sector is closed whenever the
// upward amplitude is zero.

#pragma once

#include <Eigen/Dense>

#include <vector>

#include "corrnoise/dynamics.hpp"
#include "corrnoise/full_engine.hpp"
#include "corrnoise/model.hpp"

namespace corrnoise {

struct ReducedState {
    int n_spins{0};
    Eigen::MatrixXcd rho;

    int dim() const { return n_spins + 1; }
    int ground_index() const { return n_spins; }

    // Single excitation on the 0-based `site`.
    static ReducedState site(int n_spins, int site);
    static ReducedState ground(int n_spins);
    // Normalises psi (length N+1).
    static ReducedState pure(int n_spins, const Eigen::VectorXcd& psi);
};

// Lambda_ab is the decay rate of rho_ab under dephasing. Zero diagonal.
struct DephasingRateMatrix {
    Eigen::MatrixXd lambda;
};

// Lindblad form of the relaxation double sum: L_a = sqrt(rate_a) |g><mode_a|,
// where (rate_a, mode_a) diagonalise M_jk = nu_j nu_k K_jk c_down.
struct JumpOperatorSet {
    int n_spins{0};
    std::vector<double> rates;
    Eigen::MatrixXd modes; // N x rates.size(), unit columns

    std::size_t size() const { return rates.size(); }
    Eigen::MatrixXcd op(std::size_t a) const;
    // sum_a rate_a mode_a mode_a^T, which should equal M.
    Eigen::MatrixXd reconstruct() const;
    // sum_a (L_a rho L_a^+ - {L_a^+ L_a, rho}/2)
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
};

// <j|H|k> = coupling_jk, <j|H|j> = 2 omega_q in the lab frame (0 rotating),
// <g|H|g> = 0.
Eigen::MatrixXd build_hamiltonian_reduced(const NetworkSpec& net, Frame frame = Frame::Rotating);

// Lambda_ab = (c/2) dz^T V K V dz with z_m(j) = 2 delta_mj - 1, z_m(g) = -1.
DephasingRateMatrix build_dephasing_rates(const NetworkSpec& net, const CorrelationKernel& kernel,
                                          const NoiseSpec& noise);

// Throws NumericalPsdError when M has an eigenvalue below -1e-12 * max.
JumpOperatorSet build_jump_operators(const NetworkSpec& net, const CorrelationKernel& kernel,
                                     const NoiseSpec& noise);

// Direct evaluation of the relaxation double sum inside the sector, where
// S-_k = |g><k| and S+_j S-_k = |j><k|.
Eigen::MatrixXcd apply_relaxation_double_sum(const Eigen::MatrixXcd& rho, const NetworkSpec& net,
                                             const CorrelationKernel& kernel,
                                             const NoiseSpec& noise);

class ReducedLiouvillian {
public:
    // Throws InputError if c_relax_up > 0 (the sector is not closed).
    ReducedLiouvillian(const NetworkSpec& net, const CorrelationKernel& kernel,
                       const NoiseSpec& noise, Frame frame = Frame::Rotating);
    ReducedLiouvillian(Eigen::MatrixXd hamiltonian, DephasingRateMatrix rates, JumpOperatorSet jumps,
                       Frame frame = Frame::Rotating, double omega_q = 0.0);

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

    int n_spins() const { return n_spins_; }
    Frame frame() const { return frame_; }
    double omega_q() const { return omega_q_; }
    const Eigen::MatrixXd& hamiltonian() const { return hamiltonian_; }
    const DephasingRateMatrix& dephasing() const { return rates_; }
    const JumpOperatorSet& jumps() const { return jumps_; }

    double frequency_scale() const { return frequency_scale_; }
    double default_dt() const;
    // Smallest jump rate above 1e-9 of the largest; 0 when there is no relaxation.
    double smallest_decay_rate() const;

private:
    void finish_setup();

    int n_spins_{0};
    Frame frame_{Frame::Rotating};
    double omega_q_{0.0};
    Eigen::MatrixXd hamiltonian_;
    DephasingRateMatrix rates_;
    JumpOperatorSet jumps_;
    Eigen::MatrixXd decay_block_; // sum_a L_a^+ L_a on the excited block
    double frequency_scale_{0.0};
};

Evolution<ReducedState> evolve_reduced(const ReducedState& rho0, const ReducedLiouvillian& liouvillian,
                                       const EvolveOptions& options, const SampleHook& hook = {});

struct StationaryRun {
    ReducedState state;
    double t{0.0};
    bool converged{false};
};

// Evolves until no element of rho changes by more than `rate_tol` per unit
// time, capped at t = 50 / smallest_decay_rate().
StationaryRun evolve_until_stationary(const ReducedState& rho0, const ReducedLiouvillian& liouvillian,
                                      double dt = 0.0, double rate_tol = 1e-9);

// Sector projection of a full state (rows/cols of |j> and |g>).
ReducedState project_to_reduced(const FullState& full);
FullState embed_in_full(const ReducedState& reduced);

Observables observe(const ReducedState& state);

} // namespace corrnoise
