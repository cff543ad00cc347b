// full_engine.hpp — Exact propagation of the 2^N-dimensional density matrix
// under the correlated Bloch-Redfield master equation
//
//   rho' = i[rho, H] + sum_jk v_j v_k C_par K_jk (Z_k rho Z_j - {Z_j Z_k, rho}/2)
//                    + sum_jk nu_j nu_k C_down K_jk (S-_k rho S+_j - {S+_j S-_k, rho}/2)
//                    (+ the same with S+ <-> S- and C_up)
//
// Basis: tensor product of per-spin {|down>, |up>} with spin 1 the most
// significant factor, i.e. basis index bit (N-1-j) is set when spin j is up.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "corrnoise/dynamics.hpp"
#include "corrnoise/model.hpp"

namespace corrnoise {

inline constexpr int kDefaultFullCap = 10;

using SparseMatrixC = Eigen::SparseMatrix<std::complex<double>>;

struct FullState {
    int n_spins{0};
    Eigen::MatrixXcd rho;

    int dim() const { return static_cast<int>(rho.rows()); }

    // Product state with the listed (0-based) sites up, all others down.
    static FullState product(int n_spins, std::span<const int> up_sites);
    static FullState pure(int n_spins, const Eigen::VectorXcd& psi);
};

// Basis index of the product state with `up_sites` excited.
std::uint32_t full_basis_index(int n_spins, std::span<const int> up_sites);
// True when spin `site` is up in basis state `index`.
bool spin_up(int n_spins, std::uint32_t index, int site);
int excitation_count(std::uint32_t index);

// Sparse single-site lowering operator sigma_-^{(site)}.
SparseMatrixC sigma_minus(int n_spins, int site);
// Diagonal of sigma_z^{(site)}.
Eigen::VectorXd sigma_z_diagonal(int n_spins, int site);

// H = sum_j omega_q Z_j + sum_{j<k} (c_jk/2)(X_j X_k + Y_j Y_k). The rotating
// frame drops the omega_q term. Throws ResourceError above `cap` spins.
Eigen::MatrixXcd build_hamiltonian_full(const NetworkSpec& net, Frame frame = Frame::Lab,
                                        int cap = kDefaultFullCap);

// Literal double-sum evaluations of the two dissipators. These are the
// reference forms; FullLiouvillian uses a precomputed equivalent.
Eigen::MatrixXcd apply_dephasing_dissipator(const FullState& state, const NetworkSpec& net,
                                            const CorrelationKernel& kernel,
                                            const NoiseSpec& noise);
Eigen::MatrixXcd apply_relaxation_dissipator(const FullState& state, const NetworkSpec& net,
                                             const CorrelationKernel& kernel,
                                             const NoiseSpec& noise);

class FullLiouvillian {
public:
    FullLiouvillian(const NetworkSpec& net, const CorrelationKernel& kernel,
                    const NoiseSpec& noise, Frame frame = Frame::Rotating,
                    int cap = kDefaultFullCap);

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

    int n_spins() const { return n_spins_; }
    int dim() const { return dim_; }
    Frame frame() const { return frame_; }
    double omega_q() const { return omega_q_; }
    // Largest rate in the generator (Hamiltonian bound plus decay), used for dt.
    double frequency_scale() const { return frequency_scale_; }
    double default_dt() const;

private:
    int n_spins_;
    int dim_;
    Frame frame_;
    double omega_q_;
    double frequency_scale_{0.0};

    SparseMatrixC hamiltonian_;
    Eigen::MatrixXd dephasing_rates_; // rho' += dephasing_rates_ .* rho
    bool has_dephasing_{false};

    // Collective operators: lowering_[j] = sum_k M_jk S-_k, paired with raising_[j] = S+_j.
    std::vector<SparseMatrixC> collective_down_;
    std::vector<SparseMatrixC> raising_;
    SparseMatrixC down_anticomm_; // sum_j S+_j collective_down_[j]
    std::vector<SparseMatrixC> collective_up_;
    std::vector<SparseMatrixC> lowering_;
    SparseMatrixC up_anticomm_;
};

Evolution<FullState> evolve_full(const FullState& rho0, const FullLiouvillian& liouvillian,
                                 const EvolveOptions& options, const SampleHook& hook = {});

Observables observe(const FullState& state);

} // namespace corrnoise
