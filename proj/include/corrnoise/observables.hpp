// observables.hpp — Scalar observables on density matrices

#pragma once

#include <Eigen/Dense>

namespace corrnoise {

// Tr(rho^2) for Hermitian rho.
double purity(const Eigen::MatrixXcd& rho);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. Equals <psi|rho|psi>
// when sigma = |psi><psi|.
double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);
double fidelity_pure(const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& psi);

// Hermitian PSD square root via eigendecomposition (negative eigenvalues clamped).
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& a);
double min_eigenvalue(const Eigen::MatrixXcd& rho);

enum class EndPairSign { Plus, Minus };

// (|1> +/- |N>)/sqrt(2) in the reduced basis {|1>, ..., |N>, |g>}.
Eigen::VectorXcd end_pair_state(int n_spins, EndPairSign sign);

// Half-half mixture of the end-pair state and the ground state, reduced basis.
Eigen::MatrixXcd end_pair_ground_mixture(int n_spins, EndPairSign sign);

// Lab-frame <sigma_x^{(j)}> at time t from a rotating-frame <sigma_-^{(j)}>.
double lab_frame_sx(std::complex<double> rotating_lowering, double t, double omega_q);

} // namespace corrnoise
