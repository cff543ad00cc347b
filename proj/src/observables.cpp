#include "corrnoise/observables.hpp"

#include "corrnoise/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace corrnoise {

double purity(const Eigen::MatrixXcd& rho) { return rho.cwiseAbs2().sum(); }

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& a) {
    const Eigen::MatrixXcd herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
    if (solver.info() != Eigen::Success) throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().adjoint();
}

double min_eigenvalue(const Eigen::MatrixXcd& rho) {
    const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw InputError("fidelity: dimension mismatch");
    }
    const Eigen::MatrixXcd root = psd_sqrt(rho);
    const Eigen::MatrixXcd inner = root * sigma * root;
    const Eigen::MatrixXcd herm = 0.5 * (inner + inner.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    const double tr = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return tr * tr;
}

double fidelity_pure(const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& psi) {
    if (psi.size() != rho.rows()) throw InputError("fidelity_pure: dimension mismatch");
    const Eigen::VectorXcd u = psi / psi.norm();
    return (u.adjoint() * rho * u)(0, 0).real();
}

Eigen::VectorXcd end_pair_state(int n_spins, EndPairSign sign) {
    if (n_spins < 2) throw InputError("end-pair state needs at least two spins");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n_spins + 1);
    psi(0) = std::numbers::sqrt2 / 2.0;
    psi(n_spins - 1) = (sign == EndPairSign::Plus ? 1.0 : -1.0) * std::numbers::sqrt2 / 2.0;
    return psi;
}

Eigen::MatrixXcd end_pair_ground_mixture(int n_spins, EndPairSign sign) {
    const Eigen::VectorXcd psi = end_pair_state(n_spins, sign);
    Eigen::MatrixXcd rho = 0.5 * psi * psi.adjoint();
    rho(n_spins, n_spins) += 0.5;
    return rho;
}

double lab_frame_sx(std::complex<double> rotating_lowering, double t, double omega_q) {
    // rho_{j,g} picks up exp(-i 2 omega_q t) between the frames.
    const std::complex<double> phase = std::polar(1.0, -2.0 * omega_q * t);
    return 2.0 * (rotating_lowering * phase).real();
}

} // namespace corrnoise
