// model.hpp — Spin network, noise environment and spatial correlation kernel

#pragma once

#include <Eigen/Dense>

#include <limits>

namespace corrnoise {

// Static description of a spin network. Energies use hbar = 1, distances are in
// units of the nearest-neighbour spacing d.
struct NetworkSpec {
    int n_spins{0};
    double omega_q{100.0};                // coefficient of sigma_z on each spin
    Eigen::MatrixXd coupling;             // symmetric XY coupling, zero diagonal
    Eigen::VectorXd positions;            // site coordinates, units of d
    Eigen::VectorXd dephasing_couplings;  // v_j >= 0
    Eigen::VectorXd relaxation_couplings; // nu_j >= 0

    // Perfect-state-transfer chain: couplings g*sqrt(j(N-j)), x_j = j-1.
    static NetworkSpec chain(int n, double g = 1.0, double omega_q = 100.0,
                             double v = 0.0, double nu = 0.0);
    // Spins with no coherent coupling at all (relaxation-blocking setup).
    static NetworkSpec uncoupled(int n, double omega_q = 100.0,
                                 double v = 0.0, double nu = 0.0);

    // Throws InputError when any invariant is violated.
    void validate() const;

    bool has_coherent_coupling() const { return coupling.cwiseAbs().maxCoeff() > 0.0; }
};

struct NoiseSpec {
    double xi{0.0};           // correlation length, units of d; +inf = all-ones kernel
    double c_dephasing{0.0};  // zero-frequency longitudinal spectral amplitude
    double c_relax_down{0.0}; // transversal amplitude at the level splitting
    double c_relax_up{0.0};   // amplitude at negative frequency (vacuum: 0)

    void validate() const;
};

// Normalised spatial correlation matrix K_jk = C(|x_j - x_k|) / C(0).
class CorrelationKernel {
public:
    CorrelationKernel() = default;
    explicit CorrelationKernel(Eigen::MatrixXd k);

    const Eigen::MatrixXd& matrix() const { return k_; }
    int size() const { return static_cast<int>(k_.rows()); }
    double operator()(int j, int k) const { return k_(j, k); }

    static CorrelationKernel identity(int n);
    static CorrelationKernel all_ones(int n);

private:
    Eigen::MatrixXd k_;
};

inline constexpr double kPerfectCorrelation = std::numeric_limits<double>::infinity();

// Gaussian kernel 2^{-((x_j - x_k)/xi)^2}. xi == 0 is the exact identity and
// xi == +inf the exact all-ones matrix. Entries below 1e-15 are flushed to 0.
CorrelationKernel build_kernel(const Eigen::VectorXd& positions, double xi);

// Tridiagonal coupling matrix with (j, j+1) = g*sqrt(j(N-j)), 1-indexed j.
Eigen::MatrixXd chain_coupling_profile(int n_spins, double g);

// Default site positions 0, 1, ..., N-1.
Eigen::VectorXd default_positions(int n_spins);

} // namespace corrnoise
