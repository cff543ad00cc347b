// analytics.hpp — Closed-form results for correlated relaxation and dephasing,
// plus the scalar figures of merit extracted from simulated time series.

#pragma once

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

#include "corrnoise/dynamics.hpp"
#include "corrnoise/model.hpp"

namespace corrnoise {

// Relaxation-free states |s_j> = nu_{j+1}|1> - nu_1|j+1> (columns of `states`,
// unnormalised) and the single decaying state |d> ~ sum_j nu_j |j>, all in the
// single-excitation basis (length N).
struct StationaryBasis {
    Eigen::MatrixXd states;      // N x (N-1)
    Eigen::MatrixXd orthonormal; // Gram-Schmidt of `states`, N x (N-1)
    Eigen::VectorXd decaying;    // unit vector
};

// Requires at least one positive coupling and nu_1 > 0 (otherwise the s_j
// family is degenerate). Throws InputError otherwise.
StationaryBasis stationary_subspace(const Eigen::VectorXd& relaxation_couplings);

// Long-time state of an initially excited first spin for uncoupled spins in a
// perfectly correlated vacuum bath.
struct FinalStatePrediction {
    Eigen::MatrixXd rho;        // (N+1) x (N+1), reduced basis
    double overlap{0.0};        // <d|1>
    double sz_first{0.0};       // <sigma_z^{(1)}>(inf)
    double energy_above_ground{0.0}; // <S_z>(inf) + N
    double transferred{0.0};    // sum_{j>=2} (<sigma_z^{(j)}>(inf) + 1)
};

FinalStatePrediction predict_final_state(const Eigen::VectorXd& relaxation_couplings);

// Same, but checks the regime first: zero coherent coupling, all-ones kernel,
// no upward rate. Throws ContractError outside that regime.
FinalStatePrediction predict_final_state(const NetworkSpec& net, const CorrelationKernel& kernel,
                                         const NoiseSpec& noise);

struct TransferReport {
    double quality{0.0};
    double packet_halfwidth{0.0};
    double xi{0.0};
};

// <sigma_z^{(N)}> at t = pi/(2g). `tolerance` is the allowed distance to the
// nearest sample (use dt/2).
double transfer_quality(const TimeSeries& series, double g, double tolerance);

struct PacketWidth {
    double halfwidth{0.0};
    bool degenerate{false}; // flat profile or no half-maximum crossing inside the chain
};

// Half width at half maximum of p_j = (<sigma_z^{(j)}> + 1)/2 over site index,
// with linear interpolation between sites. Throws ExtractionError when the
// profile carries no excitation.
PacketWidth packet_halfwidth(const Eigen::VectorXd& sz_profile);

struct CriticalXi {
    double xi{0.0};
    std::size_t cell{0}; // sweep interval [xi_cell, xi_cell+1] containing the steepest rise
    double max_gradient{0.0};
};

// Position of the steepest rise of quality against log(xi), refined by a
// three-point parabola through the finite-difference gradients. Needs >= 8
// points with xi > 0, sorted ascending.
CriticalXi critical_xi(std::span<const std::pair<double, double>> curve);

enum class CorrelationLimit { Uncorrelated, Perfect };

// Predicted dephasing rate of |a><b| for product states given by their
// up-spin sets: n_f * gamma (uncorrelated) or n_e^2 * gamma (perfect).
double rate_oracle(std::span<const int> up_a, std::span<const int> up_b, CorrelationLimit limit,
                   double gamma);

} // namespace corrnoise
