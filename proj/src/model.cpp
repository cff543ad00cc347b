#include "corrnoise/model.hpp"

#include "corrnoise/errors.hpp"

#include <cmath>
#include <string>

namespace corrnoise {

namespace {

constexpr double kFlushBelow = 1e-15;

void require_nonnegative(const Eigen::VectorXd& values, const char* name) {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values(i)) || values(i) < 0.0) {
            throw InputError(std::string(name) + " must be finite and >= 0");
        }
    }
}

} // namespace

NetworkSpec NetworkSpec::chain(int n, double g, double omega_q, double v, double nu) {
    NetworkSpec net;
    net.n_spins = n;
    net.omega_q = omega_q;
    net.coupling = chain_coupling_profile(n, g);
    net.positions = default_positions(n);
    net.dephasing_couplings = Eigen::VectorXd::Constant(n, v);
    net.relaxation_couplings = Eigen::VectorXd::Constant(n, nu);
    return net;
}

NetworkSpec NetworkSpec::uncoupled(int n, double omega_q, double v, double nu) {
    if (n < 1) throw InputError("uncoupled network needs at least one spin");
    NetworkSpec net;
    net.n_spins = n;
    net.omega_q = omega_q;
    net.coupling = Eigen::MatrixXd::Zero(n, n);
    net.positions = default_positions(n);
    net.dephasing_couplings = Eigen::VectorXd::Constant(n, v);
    net.relaxation_couplings = Eigen::VectorXd::Constant(n, nu);
    return net;
}

void NetworkSpec::validate() const {
    if (n_spins < 1) throw InputError("network needs at least one spin");
    if (!std::isfinite(omega_q) || omega_q <= 0.0) throw InputError("omega_q must be > 0");
    const Eigen::Index n = n_spins;
    if (coupling.rows() != n || coupling.cols() != n)
        throw InputError("coupling matrix must be N x N");
    if (positions.size() != n || dephasing_couplings.size() != n ||
        relaxation_couplings.size() != n)
        throw InputError("positions and bath couplings must have length N");
    for (Eigen::Index j = 0; j < n; ++j) {
        if (coupling(j, j) != 0.0) throw InputError("coupling matrix must have zero diagonal");
        if (!std::isfinite(positions(j))) throw InputError("positions must be finite");
        for (Eigen::Index k = j + 1; k < n; ++k) {
            if (!std::isfinite(coupling(j, k)) || coupling(j, k) != coupling(k, j))
                throw InputError("coupling matrix must be finite and symmetric");
        }
    }
    // Chain topology (only nearest-neighbour entries): sites must be ordered.
    bool chain_only = n > 1;
    for (Eigen::Index j = 0; j < n && chain_only; ++j) {
        for (Eigen::Index k = j + 2; k < n; ++k) {
            if (coupling(j, k) != 0.0) {
                chain_only = false;
                break;
            }
        }
    }
    if (chain_only && has_coherent_coupling()) {
        for (Eigen::Index j = 0; j + 1 < n; ++j) {
            if (!(positions(j + 1) > positions(j)))
                throw InputError("chain positions must be strictly increasing");
        }
    }
    require_nonnegative(dephasing_couplings, "dephasing_couplings");
    require_nonnegative(relaxation_couplings, "relaxation_couplings");
}

void NoiseSpec::validate() const {
    if (std::isnan(xi) || xi < 0.0) throw InputError("xi must be >= 0");
    for (double c : {c_dephasing, c_relax_down, c_relax_up}) {
        if (!std::isfinite(c) || c < 0.0) throw InputError("spectral amplitudes must be >= 0");
    }
}

CorrelationKernel::CorrelationKernel(Eigen::MatrixXd k) : k_(std::move(k)) {
    if (k_.rows() != k_.cols()) throw InputError("kernel must be square");
}

CorrelationKernel CorrelationKernel::identity(int n) {
    return CorrelationKernel(Eigen::MatrixXd::Identity(n, n));
}

CorrelationKernel CorrelationKernel::all_ones(int n) {
    return CorrelationKernel(Eigen::MatrixXd::Ones(n, n));
}

CorrelationKernel build_kernel(const Eigen::VectorXd& positions, double xi) {
    const Eigen::Index n = positions.size();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!std::isfinite(positions(j))) throw InputError("kernel positions must be finite");
    }
    if (std::isnan(xi) || xi < 0.0) throw InputError("correlation length must be >= 0");
    if (xi == 0.0) return CorrelationKernel::identity(static_cast<int>(n));
    if (std::isinf(xi)) return CorrelationKernel::all_ones(static_cast<int>(n));

    Eigen::MatrixXd k(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        k(j, j) = 1.0;
        for (Eigen::Index l = j + 1; l < n; ++l) {
            const double r = (positions(j) - positions(l)) / xi;
            double value = std::exp2(-r * r);
            if (value < kFlushBelow) value = 0.0;
            k(j, l) = value;
            k(l, j) = value;
        }
    }
    return CorrelationKernel(std::move(k));
}

Eigen::MatrixXd chain_coupling_profile(int n_spins, double g) {
    if (n_spins < 2) throw InputError("a chain needs at least two spins");
    if (!std::isfinite(g) || g <= 0.0) throw InputError("chain coupling g must be > 0");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_spins, n_spins);
    for (int j = 1; j < n_spins; ++j) {
        const double gj = g * std::sqrt(static_cast<double>(j) * (n_spins - j));
        c(j - 1, j) = gj;
        c(j, j - 1) = gj;
    }
    return c;
}

Eigen::VectorXd default_positions(int n_spins) {
    return Eigen::VectorXd::LinSpaced(n_spins, 0.0, static_cast<double>(n_spins - 1));
}

} // namespace corrnoise
