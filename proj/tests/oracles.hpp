// oracles.hpp — Test-only reference constructions, independent of the engine code:
// operators from explicit Kronecker products, the master equation as a dense
// superoperator, and exact propagation via the matrix exponential.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cd = std::complex<double>;

// Single-spin operators in the {|down>, |up>} basis.
inline MatrixXcd pauli_z() {
    MatrixXcd m(2, 2);
    m << -1, 0, 0, 1;
    return m;
}
inline MatrixXcd lowering() {
    MatrixXcd m(2, 2);
    m << 0, 1, 0, 0;
    return m;
}
inline MatrixXcd pauli_x() { return lowering() + lowering().adjoint(); }
inline MatrixXcd pauli_y() {
    MatrixXcd m(2, 2);
    m << 0, cd(0, -1), cd(0, 1), 0;
    return m;
}

// op acting on `site` of an n-spin register, spin 0 most significant.
inline MatrixXcd embed(const MatrixXcd& op, int site, int n) {
    MatrixXcd out = MatrixXcd::Identity(1, 1);
    for (int s = 0; s < n; ++s) {
        const MatrixXcd factor = (s == site) ? op : MatrixXcd::Identity(2, 2);
        out = Eigen::kroneckerProduct(out, factor).eval();
    }
    return out;
}

inline MatrixXcd hamiltonian(const MatrixXd& coupling, double omega_q, int n) {
    const int dim = 1 << n;
    MatrixXcd h = MatrixXcd::Zero(dim, dim);
    for (int j = 0; j < n; ++j) h += omega_q * embed(pauli_z(), j, n);
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            h += 0.5 * coupling(j, k) *
                 (embed(pauli_x(), j, n) * embed(pauli_x(), k, n) + embed(pauli_y(), j, n) * embed(pauli_y(), k, n));
        }
    }
    return h;
}

// Row-major vectorisation: vec(A X B) = kron(A, B^T) vec(X).
inline MatrixXcd left(const MatrixXcd& a) {
    return Eigen::kroneckerProduct(a, MatrixXcd::Identity(a.rows(), a.cols())).eval();
}
inline MatrixXcd right(const MatrixXcd& b) {
    return Eigen::kroneckerProduct(MatrixXcd::Identity(b.rows(), b.cols()), b.transpose()).eval();
}
inline MatrixXcd sandwich(const MatrixXcd& a, const MatrixXcd& b) {
    return Eigen::kroneckerProduct(a, b.transpose()).eval();
}

inline Eigen::VectorXcd vec(const MatrixXcd& m) {
    Eigen::VectorXcd v(m.size());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) v(r * m.cols() + c) = m(r, c);
    return v;
}
inline MatrixXcd unvec(const Eigen::VectorXcd& v, Eigen::Index dim) {
    MatrixXcd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = v(r * dim + c);
    return m;
}

// Dense superoperator of the full master equation built term by term from
// the double sums.
inline MatrixXcd superoperator(const MatrixXcd& h, const MatrixXd& w_dephasing, const MatrixXd& m_down,
                               const MatrixXd& m_up, int n) {
    const cd i(0, 1);
    MatrixXcd s = -i * (left(h) - right(h));
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const MatrixXcd zj = embed(pauli_z(), j, n), zk = embed(pauli_z(), k, n);
            const MatrixXcd lj = embed(lowering(), j, n), lk = embed(lowering(), k, n);
            if (w_dephasing(j, k) != 0.0) {
                s += w_dephasing(j, k) * (sandwich(zk, zj) - 0.5 * (left(zj * zk) + right(zj * zk)));
            }
            if (m_down(j, k) != 0.0) {
                const MatrixXcd p = lj.adjoint() * lk;
                s += m_down(j, k) * (sandwich(lk, lj.adjoint()) - 0.5 * (left(p) + right(p)));
            }
            if (m_up(j, k) != 0.0) {
                const MatrixXcd p = lj * lk.adjoint();
                s += m_up(j, k) * (sandwich(lk.adjoint(), lj) - 0.5 * (left(p) + right(p)));
            }
        }
    }
    return s;
}

inline MatrixXcd propagate(const MatrixXcd& super, const MatrixXcd& rho0, double t) {
    const MatrixXcd u = (super * cd(t, 0)).exp();
    return unvec(u * vec(rho0), rho0.rows());
}

// Gaussian kernel written out directly.
inline MatrixXd gaussian_kernel(const VectorXd& x, double xi) {
    const auto n = x.size();
    MatrixXd k(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) k(a, b) = std::pow(2.0, -std::pow((x(a) - x(b)) / xi, 2));
    return k;
}

// Decay rate of the (a, b) element of a superoperator acting on basis matrix
// E_ab: -Re <E_ab| S |E_ab>, valid when E_ab is an eigenvector.
inline double coherence_rate(const MatrixXcd& super, Eigen::Index a, Eigen::Index b, Eigen::Index dim) {
    const Eigen::Index idx = a * dim + b;
    return -super(idx, idx).real();
}

} // namespace oracle
