#include "corrnoise/analytics.hpp"

#include "corrnoise/errors.hpp"
#include "corrnoise/fitting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>

namespace corrnoise {

StationaryBasis stationary_subspace(const Eigen::VectorXd& nu) {
    const Eigen::Index n = nu.size();
    if (n < 1) throw InputError("stationary_subspace: empty coupling vector");
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!std::isfinite(nu(j)) || nu(j) < 0.0) throw InputError("relaxation couplings must be >= 0");
    }
    const double norm = nu.norm();
    if (!(norm > 0.0)) {
        throw InputError("all relaxation couplings vanish: the whole sector is stationary");
    }
    if (!(nu(0) > 0.0)) throw InputError("stationary_subspace: nu_1 must be > 0");

    StationaryBasis basis;
    basis.decaying = nu / norm;
    basis.states = Eigen::MatrixXd::Zero(n, n - 1);
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        basis.states(0, j) = nu(j + 1);
        basis.states(j + 1, j) = -nu(0);
    }
    // Modified Gram-Schmidt.
    basis.orthonormal = basis.states;
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            basis.orthonormal.col(j) -= basis.orthonormal.col(i).dot(basis.orthonormal.col(j)) *
                                        basis.orthonormal.col(i);
        }
        basis.orthonormal.col(j).normalize();
    }
    return basis;
}

FinalStatePrediction predict_final_state(const Eigen::VectorXd& nu) {
    const Eigen::Index n = nu.size();
    const auto basis = stationary_subspace(nu);
    const double total = nu.squaredNorm();

    FinalStatePrediction p;
    p.overlap = basis.decaying(0);
    Eigen::VectorXd stationary_part = -p.overlap * basis.decaying;
    stationary_part(0) += 1.0;

    p.rho = Eigen::MatrixXd::Zero(n + 1, n + 1);
    p.rho.topLeftCorner(n, n) = stationary_part * stationary_part.transpose();
    p.rho(n, n) = p.overlap * p.overlap;

    const double rest = total - nu(0) * nu(0);
    p.sz_first = -1.0 + 2.0 * rest * rest / (total * total);
    p.energy_above_ground = 2.0 - 2.0 * nu(0) * nu(0) / total;
    p.transferred = 2.0 * nu(0) * nu(0) * rest / (total * total);
    return p;
}

FinalStatePrediction predict_final_state(const NetworkSpec& net, const CorrelationKernel& kernel,
                                         const NoiseSpec& noise) {
    net.validate();
    if (net.has_coherent_coupling()) {
        throw ContractError("final-state prediction requires uncoupled spins");
    }
    if (kernel.size() != net.n_spins || (kernel.matrix().array() != 1.0).any()) {
        throw ContractError("final-state prediction requires a perfectly correlated (all-ones) kernel");
    }
    if (noise.c_relax_up != 0.0) {
        throw ContractError("final-state prediction requires a vacuum bath (c_relax_up = 0)");
    }
    return predict_final_state(net.relaxation_couplings);
}

double transfer_quality(const TimeSeries& series, double g, double tolerance) {
    if (!(g > 0.0)) throw InputError("transfer_quality: g must be > 0");
    const double arrival = std::numbers::pi / (2.0 * g);
    const auto idx = series.index_at(arrival, tolerance);
    const auto& sz = series.samples.at(idx).sz;
    return sz(sz.size() - 1);
}

PacketWidth packet_halfwidth(const Eigen::VectorXd& sz_profile) {
    const Eigen::Index n = sz_profile.size();
    if (n < 1) throw ExtractionError("packet_halfwidth: empty profile");
    const Eigen::VectorXd p = ((sz_profile.array() + 1.0) * 0.5).cwiseMax(0.0).matrix();
    const double peak = p.maxCoeff();
    if (!(peak > 1e-12)) throw ExtractionError("packet_halfwidth: profile carries no excitation");

    PacketWidth out;
    if (peak - p.minCoeff() <= 1e-9 * peak) {
        out.halfwidth = 0.5 * static_cast<double>(n);
        out.degenerate = true;
        return out;
    }
    const double tie = 1e-12 * peak;
    Eigen::Index first = 0;
    while (p(first) < peak - tie) ++first;
    Eigen::Index last = n - 1;
    while (p(last) < peak - tie) --last;
    const double half = 0.5 * peak;

    double left = 0.0;
    Eigen::Index l = first;
    while (l > 0 && p(l - 1) >= half) --l;
    if (l == 0) {
        out.degenerate = true;
    } else {
        left = static_cast<double>(l - 1) + (half - p(l - 1)) / (p(l) - p(l - 1));
    }
    double right = static_cast<double>(n - 1);
    Eigen::Index r = last;
    while (r < n - 1 && p(r + 1) >= half) ++r;
    if (r == n - 1) {
        out.degenerate = true;
    } else {
        right = static_cast<double>(r) + (p(r) - half) / (p(r) - p(r + 1));
    }
    out.halfwidth = 0.5 * (right - left);
    return out;
}

CriticalXi critical_xi(std::span<const std::pair<double, double>> curve) {
    if (curve.size() < 8) throw ExtractionError("critical_xi: need at least 8 sweep points");
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!(curve[i].first > 0.0)) throw ExtractionError("critical_xi: xi must be > 0");
        if (i > 0 && !(curve[i].first > curve[i - 1].first)) {
            throw ExtractionError("critical_xi: sweep must be sorted by increasing xi");
        }
    }
    const double rise = curve.back().second - curve.front().second;
    double fall = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        fall += std::max(0.0, curve[i - 1].second - curve[i].second);
    }
    if (!(rise > 0.05) || fall > 0.25 * rise) {
        throw ExtractionError("critical_xi: quality curve shows no monotone step");
    }

    const std::size_t cells = curve.size() - 1;
    std::vector<double> mid(cells), grad(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const double a = std::log(curve[i].first), b = std::log(curve[i + 1].first);
        mid[i] = 0.5 * (a + b);
        grad[i] = (curve[i + 1].second - curve[i].second) / (b - a);
    }
    const auto k = static_cast<std::size_t>(std::max_element(grad.begin(), grad.end()) - grad.begin());
    double log_xi = mid[k];
    if (k > 0 && k + 1 < cells) {
        const double v = parabola_vertex(mid[k - 1], grad[k - 1], mid[k], grad[k], mid[k + 1], grad[k + 1]);
        if (std::isfinite(v) && v >= mid[k - 1] && v <= mid[k + 1]) log_xi = v;
    }
    CriticalXi out;
    out.xi = std::exp(log_xi);
    out.cell = k;
    out.max_gradient = grad[k];
    return out;
}

double rate_oracle(std::span<const int> up_a, std::span<const int> up_b, CorrelationLimit limit,
                   double gamma) {
    const std::set<int> a(up_a.begin(), up_a.end());
    const std::set<int> b(up_b.begin(), up_b.end());
    if (a.size() != up_a.size() || b.size() != up_b.size()) {
        throw InputError("rate_oracle: duplicate site in an up-spin set");
    }
    int flipped = 0;
    for (int s : a) flipped += b.count(s) ? 0 : 1;
    for (int s : b) flipped += a.count(s) ? 0 : 1;
    const int excitation_gap = std::abs(static_cast<int>(a.size()) - static_cast<int>(b.size()));
    if (limit == CorrelationLimit::Uncorrelated) return flipped * gamma;
    return static_cast<double>(excitation_gap * excitation_gap) * gamma;
}

} // namespace corrnoise
