#include "corrnoise/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace corrnoise {

namespace {
constexpr double kTraceTol = 1e-8;
constexpr double kHermTol = 1e-8;
constexpr double kMinorTol = 1e-6;
} // namespace

std::size_t TimeSeries::index_at(double time, double tolerance) const {
    if (t.empty()) throw SamplingGridError("time series is empty");
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double gap = std::abs(t[i] - time);
        if (gap < best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    if (best_gap > tolerance) {
        std::ostringstream msg;
        msg << "no sample within " << tolerance << " of t = " << time
            << " (closest at " << t[best] << ")";
        throw SamplingGridError(msg.str());
    }
    return best;
}

namespace detail {

void check_density_matrix(const Eigen::MatrixXcd& rho, double t) {
    auto fail = [t](const std::string& what) {
        std::ostringstream msg;
        msg << "integration diverged at t = " << t << ": " << what
            << "; reduce dt";
        throw IntegrationDiverged(msg.str());
    };
    if (!rho.allFinite()) fail("non-finite density matrix");
    const auto tr = rho.trace();
    if (std::abs(tr - std::complex<double>(1.0, 0.0)) > kTraceTol) fail("trace drifted from 1");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kHermTol) fail("lost Hermiticity");
    const Eigen::Index n = rho.rows();
    for (Eigen::Index a = 0; a < n; ++a) {
        const double paa = rho(a, a).real();
        if (paa < -kMinorTol) fail("negative population");
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const double pbb = rho(b, b).real();
            if (std::norm(rho(a, b)) > paa * pbb + kMinorTol) fail("coherence exceeds populations");
        }
    }
}

StepPlan plan_steps(double t_final, double dt) {
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw InputError("t_final must be >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt must be > 0");
    StepPlan plan;
    if (t_final == 0.0) {
        plan.steps = 0;
        plan.dt = dt;
        return plan;
    }
    plan.steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
    if (plan.steps < 1) plan.steps = 1;
    plan.dt = t_final / static_cast<double>(plan.steps);
    return plan;
}

} // namespace detail
} // namespace corrnoise
