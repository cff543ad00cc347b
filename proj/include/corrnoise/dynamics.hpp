// dynamics.hpp — Time-series containers and the fixed-step RK4 propagator
// shared by the full and reduced engines.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "corrnoise/errors.hpp"

namespace corrnoise {

// Default step: dt * (generator bound) = 0.1, which is also below (2pi/40)/bound.
inline constexpr double kStepTimesScale = 0.1;

enum class Frame { Lab, Rotating };

// Per-sample observables. abs_sx is the envelope 2|<sigma_-^{(j)}>|, which is
// the same in the lab and rotating frames.
struct Observables {
    Eigen::VectorXd sz;
    Eigen::VectorXd abs_sx;
    double purity{1.0};
};

struct TimeSeries {
    Frame frame{Frame::Rotating};
    double omega_q{0.0};
    std::vector<double> t;
    std::vector<Observables> samples;

    std::size_t size() const { return t.size(); }
    // Index of the sample closest to `time`; throws SamplingGridError if the
    // closest one is further away than `tolerance`.
    std::size_t index_at(double time, double tolerance) const;
};

template <class State>
struct Evolution {
    TimeSeries series;
    State final_state;
    double dt{0.0}; // step actually used (t_final / steps)
};

struct EvolveOptions {
    double t_final{0.0};
    double dt{0.0};       // <= 0 selects the engine's default step
    int sample_every{1};  // steps between samples; t = 0 and t_final always sampled
};

using SampleHook = std::function<void(double t, const Eigen::MatrixXcd& rho)>;

namespace detail {

// Cheap density-matrix sanity check used at every sample point. Besides trace
// and Hermiticity (which RK4 preserves even when unstable) it checks the
// 2x2 principal minors, which catch blow-up.
void check_density_matrix(const Eigen::MatrixXcd& rho, double t);

struct StepPlan {
    long steps{0};
    double dt{0.0};
};

StepPlan plan_steps(double t_final, double dt);

// Classic RK4 on rho' = f(rho), sampling through `sample`.
template <class Rhs, class Sample>
Eigen::MatrixXcd integrate_rk4(Eigen::MatrixXcd rho, const Rhs& f, const StepPlan& plan,
                               int sample_every, const Sample& sample) {
    if (sample_every < 1) throw InputError("sample_every must be >= 1");
    Eigen::MatrixXcd k1, k2, k3, k4, tmp;
    const double h = plan.dt;
    sample(0.0, rho);
    for (long step = 1; step <= plan.steps; ++step) {
        k1 = f(rho);
        tmp = rho + (0.5 * h) * k1;
        k2 = f(tmp);
        tmp = rho + (0.5 * h) * k2;
        k3 = f(tmp);
        tmp = rho + h * k3;
        k4 = f(tmp);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (step % sample_every == 0 || step == plan.steps) {
            sample(static_cast<double>(step) * h, rho);
        }
    }
    return rho;
}

} // namespace detail
} // namespace corrnoise
