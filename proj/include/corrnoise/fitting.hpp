// fitting.hpp — Small least-squares helpers used by the analytics and experiments

#pragma once

#include <cstddef>
#include <span>

namespace corrnoise {

struct LinearFit {
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
};

// Ordinary least squares y = slope * x + intercept. Needs >= 2 distinct x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Abscissa of the vertex of the parabola through three points.
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2);

// Decay rate from a log-space fit of y(t) = A exp(-rate t). Values <= floor are skipped.
double fit_exponential_rate(std::span<const double> t, std::span<const double> y,
                            double floor = 1e-300);

struct TwoRateFit {
    double fast_rate{0.0};
    double slow_rate{0.0};
    std::size_t breakpoint{0}; // index of the sample shared by both segments
    double sse{0.0};
    bool ok{false};
};

// Two-segment fit of log y against t, scanning every admissible breakpoint and
// keeping the one with the smallest total squared error. Each segment needs
// at least `min_segment` samples. Samples with y <= floor are dropped.
TwoRateFit fit_two_exponential(std::span<const double> t, std::span<const double> y,
                               std::size_t min_segment = 3, double floor = 1e-12);

} // namespace corrnoise
