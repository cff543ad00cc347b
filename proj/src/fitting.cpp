#include "corrnoise/fitting.hpp"

#include "corrnoise/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace corrnoise {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("linear_fit: x and y differ in length");
    const auto n = static_cast<double>(x.size());
    if (x.size() < 2) throw ExtractionError("linear_fit: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ExtractionError("linear_fit: x values are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d0 = (y1 - y0) / (x1 - x0);
    const double d1 = (y2 - y1) / (x2 - x1);
    const double a = (d1 - d0) / (x2 - x0);
    if (a == 0.0) return x1;
    const double b = d0 - a * (x0 + x1);
    return -b / (2.0 * a);
}

double fit_exponential_rate(std::span<const double> t, std::span<const double> y, double floor) {
    if (t.size() != y.size()) throw InputError("fit_exponential_rate: size mismatch");
    std::vector<double> tt, ly;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (y[i] > floor) {
            tt.push_back(t[i]);
            ly.push_back(std::log(y[i]));
        }
    }
    return -linear_fit(tt, ly).slope;
}

namespace {

struct SegmentFit {
    double slope{0.0};
    double sse{0.0};
};

SegmentFit fit_segment(const std::vector<double>& t, const std::vector<double>& ly, std::size_t lo,
                       std::size_t hi) {
    const std::span<const double> ts(t.data() + lo, hi - lo + 1);
    const std::span<const double> ys(ly.data() + lo, hi - lo + 1);
    const auto line = linear_fit(ts, ys);
    SegmentFit s;
    s.slope = line.slope;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ys[i] - (line.slope * ts[i] + line.intercept);
        s.sse += r * r;
    }
    return s;
}

} // namespace

TwoRateFit fit_two_exponential(std::span<const double> t, std::span<const double> y,
                               std::size_t min_segment, double floor) {
    if (t.size() != y.size()) throw InputError("fit_two_exponential: size mismatch");
    if (min_segment < 2) min_segment = 2;
    std::vector<double> tt, ly;
    std::vector<std::size_t> origin;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (y[i] > floor) {
            tt.push_back(t[i]);
            ly.push_back(std::log(y[i]));
            origin.push_back(i);
        }
    }
    TwoRateFit best;
    if (tt.size() < 2 * min_segment - 1) return best;
    best.sse = std::numeric_limits<double>::infinity();
    for (std::size_t b = min_segment - 1; b + min_segment <= tt.size(); ++b) {
        const auto first = fit_segment(tt, ly, 0, b);
        const auto second = fit_segment(tt, ly, b, tt.size() - 1);
        const double sse = first.sse + second.sse;
        if (sse < best.sse) {
            best.sse = sse;
            best.fast_rate = -first.slope;
            best.slow_rate = -second.slope;
            best.breakpoint = origin[b];
            best.ok = true;
        }
    }
    return best;
}

} // namespace corrnoise
