#pragma once

// Shared oracles for the test suites: Kolmogorov-Smirnov statistics,
// adaptive quadrature, and grid CDFs built directly from unnormalized
// densities.  Everything here is independent of the library's sampling and
// closed-form code paths on purpose.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace zqr_test {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }
inline double norm_pdf(double x) {
    return 0.39894228040143267794 * std::exp(-0.5 * x * x);
}

// One-sample KS statistic against a CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib])
            ++ia;
        else
            ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    return d;
}

// Adaptive Simpson quadrature.
namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double m, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double m, double b,
                    double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, lm, m, fa, flm, fm);
    const double right = simpson(f, m, rm, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, lm, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           adapt(f, m, rm, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}
}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int depth = 60) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return detail::adapt(f, a, m, b, fa, fm, fb, detail::simpson(f, a, m, b, fa, fm, fb), tol,
                         depth);
}

// Piecewise-linear CDF interpolator built from a density tabulated on a
// uniform grid (trapezoid rule, normalized to 1).
class GridCdf {
public:
    GridCdf(const std::function<double(double)>& density, double lo, double hi, int cells = 40000)
        : lo_(lo), hi_(hi), step_((hi - lo) / cells) {
        cum_.resize(static_cast<std::size_t>(cells) + 1);
        cum_[0] = 0.0;
        double prev = density(lo);
        for (int i = 1; i <= cells; ++i) {
            const double x = lo + step_ * i;
            const double cur = density(x);
            cum_[static_cast<std::size_t>(i)] =
                cum_[static_cast<std::size_t>(i - 1)] + 0.5 * (prev + cur) * step_;
            prev = cur;
        }
        const double total = cum_.back();
        if (!(total > 0.0)) throw std::runtime_error("GridCdf: density integrates to zero");
        for (double& c : cum_) c /= total;
    }

    double operator()(double x) const {
        if (x <= lo_) return 0.0;
        if (x >= hi_) return 1.0;
        const double pos = (x - lo_) / step_;
        const auto idx = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(idx);
        return cum_[idx] + frac * (cum_[idx + 1] - cum_[idx]);
    }

private:
    double lo_, hi_, step_;
    std::vector<double> cum_;
};

// Sample mean and variance.
struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

inline Moments moments(const std::vector<double>& xs) {
    Moments m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(xs.size() - 1);
    return m;
}

}  // namespace zqr_test
