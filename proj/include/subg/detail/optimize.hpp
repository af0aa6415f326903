#pragma once

#include <cmath>
#include <functional>
#include <limits>

namespace subg::detail {

/// Golden-section minimization on [lo, hi]. Assumes the objective is
/// unimodal there (possibly with an infeasible +infinity region on one
/// side); returns the argmin to within tol.
inline double golden_minimize(const std::function<double(double)>& f,
                              double lo, double hi, double tol = 1e-9) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

struct GridGoldenResult {
    double arg;
    double value;
};

/// Seeds with the best of an n-point uniform grid on [lo, hi], then refines
/// with golden-section between the neighbors of the winning grid point.
inline GridGoldenResult grid_then_golden(const std::function<double(double)>& f,
                                         double lo, double hi, int n_grid,
                                         double tol = 1e-9) {
    double best_x = lo;
    double best_f = std::numeric_limits<double>::infinity();
    const double step = (hi - lo) / (n_grid - 1);
    for (int i = 0; i < n_grid; ++i) {
        const double x = (i == n_grid - 1) ? hi : lo + step * i;
        const double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    const double a = std::max(lo, best_x - step);
    const double b = std::min(hi, best_x + step);
    const double refined = golden_minimize(f, a, b, tol);
    const double fr = f(refined);
    if (fr < best_f) return {refined, fr};
    return {best_x, best_f};
}

} // namespace subg::detail
