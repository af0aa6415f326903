#pragma once

#include <functional>

namespace subg {

struct QuadratureOptions {
    double abs_tol = 1e-14;
    double rel_tol = 1e-12;
    int max_depth = 48;
};

/// Adaptive Gauss-Legendre integration of f over [a, b]: 15-point panels,
/// bisected until the two-half refinement agrees with the single panel
/// within tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt = {});

} // namespace subg
