#include "subg/quadrature.hpp"

#include <cmath>

#include "subg/errors.hpp"

namespace subg {

namespace {

// 15-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr int kOrder = 15;
constexpr double kNodes[kOrder] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854,
};
constexpr double kWeights[kOrder] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173,
};

double panel(const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (int i = 0; i < kOrder; ++i) {
        acc += kWeights[i] * f(mid + half * kNodes[i]);
    }
    return half * acc;
}

double refine(const std::function<double(double)>& f, double a, double b,
              double whole, double abs_tol, double rel_tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = panel(f, a, mid);
    const double right = panel(f, mid, b);
    const double split = left + right;
    const double err = std::abs(split - whole);
    if (depth <= 0 || err <= abs_tol + rel_tol * std::abs(split)) {
        return split;
    }
    return refine(f, a, mid, left, 0.5 * abs_tol, rel_tol, depth - 1) +
           refine(f, mid, b, right, 0.5 * abs_tol, rel_tol, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt) {
    if (std::isnan(a) || std::isnan(b)) {
        throw NonFiniteError("integrate: bounds must not be NaN");
    }
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, opt);
    return refine(f, a, b, panel(f, a, b), opt.abs_tol, opt.rel_tol, opt.max_depth);
}

} // namespace subg
