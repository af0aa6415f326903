#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subg/certificate.hpp"

namespace subg {

// =====================================================================
// Gaussian tail sandwich
// =====================================================================

struct TailSandwich {
    double lower;
    double upper;
};

/// Two-sided pinch on the standard normal upper tail P[Z >= x]:
///   sqrt(2/pi) e^{-x^2/2} / (x + sqrt(x^2 + 4))      <  P[Z >= x]
///   P[Z >= x] <= sqrt(2/pi) e^{-x^2/2} / (x + sqrt(x^2 + 8/pi)).
/// The upper bound is exactly 1/2 at x = 0. Requires x >= 0.
TailSandwich gaussian_tail_sandwich(double x);

// =====================================================================
// Chernoff bounds from Mgf certificates
// =====================================================================

enum class TailSide { Upper, Lower, Both };

std::string tail_side_name(TailSide side);
TailSide tail_side_from_name(const std::string& name);

/// A single evaluated bound. raw_bound can exceed 1 (or saturate to
/// +infinity in linear scale); log_raw_bound and clamped never overflow.
struct BoundReport {
    double threshold = 0.0;
    double raw_bound = 0.0;
    double log_raw_bound = 0.0;
    double clamped = 0.0;                // min(raw_bound, 1)
    std::optional<double> param_x;       // martingale assumption I knob
    std::optional<double> param_epsilon; // martingale assumption III knob
};

/// P[X >= t] <= rho exp(-t^2 / (2 sigma^2)) for Upper or Lower;
/// Both doubles the prefactor. Requires t >= 0.
BoundReport chernoff_tail(const Certificate& cert, double t, TailSide side);

// =====================================================================
// Vector martingale norm bounds
// =====================================================================

/// Which conditional assumption the per-step increments satisfy.
enum class MartingaleAssumption {
    ConditionalMgf,     // I:  E[exp(<u, phi_i>) | F_{i-1}] <= exp(sigma_i^2 |u|^2 / (2d))
    CoordinateTails,    // II: per-coordinate conditional subgaussian tails
    DirectionalTails,   // III: conditional tails along every unit direction
};

std::string assumption_name(MartingaleAssumption a);
MartingaleAssumption assumption_from_name(const std::string& name);

struct MartingaleSpec {
    int dimension = 1;                // d >= 1
    std::vector<double> step_proxies; // sigma_i^2 per step, all > 0
    MartingaleAssumption assumption = MartingaleAssumption::ConditionalMgf;
};

void validate(const MartingaleSpec& spec);

/// Total variance proxy sum_i sigma_i^2.
double total_proxy(const MartingaleSpec& spec);

/// Tail bound on the normalized norm P[|M_n| >= lambda sqrt(sum sigma_i^2)]:
///   I   : (1-x)^{-1/2} exp(-x lambda^2 / 3),    x in (0,1), default 3/4
///   II  : (d+1) exp(-lambda^2 / 3)
///   III : (1 + 2/eps)^d exp(-(1-eps)^2 lambda^2 / 3), eps in (0,1), default 1/2
/// Raw values are computed in log scale, so d up to 1e6 cannot overflow the
/// report's log_raw_bound. Requires lambda >= 0; rejects parameters that do
/// not belong to the spec's assumption.
BoundReport martingale_norm_bound(const MartingaleSpec& spec, double lambda,
                                  std::optional<double> epsilon = std::nullopt,
                                  std::optional<double> x = std::nullopt);

/// One-dimensional projection bound exp(-lambda^2 / 3), valid along any
/// fixed unit direction under each of the three assumptions.
BoundReport martingale_direction_bound(double lambda);

// =====================================================================
// Tail curves
// =====================================================================

/// Strictly increasing, non-empty, non-negative thresholds.
void validate_thresholds(const std::vector<double>& thresholds);

/// chernoff_tail evaluated on a threshold grid.
std::vector<BoundReport> tail_curve(const Certificate& cert,
                                    const std::vector<double>& thresholds,
                                    TailSide side = TailSide::Upper);

/// martingale_norm_bound evaluated on a normalized threshold grid.
std::vector<BoundReport> tail_curve(const MartingaleSpec& spec,
                                    const std::vector<double>& thresholds,
                                    std::optional<double> epsilon = std::nullopt,
                                    std::optional<double> x = std::nullopt);

} // namespace subg
