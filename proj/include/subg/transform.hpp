#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subg/certificate.hpp"
#include "subg/convert.hpp"

namespace subg {

// =====================================================================
// Centering: mean-zero variable + any certificate  =>  clean Mgf form
// =====================================================================

/// Which piecewise formula produced a centering result.
enum class CenterBranch {
    PsiLow,       // ln rho3 in [0, 4/9):      sigma^2 = s3^2 (1/2 + (9/8) ln rho3)
    PsiMid,       // ln rho3 in [4/9, 16/9):   sigma^2 = s3^2 (3/2) sqrt(ln rho3)
    PsiHigh,      // ln rho3 >= 16/9:          sigma^2 = s3^2 (9/8) ln rho3
    MomentsLow,   // rho2 < 29/90:             sigma^2 = s2^2 (29/45)
    MomentsHigh,  // rho2 >= 29/90:            closed-form root, see moments_factor_high
    Tail,         // sigma^2 = s1^2 (8 + 7 ln rho1)/3
    TailFromOneSided, // one-sided input folded into the two-sided case
    MgfGeneral,   // rho4 > 1: closed-form optimization of the splitting point
    MgfBypass,    // rho4 = 1: already centered-clean, returned unchanged
};

std::string branch_name(CenterBranch branch);

struct CenteringResult {
    Certificate certificate; // always kind Mgf with log_prefactor = 0
    CenterBranch branch;
};

/// Turns any certificate on a mean-zero variable into an Mgf certificate
/// with prefactor 1. Throws MeanNotZeroError unless ctx.mean_is_zero.
CenteringResult center(const Certificate& cert, const VariableContext& ctx);

/// The raw piecewise factors sigma^2 / sigma_in^2, exposed so the branch
/// seams can be examined directly.
namespace centering {
double psi_factor_low(double log_rho3);
double psi_factor_mid(double log_rho3);
double psi_factor_high(double log_rho3);
double moments_factor_low();
double moments_factor_high(double rho2);
double tail_factor(double log_rho1);
double mgf_factor(double log_rho4); // requires log_rho4 > 0
} // namespace centering

struct CenteringRouteCandidate {
    std::optional<CertKind> via; // empty = direct centering of the input kind
    ConversionPath path;         // conversion applied before centering
    CenterBranch branch;
    double var_proxy;            // resulting centered sigma^2
};

struct BestCenteringResult {
    CenteringResult best;
    std::vector<CenteringRouteCandidate> candidates;
};

/// Minimizes the centered sigma^2 over the direct route and every
/// conversion route into another kind, lambdas tuned against the composite
/// objective. Candidates also record each single-edge route at the decile
/// lambda grid, so coarser textbook choices such as lambda = 9/10 stay
/// visible in the report.
BestCenteringResult center_via_best_route(const Certificate& cert,
                                          const VariableContext& ctx);

// =====================================================================
// Shifting: trade prefactor for variance proxy
// =====================================================================

struct ShiftParams {
    double c = 0.0;              // deterministic offset being absorbed
    std::optional<double> x;     // balance parameter > 0; empty = automatic
    std::optional<double> threshold; // tail threshold the automatic search
                                     // minimizes at; default 3 sigma
};

struct ShiftResult {
    Certificate certificate; // kind Mgf
    double x;                // balance parameter actually used
    bool x_at_bound;         // automatic search hit the (0, 64] bracket edge
};

/// Absorbs a deterministic offset c into an Mgf certificate:
///   sigma'^2 = sigma^2 (1 + x),  ln rho' = ln rho + c^2 / (2 x sigma^2).
/// c = 0 returns the input unchanged by convention. When x is absent, it is
/// chosen by golden-section search on (0, 64] to minimize the Chernoff
/// log-bound at the threshold.
ShiftResult shift(const Certificate& cert, const ShiftParams& params);

/// Centers a variable with known nonzero mean by composing a shift of the
/// best Mgf form with the mean-zero centering case.
CenteringResult recentering_equivalence(const Certificate& cert, double mean,
                                        std::optional<double> x = std::nullopt);

// =====================================================================
// Closures
// =====================================================================

/// Sum with arbitrary dependence (Mgf inputs):
///   sigma = sum sigma_i, ln rho = (sum sigma_i ln rho_i) / sum sigma_i.
Certificate sum_dependent(const std::vector<Certificate>& certs);

/// Independent sum (Mgf inputs): sigma^2 = sum sigma_i^2, rho = prod rho_i.
Certificate sum_independent(const std::vector<Certificate>& certs);

/// Pointwise maximum (Mgf inputs): sigma^2 = max sigma_i^2, rho = sum rho_i.
Certificate max_of(const std::vector<Certificate>& certs);

enum class PsiCombineMode {
    SumAbs,         // sum |X_i|: sigma = sum sigma_i, sigma-weighted ln rho
    SqrtSumSq,      // sqrt(sum X_i^2): sigma^2 = sum sigma_i^2, sigma^2-weighted ln rho
    IndependentSum, // independent sum X_i: sigma^2 = sum sigma_i^2, rho = prod rho_i
};

std::string psi_combine_mode_name(PsiCombineMode mode);
PsiCombineMode psi_combine_mode_from_name(const std::string& name);

/// Closure rules for PsiBound certificates.
Certificate psi_combine(const std::vector<Certificate>& certs, PsiCombineMode mode);

} // namespace subg
