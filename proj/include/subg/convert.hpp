#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subg/certificate.hpp"

namespace subg {

// =====================================================================
// Conversion edges
// =====================================================================
//
// Every tabulated conversion maps a hypothesis certificate (sigma, rho) of
// kind `from` to a conclusion certificate (C * sigma, phi(rho)) of kind
// `to`.  C depends only on the free parameter lambda (when the entry has
// one); phi is monotone nondecreasing in rho for fixed lambda.  phi is
// evaluated in log scale throughout.

/// Scale factor C^2 applied to the variance proxy.
enum class CFactor {
    One,          // C^2 = 1
    Two,          // C^2 = 2
    Half,         // C^2 = 1/2
    InvLambda,    // C^2 = 1/lambda
    InvTwoLambda, // C^2 = 1/(2 lambda)
    TwoInvLambda, // C^2 = 2/lambda
};

/// Prefactor map phi.
enum class PhiForm {
    Identity,          // rho
    Double,            // 2 rho
    Expm1,             // rho - 1
    GeomSplus,         // 1 + lambda rho / (1 - lambda)
    PowOneMinus,       // rho^lambda / (1 - lambda)
    DoublePowOneMinus, // (2 rho)^lambda / (1 - lambda)
    MinMgfPsi,         // min{rho sqrt(1-lambda), (2 rho)^lambda} / (1 - lambda)
    MinMgfPsiSigned,   // min{rho / sqrt(1-lambda), rho^lambda / (1 - lambda)}
};

struct ConversionEdge {
    CertKind to;    // conclusion kind
    CertKind from;  // hypothesis kind
    bool dagger;    // carries a direct proof; non-dagger entries are
                    // compositions of dagger edges
    bool has_lambda;
    CFactor c;
    PhiForm phi;
};

/// C^2 for an edge factor. lambda is ignored by the constant factors.
double c_factor_sq(CFactor c, double lambda);

/// ln phi(rho) computed from ln rho. Stable for extreme prefactors,
/// including ln rho = -infinity (degenerate even-moment certificates).
double log_phi(PhiForm phi, double log_rho, double lambda);

std::string c_factor_text(CFactor c);
std::string phi_form_text(PhiForm phi);

/// All tabulated edges for a sign regime. Unconstrained has 20 entries over
/// the five kinds; OneSigned has 12 over kinds 1..4 (the one-sided tail kind
/// merges with the two-sided one).
const std::vector<ConversionEdge>& conversion_table(SignConstraint regime);

/// Throws NoSuchEdgeError when the (from, to, regime) triple is not
/// tabulated (diagonal entries never are).
const ConversionEdge& find_edge(CertKind from, CertKind to, SignConstraint regime);

// =====================================================================
// Single conversions
// =====================================================================

/// Applies the tabulated edge cert.kind -> target. lambda must be supplied
/// exactly when the edge is parameterized, and must lie in the open (0, 1).
Certificate direct_convert(const Certificate& cert, CertKind target,
                           SignConstraint regime,
                           std::optional<double> lambda = std::nullopt);

/// Validates and returns the certificate unchanged.
Certificate convert_identity(const Certificate& cert);

/// Even-moment bound implied by a two-sided tail certificate:
///   E[X^(2k)] <= f_k(rho) 2^k sigma^(2k) k!,  f_k(rho) = sum_{i<=k} (ln rho)^i / i!.
/// Returns +infinity for k > 170 or when the bound exceeds the double range.
double moment_bound_from_tail(const Certificate& tail, int k);

// =====================================================================
// Routed conversions
// =====================================================================

struct PathStep {
    CertKind from;
    CertKind to;

    bool operator==(const PathStep&) const = default;
};

/// A conversion route: the edge sequence, the chosen lambda for each
/// parameterized edge (in step order), and the accumulated C^2.
struct ConversionPath {
    std::vector<PathStep> steps;  // empty = identity
    std::vector<double> lambdas;
    double c_sq_total = 1.0;
    bool at_lambda_bound = false; // an optimized lambda hit the search clamp

    std::string text() const;    // e.g. "(4)<-(3)<-(1)" or "identity"
};

/// Re-applies a path to a certificate using the lambdas stored in it.
Certificate apply_path(const Certificate& cert, const ConversionPath& path,
                       SignConstraint regime);

/// What "best" means when routing between kinds.
struct Objective {
    enum class Type { MinVarProxy, MinPrefactor, MinTailAt };

    Type type = Type::MinVarProxy;
    std::optional<double> cap; // MinPrefactor: feasibility cap on var_proxy
    double threshold = 0.0;    // MinTailAt: deviation threshold t

    static Objective min_var_proxy();
    static Objective min_prefactor(std::optional<double> cap = std::nullopt);
    static Objective min_tail_at(double t);

    /// (primary, secondary) score, lower is better lexicographically.
    std::pair<double, double> score(double var_proxy, double log_prefactor) const;
};

/// Lexicographic score used by the path optimizer; lower is better.
using PathScore = std::function<std::pair<double, double>(double var_proxy,
                                                          double log_prefactor)>;

struct ScoredPath {
    ConversionPath path;
    Certificate certificate;
    std::pair<double, double> score;
};

/// Optimizes every simple route cert.kind -> target (identity included when
/// the kinds coincide) against an arbitrary score. Lambdas are tuned by
/// coordinate descent over a grid-seeded golden-section search, clamped to
/// [1e-9, 1 - 1e-9].
std::vector<ScoredPath> optimize_conversion_paths(const Certificate& cert,
                                                  CertKind target,
                                                  SignConstraint regime,
                                                  const PathScore& score);

struct BestConversion {
    Certificate certificate;
    ConversionPath path;
};

/// Best route under an Objective. Multi-hop routes can strictly beat every
/// direct edge, e.g. TwoSidedTail -> Mgf via PsiBound under MinVarProxy.
BestConversion best_convert(const Certificate& cert, CertKind target,
                            SignConstraint regime, const Objective& objective);

// =====================================================================
// Table self-consistency
// =====================================================================

struct TableSample {
    double lambda; // in (0, 1)
    double rho;    // >= 1 so the sample is admissible for every kind
};

struct TableEntryCheck {
    CertKind to;
    CertKind from;
    bool dagger;
    bool pass;           // dagger entries pass by construction
    std::string witness; // composition of dagger edges reproducing the entry
    double max_rel_err;  // worst relative error over the samples
};

struct TableConsistencyReport {
    SignConstraint regime;
    std::vector<TableEntryCheck> entries;
    bool all_pass = false;
};

/// Checks that every non-dagger entry is reproduced exactly by some
/// composition of dagger edges at all supplied samples.
TableConsistencyReport table_consistency_report(SignConstraint regime,
                                                const std::vector<TableSample>& samples);

/// 25-point default sample set: lambda and rho grids crossed.
std::vector<TableSample> default_table_samples();

} // namespace subg
