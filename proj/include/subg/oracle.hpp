#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "subg/certificate.hpp"
#include "subg/deviation.hpp"

namespace subg {

// =====================================================================
// Reference distributions
// =====================================================================

struct GaussianModel {
    double mean = 0.0;
    double sd = 1.0;
};

struct RademacherModel {
    double scale = 1.0; // takes values +/- scale with probability 1/2
};

struct UniformModel {
    double a = -1.0;
    double b = 1.0;
};

/// scale * (B - p) for B ~ Bernoulli(p): value scale (1-p) with probability
/// p, value -scale p otherwise. Mean zero by construction.
struct CenteredBernoulliModel {
    double p = 0.5;
    double scale = 1.0;
};

struct DistributionModel {
    std::variant<GaussianModel, RademacherModel, UniformModel, CenteredBernoulliModel>
        family;
};

void validate(const DistributionModel& model);
std::string family_name(const DistributionModel& model);
double model_mean(const DistributionModel& model);

/// E[exp(t X)], exact per family (the uniform case is evaluated in its
/// removable-singularity-stable form).
double analytic_mgf(const DistributionModel& model, double t);

struct PsiValue {
    double value = 0.0; // meaningful only when !diverges
    bool diverges = false;
};

/// E[exp(X^2 / var_proxy)]. Diverges for a Gaussian when var_proxy <= 2 sd^2;
/// the uniform case integrates by adaptive quadrature, the discrete cases are
/// exact point sums.
PsiValue analytic_psi(const DistributionModel& model, double var_proxy);

/// E[X^(2k)], exact per family; k = 0 gives 1.
double even_moment(const DistributionModel& model, int k);

/// Exact P[X >= u], P[X <= -u], P[|X| >= u], and the one-sided maximum.
double upper_tail(const DistributionModel& model, double u);
double lower_tail(const DistributionModel& model, double u);
double two_sided_tail(const DistributionModel& model, double u);
double one_sided_max_tail(const DistributionModel& model, double u);

/// Gamma(k+1, a) for integer first argument:
///   Gamma(k+1, a) = k! e^{-a} sum_{i<=k} a^i / i!.
/// Returns +infinity for k > 170 or when the value exceeds the double range.
double upper_incomplete_gamma_int(int k_plus_1, double a);

// =====================================================================
// Sampling
// =====================================================================

/// Draw i of a deterministic stream; pure in (model, seed, i).
double sample_one(const DistributionModel& model, std::uint64_t seed, std::int64_t i);

/// n draws; identical to calling sample_one for i = 0..n-1.
std::vector<double> draw_samples(const DistributionModel& model, std::uint64_t seed,
                                 std::int64_t n);

// =====================================================================
// Certificate verification
// =====================================================================

struct VerificationBudget {
    int probes = 33;
    std::int64_t mc_samples = 100000;
    std::uint64_t seed = 0;
};

enum class ProbeMethod { ClosedForm, Quadrature, MonteCarlo };

std::string probe_method_name(ProbeMethod method);

struct ProbeCheck {
    double probe = 0.0;    // lambda (normalized) or moment order, per kind
    double bound = 0.0;    // certificate's claim at the probe
    double observed = 0.0; // oracle value (analytic or empirical)
    double slack_std_errors = 0.0; // (bound - observed)/SE for Monte Carlo probes
    bool violation = false;
    ProbeMethod method = ProbeMethod::ClosedForm;
};

struct VerificationReport {
    Certificate certificate{CertKind::Mgf, 1.0, 0.0};
    int violations = 0;
    std::vector<ProbeCheck> checks;
};

/// Checks a certificate against the exact law of a reference model. Mgf and
/// moment kinds probe closed forms; the psi kind evaluates one integral; the
/// tail kinds probe analytic tails and a Monte Carlo sample (violation only
/// beyond four standard errors). presorted, when given, must be
/// draw_samples(model, budget.seed, budget.mc_samples) sorted ascending; it
/// lets callers reuse one sample across many verifications.
VerificationReport verify_certificate(const DistributionModel& model,
                                      const Certificate& cert,
                                      const VerificationBudget& budget,
                                      const std::vector<double>* presorted = nullptr);

// =====================================================================
// Martingale simulation
// =====================================================================

enum class IncrementGenerator {
    RademacherCoords, // coordinate j of step i is +/- sigma_i / sqrt(d)
    GaussianCoords,   // N(0, s^2) coordinates, s^2 = sigma_i^2 (1-e^{-2}) / (2d)
};

std::string generator_name(IncrementGenerator g);

struct MartingaleSimConfig {
    MartingaleSpec spec;
    IncrementGenerator generator = IncrementGenerator::RademacherCoords;
    std::int64_t trials = 100000;
    std::uint64_t seed = 0;
    int threads = 0; // 0 = SUBG_THREADS environment variable / hardware
};

struct EmpiricalPoint {
    double threshold = 0.0;
    double frequency = 0.0;
    double std_error = 0.0;
};

struct MartingaleSimResult {
    std::vector<EmpiricalPoint> norm_curve;      // P[|M_n| >= lambda sqrt(sum proxies)]
    std::vector<EmpiricalPoint> direction_curve; // first-coordinate projection
};

/// Simulates the martingale and returns empirical exceedance curves for the
/// normalized norm and for the projection on the first axis. Results are
/// bit-identical for a fixed (config, thresholds) regardless of thread count.
MartingaleSimResult simulate_martingale(const MartingaleSimConfig& config,
                                        const std::vector<double>& thresholds);

} // namespace subg
