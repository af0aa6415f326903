#include "subg/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subg/detail/optimize.hpp"

namespace subg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

// Branch seams of the psi and moments centering cases.
constexpr double kPsiSeamLow = 4.0 / 9.0;
constexpr double kPsiSeamHigh = 16.0 / 9.0;
constexpr double kMomentsSeam = 29.0 / 90.0;

} // namespace

namespace centering {

double psi_factor_low(double log_rho3) { return 0.5 + 1.125 * log_rho3; }

double psi_factor_mid(double log_rho3) { return 1.5 * std::sqrt(log_rho3); }

double psi_factor_high(double log_rho3) { return 1.125 * log_rho3; }

double moments_factor_low() { return 29.0 / 45.0; }

double moments_factor_high(double rho2) {
    const double a = rho2 - 19.0 / 90.0;
    return 0.5 * (std::sqrt(a * a + (26.0 / 15.0) * rho2) + rho2 + 19.0 / 90.0);
}

double tail_factor(double log_rho1) { return (8.0 + 7.0 * log_rho1) / 3.0; }

double mgf_factor(double log_rho4) {
    if (!(log_rho4 > 0.0)) {
        throw DomainError("mgf_factor: requires ln rho > 0; the rho = 1 case is an "
                          "exact bypass");
    }
    // Closed-form optimum of the split between the quadratic regime and the
    // tail regime; continuous limit 9/8 as ln rho -> 0+.
    const double L = log_rho4;
    const double s = std::sqrt(L * (L + 2.0));
    const double ratio = (L + s) / L;
    const double second = L + 0.5 * std::log1p(L + s);
    return 1.125 * ratio * second;
}

} // namespace centering

std::string branch_name(CenterBranch branch) {
    switch (branch) {
        case CenterBranch::PsiLow: return "psi-low";
        case CenterBranch::PsiMid: return "psi-mid";
        case CenterBranch::PsiHigh: return "psi-high";
        case CenterBranch::MomentsLow: return "moments-low";
        case CenterBranch::MomentsHigh: return "moments-high";
        case CenterBranch::Tail: return "tail";
        case CenterBranch::TailFromOneSided: return "tail-from-one-sided";
        case CenterBranch::MgfGeneral: return "mgf-general";
        case CenterBranch::MgfBypass: return "mgf-bypass";
    }
    return "?";
}

namespace {

struct CenterFactor {
    double factor; // sigma_out^2 / sigma_in^2
    CenterBranch branch;
};

CenterFactor center_factor(CertKind kind, double log_prefactor, SignConstraint sign) {
    switch (kind) {
        case CertKind::PsiBound: {
            const double L = log_prefactor;
            if (L < kPsiSeamLow) return {centering::psi_factor_low(L), CenterBranch::PsiLow};
            if (L < kPsiSeamHigh) return {centering::psi_factor_mid(L), CenterBranch::PsiMid};
            return {centering::psi_factor_high(L), CenterBranch::PsiHigh};
        }
        case CertKind::EvenMoments: {
            const double rho2 = std::exp(log_prefactor);
            if (rho2 < kMomentsSeam) {
                return {centering::moments_factor_low(), CenterBranch::MomentsLow};
            }
            return {centering::moments_factor_high(rho2), CenterBranch::MomentsHigh};
        }
        case CertKind::TwoSidedTail:
            return {centering::tail_factor(log_prefactor), CenterBranch::Tail};
        case CertKind::OneSidedTail: {
            // Fold into the two-sided case; a one-signed variable needs no
            // doubling because the kinds coincide there. The series bound
            // behind tail_factor needs a prefactor >= 1, so a sub-unit fold
            // is weakened up to the two-sided floor.
            const double lr1 = sign == SignConstraint::OneSigned
                                   ? std::max(log_prefactor, 0.0)
                                   : log_prefactor + kLn2;
            return {centering::tail_factor(lr1), CenterBranch::TailFromOneSided};
        }
        case CertKind::Mgf: {
            if (log_prefactor == 0.0) return {1.0, CenterBranch::MgfBypass};
            return {centering::mgf_factor(log_prefactor), CenterBranch::MgfGeneral};
        }
    }
    throw DomainError("center: invalid certificate kind code");
}

} // namespace

CenteringResult center(const Certificate& cert, const VariableContext& ctx) {
    if (!ctx.mean_is_zero) {
        throw MeanNotZeroError("center: requires mean_is_zero in the variable context; "
                               "use shift or recentering_equivalence for a nonzero mean");
    }
    validate(cert);
    const CenterFactor cf = center_factor(cert.kind, cert.log_prefactor, ctx.sign);
    Certificate out{CertKind::Mgf, cf.factor * cert.var_proxy, 0.0};
    validate(out);
    return CenteringResult{out, cf.branch};
}

BestCenteringResult center_via_best_route(const Certificate& cert,
                                          const VariableContext& ctx) {
    if (!ctx.mean_is_zero) {
        throw MeanNotZeroError("center_via_best_route: requires mean_is_zero in the "
                               "variable context");
    }
    validate(cert);

    const SignConstraint regime = ctx.sign;
    // Under the one-signed regime a one-sided tail certificate is the same
    // object as a two-sided one.
    Certificate work = cert;
    if (regime == SignConstraint::OneSigned && work.kind == CertKind::OneSidedTail) {
        work.kind = CertKind::TwoSidedTail;
    }

    BestCenteringResult result;
    result.best = center(work, ctx);

    CenteringRouteCandidate direct;
    direct.via = std::nullopt;
    direct.branch = result.best.branch;
    direct.var_proxy = result.best.certificate.var_proxy;
    result.candidates.push_back(direct);

    std::vector<CertKind> targets = {CertKind::TwoSidedTail, CertKind::EvenMoments,
                                     CertKind::PsiBound, CertKind::Mgf,
                                     CertKind::OneSidedTail};
    if (regime == SignConstraint::OneSigned) targets.pop_back();

    for (CertKind target : targets) {
        if (target == work.kind) continue;

        // Composite objective: the centered variance proxy after routing.
        PathScore composite = [target, regime](double vp, double lr) {
            return std::pair<double, double>(
                center_factor(target, lr, regime).factor * vp, 0.0);
        };
        for (ScoredPath& sp : optimize_conversion_paths(work, target, regime, composite)) {
            CenteringRouteCandidate cand;
            cand.via = target;
            cand.path = sp.path;
            const CenterFactor cf =
                center_factor(target, sp.certificate.log_prefactor, regime);
            cand.branch = cf.branch;
            cand.var_proxy = cf.factor * sp.certificate.var_proxy;
            result.candidates.push_back(std::move(cand));
        }

        // Decile diagnostics on the single-edge route keep coarse textbook
        // lambda choices visible next to the tuned optimum.
        const ConversionEdge* direct_edge = nullptr;
        for (const auto& e : conversion_table(regime)) {
            if (e.from == work.kind && e.to == target) direct_edge = &e;
        }
        if (direct_edge != nullptr && direct_edge->has_lambda) {
            for (int i = 1; i <= 9; ++i) {
                const double lam = 0.1 * i;
                const Certificate converted =
                    direct_convert(work, target, regime, lam);
                const CenterFactor cf =
                    center_factor(target, converted.log_prefactor, regime);
                CenteringRouteCandidate cand;
                cand.via = target;
                cand.path.steps.push_back(PathStep{work.kind, target});
                cand.path.lambdas.push_back(lam);
                cand.path.c_sq_total = converted.var_proxy / work.var_proxy;
                cand.branch = cf.branch;
                cand.var_proxy = cf.factor * converted.var_proxy;
                result.candidates.push_back(std::move(cand));
            }
        }
    }

    const CenteringRouteCandidate* best = &result.candidates.front();
    for (const auto& cand : result.candidates) {
        if (cand.var_proxy < best->var_proxy) best = &cand;
    }
    result.best.certificate = Certificate{CertKind::Mgf, best->var_proxy, 0.0};
    result.best.branch = best->branch;
    validate(result.best.certificate);
    return result;
}

ShiftResult shift(const Certificate& cert, const ShiftParams& params) {
    validate(cert);
    if (cert.kind != CertKind::Mgf) {
        throw DomainError("shift: expects an mgf certificate, got " +
                          kind_name(cert.kind));
    }
    if (!std::isfinite(params.c)) {
        throw NonFiniteError("shift: offset c must be finite");
    }
    if (params.c == 0.0) {
        return ShiftResult{cert, 0.0, false}; // nothing to absorb
    }

    const double vp = cert.var_proxy;
    const double c_sq = params.c * params.c;

    double x;
    bool at_bound = false;
    if (params.x.has_value()) {
        x = *params.x;
        if (!std::isfinite(x) || x <= 0.0) {
            throw DomainError("shift: x must be a positive real, got " +
                              std::to_string(x));
        }
    } else {
        double t = params.threshold.value_or(3.0 * std::sqrt(vp));
        if (!std::isfinite(t) || t <= 0.0) {
            throw DomainError("shift: threshold must be a positive real");
        }
        // Chernoff log-bound at t after shifting by x.
        auto objective = [&](double xx) {
            return cert.log_prefactor + c_sq / (2.0 * xx * vp) -
                   t * t / (2.0 * vp * (1.0 + xx));
        };
        x = detail::grid_then_golden(objective, 1e-12, 64.0, 101, 1e-10).arg;
        if (x >= 64.0 * (1.0 - 1e-6) || x <= 2e-12) at_bound = true;
    }

    Certificate out{CertKind::Mgf, vp * (1.0 + x),
                    cert.log_prefactor + c_sq / (2.0 * x * vp)};
    validate(out);
    return ShiftResult{out, x, at_bound};
}

CenteringResult recentering_equivalence(const Certificate& cert, double mean,
                                        std::optional<double> x) {
    validate(cert);
    if (!std::isfinite(mean)) {
        throw NonFiniteError("recentering_equivalence: mean must be finite");
    }

    Certificate mgf_form = cert;
    if (cert.kind != CertKind::Mgf) {
        const Objective obj = Objective::min_tail_at(3.0 * std::sqrt(cert.var_proxy));
        mgf_form = best_convert(cert, CertKind::Mgf, SignConstraint::Unconstrained, obj)
                       .certificate;
    }

    Certificate shifted = mgf_form;
    if (mean != 0.0) {
        ShiftParams sp;
        sp.c = -mean;
        sp.x = x;
        shifted = shift(mgf_form, sp).certificate;
    }

    VariableContext ctx;
    ctx.mean_is_zero = true;
    return center(shifted, ctx);
}

// =====================================================================
// Closures
// =====================================================================

namespace {

void require_kind(const std::vector<Certificate>& certs, CertKind kind,
                  const char* op) {
    if (certs.empty()) {
        throw EmptyListError(std::string(op) + ": certificate list must be non-empty");
    }
    for (std::size_t i = 0; i < certs.size(); ++i) {
        validate(certs[i]);
        if (certs[i].kind != kind) {
            throw DomainError(std::string(op) + ": certificate " + std::to_string(i) +
                              " has kind " + kind_name(certs[i].kind) + ", expected " +
                              kind_name(kind));
        }
    }
}

// sum_i w_i lr_i / sum_i w_i with positive weights.
double weighted_log_prefactor(const std::vector<Certificate>& certs,
                              const std::vector<double>& weights) {
    double wsum = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < certs.size(); ++i) {
        wsum += weights[i];
        acc += weights[i] * certs[i].log_prefactor;
    }
    return acc / wsum;
}

} // namespace

Certificate sum_dependent(const std::vector<Certificate>& certs) {
    require_kind(certs, CertKind::Mgf, "sum");
    // A one-term sum is the term itself; skip the sqrt round trip.
    if (certs.size() == 1) return certs[0];
    double s = 0.0;
    std::vector<double> sigmas(certs.size());
    for (std::size_t i = 0; i < certs.size(); ++i) {
        sigmas[i] = std::sqrt(certs[i].var_proxy);
        s += sigmas[i];
    }
    Certificate out{CertKind::Mgf, s * s, weighted_log_prefactor(certs, sigmas)};
    validate(out);
    return out;
}

Certificate sum_independent(const std::vector<Certificate>& certs) {
    require_kind(certs, CertKind::Mgf, "sum_independent");
    double vp = 0.0, lr = 0.0;
    for (const auto& c : certs) {
        vp += c.var_proxy;
        lr += c.log_prefactor;
    }
    Certificate out{CertKind::Mgf, vp, lr};
    validate(out);
    return out;
}

Certificate max_of(const std::vector<Certificate>& certs) {
    require_kind(certs, CertKind::Mgf, "max_of");
    double vp = 0.0;
    double peak = -kInf;
    for (const auto& c : certs) {
        vp = std::max(vp, c.var_proxy);
        peak = std::max(peak, c.log_prefactor);
    }
    double sum = 0.0;
    for (const auto& c : certs) sum += std::exp(c.log_prefactor - peak);
    Certificate out{CertKind::Mgf, vp, peak + std::log(sum)};
    validate(out);
    return out;
}

std::string psi_combine_mode_name(PsiCombineMode mode) {
    switch (mode) {
        case PsiCombineMode::SumAbs: return "sum-abs";
        case PsiCombineMode::SqrtSumSq: return "sqrt-sum-sq";
        case PsiCombineMode::IndependentSum: return "indep-sum";
    }
    return "?";
}

PsiCombineMode psi_combine_mode_from_name(const std::string& name) {
    if (name == "sum-abs") return PsiCombineMode::SumAbs;
    if (name == "sqrt-sum-sq") return PsiCombineMode::SqrtSumSq;
    if (name == "indep-sum") return PsiCombineMode::IndependentSum;
    throw SchemaError("mode: unknown psi-combine mode \"" + name +
                      "\" (expected sum-abs|sqrt-sum-sq|indep-sum)");
}

Certificate psi_combine(const std::vector<Certificate>& certs, PsiCombineMode mode) {
    require_kind(certs, CertKind::PsiBound, "psi_combine");
    switch (mode) {
        case PsiCombineMode::SumAbs: {
            double s = 0.0;
            std::vector<double> sigmas(certs.size());
            for (std::size_t i = 0; i < certs.size(); ++i) {
                sigmas[i] = std::sqrt(certs[i].var_proxy);
                s += sigmas[i];
            }
            Certificate out{CertKind::PsiBound, s * s,
                            weighted_log_prefactor(certs, sigmas)};
            validate(out);
            return out;
        }
        case PsiCombineMode::SqrtSumSq: {
            double vp = 0.0;
            std::vector<double> weights(certs.size());
            for (std::size_t i = 0; i < certs.size(); ++i) {
                weights[i] = certs[i].var_proxy;
                vp += weights[i];
            }
            Certificate out{CertKind::PsiBound, vp,
                            weighted_log_prefactor(certs, weights)};
            validate(out);
            return out;
        }
        case PsiCombineMode::IndependentSum: {
            double vp = 0.0, lr = 0.0;
            for (const auto& c : certs) {
                vp += c.var_proxy;
                lr += c.log_prefactor;
            }
            Certificate out{CertKind::PsiBound, vp, lr};
            validate(out);
            return out;
        }
    }
    throw DomainError("psi_combine: invalid mode code");
}

} // namespace subg
