#include "subg/convert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subg/detail/optimize.hpp"

namespace subg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogDoubleMax = 709.782712893383996;
constexpr double kLambdaLo = 1e-9;      // open-interval clamp for lambda searches
constexpr double kLambdaHi = 1.0 - 1e-9;
constexpr double kLn2 = 0.6931471805599453;

// log(1 + e^w) without overflow; w = -infinity maps to 0.
double softplus(double w) {
    if (w > 30.0) return w + std::log1p(std::exp(-w));
    return std::log1p(std::exp(w));
}

void check_lambda_open(double lambda) {
    if (!std::isfinite(lambda)) {
        throw NonFiniteError("lambda must be finite, got " + std::to_string(lambda));
    }
    if (lambda <= 0.0 || lambda >= 1.0) {
        throw DomainError("lambda must lie in the open interval (0, 1), got " +
                          std::to_string(lambda));
    }
}

} // namespace

double c_factor_sq(CFactor c, double lambda) {
    switch (c) {
        case CFactor::One: return 1.0;
        case CFactor::Two: return 2.0;
        case CFactor::Half: return 0.5;
        case CFactor::InvLambda: return 1.0 / lambda;
        case CFactor::InvTwoLambda: return 1.0 / (2.0 * lambda);
        case CFactor::TwoInvLambda: return 2.0 / lambda;
    }
    throw DomainError("c_factor_sq: invalid factor code");
}

double log_phi(PhiForm phi, double log_rho, double lambda) {
    switch (phi) {
        case PhiForm::Identity:
            return log_rho;
        case PhiForm::Double:
            return kLn2 + log_rho;
        case PhiForm::Expm1:
            // ln(rho - 1); exact -infinity at rho = 1
            if (log_rho > 30.0) return log_rho + std::log1p(-std::exp(-log_rho));
            return std::log(std::expm1(log_rho));
        case PhiForm::GeomSplus:
            // ln(1 + lambda rho / (1 - lambda)); handles rho = 0
            return softplus(std::log(lambda) + log_rho - std::log1p(-lambda));
        case PhiForm::PowOneMinus:
            return lambda * log_rho - std::log1p(-lambda);
        case PhiForm::DoublePowOneMinus:
            return lambda * (kLn2 + log_rho) - std::log1p(-lambda);
        case PhiForm::MinMgfPsi:
            return std::min(log_rho + 0.5 * std::log1p(-lambda),
                            lambda * (kLn2 + log_rho)) -
                   std::log1p(-lambda);
        case PhiForm::MinMgfPsiSigned:
            return std::min(log_rho + 0.5 * std::log1p(-lambda),
                            lambda * log_rho) -
                   std::log1p(-lambda);
    }
    throw DomainError("log_phi: invalid phi code");
}

std::string c_factor_text(CFactor c) {
    switch (c) {
        case CFactor::One: return "1";
        case CFactor::Two: return "sqrt(2)";
        case CFactor::Half: return "sqrt(1/2)";
        case CFactor::InvLambda: return "sqrt(1/lam)";
        case CFactor::InvTwoLambda: return "sqrt(1/(2 lam))";
        case CFactor::TwoInvLambda: return "sqrt(2/lam)";
    }
    return "?";
}

std::string phi_form_text(PhiForm phi) {
    switch (phi) {
        case PhiForm::Identity: return "rho";
        case PhiForm::Double: return "2 rho";
        case PhiForm::Expm1: return "rho - 1";
        case PhiForm::GeomSplus: return "1 + lam rho/(1 - lam)";
        case PhiForm::PowOneMinus: return "rho^lam/(1 - lam)";
        case PhiForm::DoublePowOneMinus: return "(2 rho)^lam/(1 - lam)";
        case PhiForm::MinMgfPsi: return "min{rho sqrt(1 - lam), (2 rho)^lam}/(1 - lam)";
        case PhiForm::MinMgfPsiSigned: return "min{rho/sqrt(1 - lam), rho^lam/(1 - lam)}";
    }
    return "?";
}

const std::vector<ConversionEdge>& conversion_table(SignConstraint regime) {
    using K = CertKind;
    using C = CFactor;
    using P = PhiForm;

    // {to, from, dagger, has_lambda, c, phi}
    static const std::vector<ConversionEdge> unconstrained = {
        {K::TwoSidedTail, K::EvenMoments, false, true, C::InvTwoLambda, P::GeomSplus},
        {K::TwoSidedTail, K::PsiBound, true, false, C::Half, P::Identity},
        {K::TwoSidedTail, K::Mgf, false, false, C::One, P::Double},
        {K::TwoSidedTail, K::OneSidedTail, true, false, C::One, P::Double},

        {K::EvenMoments, K::TwoSidedTail, true, false, C::Two, P::Identity},
        {K::EvenMoments, K::PsiBound, true, false, C::One, P::Expm1},
        {K::EvenMoments, K::Mgf, false, false, C::Two, P::Double},
        {K::EvenMoments, K::OneSidedTail, false, false, C::Two, P::Double},

        {K::PsiBound, K::TwoSidedTail, true, true, C::TwoInvLambda, P::PowOneMinus},
        {K::PsiBound, K::EvenMoments, true, true, C::InvLambda, P::GeomSplus},
        {K::PsiBound, K::Mgf, true, true, C::TwoInvLambda, P::MinMgfPsi},
        {K::PsiBound, K::OneSidedTail, false, true, C::TwoInvLambda, P::DoublePowOneMinus},

        {K::Mgf, K::TwoSidedTail, false, true, C::InvLambda, P::PowOneMinus},
        {K::Mgf, K::EvenMoments, false, true, C::InvTwoLambda, P::GeomSplus},
        {K::Mgf, K::PsiBound, true, false, C::Half, P::Identity},
        {K::Mgf, K::OneSidedTail, false, true, C::InvLambda, P::DoublePowOneMinus},

        {K::OneSidedTail, K::TwoSidedTail, false, true, C::InvLambda, P::PowOneMinus},
        {K::OneSidedTail, K::EvenMoments, false, true, C::InvTwoLambda, P::GeomSplus},
        {K::OneSidedTail, K::PsiBound, false, false, C::Half, P::Identity},
        {K::OneSidedTail, K::Mgf, true, false, C::One, P::Identity},
    };

    // One-signed variables: the one-sided and two-sided tail kinds coincide,
    // and the doubling prefactors drop out.
    static const std::vector<ConversionEdge> one_signed = {
        {K::TwoSidedTail, K::EvenMoments, false, true, C::InvTwoLambda, P::GeomSplus},
        {K::TwoSidedTail, K::PsiBound, true, false, C::Half, P::Identity},
        {K::TwoSidedTail, K::Mgf, true, false, C::One, P::Identity},

        {K::EvenMoments, K::TwoSidedTail, true, false, C::Two, P::Identity},
        {K::EvenMoments, K::PsiBound, true, false, C::One, P::Expm1},
        {K::EvenMoments, K::Mgf, false, false, C::Two, P::Identity},

        {K::PsiBound, K::TwoSidedTail, true, true, C::TwoInvLambda, P::PowOneMinus},
        {K::PsiBound, K::EvenMoments, true, true, C::InvLambda, P::GeomSplus},
        {K::PsiBound, K::Mgf, true, true, C::TwoInvLambda, P::MinMgfPsiSigned},

        {K::Mgf, K::TwoSidedTail, false, true, C::InvLambda, P::PowOneMinus},
        {K::Mgf, K::EvenMoments, false, true, C::InvTwoLambda, P::GeomSplus},
        {K::Mgf, K::PsiBound, true, false, C::Half, P::Identity},
    };

    return regime == SignConstraint::OneSigned ? one_signed : unconstrained;
}

const ConversionEdge& find_edge(CertKind from, CertKind to, SignConstraint regime) {
    if (regime == SignConstraint::OneSigned &&
        (from == CertKind::OneSidedTail || to == CertKind::OneSidedTail)) {
        throw NoSuchEdgeError("conversion: the one-sided tail kind is merged with the "
                              "two-sided one under the one-signed regime");
    }
    for (const auto& e : conversion_table(regime)) {
        if (e.from == from && e.to == to) return e;
    }
    throw NoSuchEdgeError("conversion: no tabulated edge " + kind_name(to) + " <- " +
                          kind_name(from) + " in regime " + sign_name(regime));
}

Certificate direct_convert(const Certificate& cert, CertKind target,
                           SignConstraint regime, std::optional<double> lambda) {
    validate(cert);
    const ConversionEdge& edge = find_edge(cert.kind, target, regime);

    double lam = 0.5;
    if (edge.has_lambda) {
        if (!lambda.has_value()) {
            throw MissingLambdaError("conversion " + kind_name(target) + " <- " +
                                     kind_name(cert.kind) +
                                     " is parameterized; lambda required");
        }
        check_lambda_open(*lambda);
        lam = *lambda;
    } else if (lambda.has_value()) {
        throw UnexpectedLambdaError("conversion " + kind_name(target) + " <- " +
                                    kind_name(cert.kind) +
                                    " takes no lambda, got " + std::to_string(*lambda));
    }

    Certificate out{target, c_factor_sq(edge.c, lam) * cert.var_proxy,
                    log_phi(edge.phi, cert.log_prefactor, lam)};
    validate(out); // every tabulated edge preserves the target domain
    return out;
}

Certificate convert_identity(const Certificate& cert) {
    validate(cert);
    return cert;
}

double moment_bound_from_tail(const Certificate& tail, int k) {
    validate(tail);
    if (tail.kind != CertKind::TwoSidedTail) {
        throw DomainError("moment_bound_from_tail: expected a tail2 certificate, got " +
                          kind_name(tail.kind));
    }
    if (k < 1) {
        throw DomainError("moment_bound_from_tail: k must be >= 1, got " +
                          std::to_string(k));
    }
    if (k > 170) return kInf;

    const double L = tail.log_prefactor; // >= 0 for tail2
    double log_fk = 0.0;
    if (L > 0.0) {
        // f_k = sum_{i<=k} L^i / i!, summed stably in log scale
        const double log_L = std::log(L);
        double peak = -kInf;
        for (int i = 0; i <= k; ++i) {
            peak = std::max(peak, i * log_L - std::lgamma(i + 1.0));
        }
        double sum = 0.0, comp = 0.0;
        for (int i = 0; i <= k; ++i) {
            const double term = std::exp(i * log_L - std::lgamma(i + 1.0) - peak);
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        log_fk = peak + std::log(sum);
    }

    const double log_bound =
        log_fk + k * (kLn2 + std::log(tail.var_proxy)) + std::lgamma(k + 1.0);
    if (log_bound >= kLogDoubleMax) return kInf;
    return std::exp(log_bound);
}

// =====================================================================
// Routed conversions
// =====================================================================

std::string ConversionPath::text() const {
    if (steps.empty()) return "identity";
    std::string s = "(" + std::to_string(static_cast<int>(steps.back().to)) + ")";
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        s += "<-(" + std::to_string(static_cast<int>(it->from)) + ")";
    }
    return s;
}

namespace {

struct EdgePath {
    std::vector<const ConversionEdge*> edges;
    int lambda_count = 0;
};

void dfs_paths(CertKind at, CertKind target, SignConstraint regime, bool dagger_only,
               std::vector<const ConversionEdge*>& stack, unsigned visited,
               std::vector<EdgePath>& out) {
    if (at == target) {
        EdgePath p;
        p.edges = stack;
        for (const auto* e : stack) p.lambda_count += e->has_lambda ? 1 : 0;
        out.push_back(std::move(p));
        return;
    }
    for (const auto& e : conversion_table(regime)) {
        if (e.from != at) continue;
        if (dagger_only && !e.dagger) continue;
        const unsigned bit = 1u << static_cast<int>(e.to);
        if (visited & bit) continue;
        stack.push_back(&e);
        dfs_paths(e.to, target, regime, dagger_only, stack, visited | bit, out);
        stack.pop_back();
    }
}

std::vector<EdgePath> enumerate_paths(CertKind source, CertKind target,
                                      SignConstraint regime, bool dagger_only) {
    std::vector<EdgePath> out;
    if (source == target) return out; // identity handled by callers
    std::vector<const ConversionEdge*> stack;
    dfs_paths(source, target, regime, dagger_only, stack,
              1u << static_cast<int>(source), out);
    std::stable_sort(out.begin(), out.end(),
                     [](const EdgePath& a, const EdgePath& b) {
                         return a.edges.size() < b.edges.size();
                     });
    return out;
}

struct PathEval {
    double var_proxy;
    double log_prefactor;
    double c_sq;
};

PathEval eval_edges(const Certificate& cert,
                    const std::vector<const ConversionEdge*>& edges,
                    const std::vector<double>& lambdas) {
    PathEval r{cert.var_proxy, cert.log_prefactor, 1.0};
    std::size_t li = 0;
    for (const auto* e : edges) {
        const double lam = e->has_lambda ? lambdas[li++] : 0.5;
        const double csq = c_factor_sq(e->c, lam);
        r.c_sq *= csq;
        r.var_proxy *= csq;
        r.log_prefactor = log_phi(e->phi, r.log_prefactor, lam);
    }
    return r;
}

ConversionPath make_path(const std::vector<const ConversionEdge*>& edges,
                         const std::vector<double>& lambdas, double c_sq) {
    ConversionPath p;
    p.lambdas = lambdas;
    p.c_sq_total = c_sq;
    for (const auto* e : edges) p.steps.push_back(PathStep{e->from, e->to});
    for (double lam : lambdas) {
        if (lam <= kLambdaLo + 2e-9 || lam >= kLambdaHi - 2e-9) {
            p.at_lambda_bound = true;
        }
    }
    return p;
}

} // namespace

Certificate apply_path(const Certificate& cert, const ConversionPath& path,
                       SignConstraint regime) {
    validate(cert);
    Certificate cur = cert;
    std::size_t li = 0;
    for (const auto& step : path.steps) {
        if (step.from != cur.kind) {
            throw DomainError("apply_path: step source " + kind_name(step.from) +
                              " does not match current kind " + kind_name(cur.kind));
        }
        const ConversionEdge& e = find_edge(step.from, step.to, regime);
        std::optional<double> lam;
        if (e.has_lambda) {
            if (li >= path.lambdas.size()) {
                throw MissingLambdaError("apply_path: fewer lambdas than parameterized steps");
            }
            lam = path.lambdas[li++];
        }
        cur = direct_convert(cur, step.to, regime, lam);
    }
    if (li != path.lambdas.size()) {
        throw UnexpectedLambdaError("apply_path: more lambdas than parameterized steps");
    }
    return cur;
}

Objective Objective::min_var_proxy() {
    Objective o;
    o.type = Type::MinVarProxy;
    return o;
}

Objective Objective::min_prefactor(std::optional<double> cap) {
    Objective o;
    o.type = Type::MinPrefactor;
    o.cap = cap;
    return o;
}

Objective Objective::min_tail_at(double t) {
    if (!std::isfinite(t) || t <= 0.0) {
        throw DomainError("Objective::min_tail_at: threshold must be positive and finite");
    }
    Objective o;
    o.type = Type::MinTailAt;
    o.threshold = t;
    return o;
}

std::pair<double, double> Objective::score(double var_proxy, double log_prefactor) const {
    switch (type) {
        case Type::MinVarProxy:
            return {var_proxy, log_prefactor};
        case Type::MinPrefactor:
            if (cap.has_value() && var_proxy > *cap) return {kInf, var_proxy};
            return {log_prefactor, var_proxy};
        case Type::MinTailAt:
            return {log_prefactor - threshold * threshold / (2.0 * var_proxy), 0.0};
    }
    throw DomainError("Objective::score: invalid objective type");
}

std::vector<ScoredPath> optimize_conversion_paths(const Certificate& cert,
                                                  CertKind target,
                                                  SignConstraint regime,
                                                  const PathScore& score) {
    validate(cert);
    if (regime == SignConstraint::OneSigned &&
        (cert.kind == CertKind::OneSidedTail || target == CertKind::OneSidedTail)) {
        throw NoSuchEdgeError("conversion: the one-sided tail kind is merged with the "
                              "two-sided one under the one-signed regime");
    }

    std::vector<ScoredPath> out;
    if (cert.kind == target) {
        ScoredPath identity;
        identity.path = ConversionPath{};
        identity.certificate = cert;
        identity.score = score(cert.var_proxy, cert.log_prefactor);
        out.push_back(std::move(identity));
        return out;
    }

    for (const EdgePath& ep : enumerate_paths(cert.kind, target, regime, false)) {
        std::vector<double> lambdas(ep.lambda_count, 0.5);
        if (ep.lambda_count > 0) {
            // Coordinate descent, each pass grid-seeded then golden-refined.
            for (int sweep = 0; sweep < 3; ++sweep) {
                for (int ci = 0; ci < ep.lambda_count; ++ci) {
                    auto line_objective = [&](double x) {
                        std::vector<double> trial = lambdas;
                        trial[ci] = x;
                        const PathEval ev = eval_edges(cert, ep.edges, trial);
                        return score(ev.var_proxy, ev.log_prefactor).first;
                    };
                    lambdas[ci] = detail::grid_then_golden(line_objective, kLambdaLo,
                                                           kLambdaHi, 101, 1e-9)
                                      .arg;
                }
            }
        }
        const PathEval ev = eval_edges(cert, ep.edges, lambdas);
        ScoredPath sp;
        sp.path = make_path(ep.edges, lambdas, ev.c_sq);
        sp.certificate = Certificate{target, ev.var_proxy, ev.log_prefactor};
        validate(sp.certificate);
        sp.score = score(ev.var_proxy, ev.log_prefactor);
        out.push_back(std::move(sp));
    }
    return out;
}

BestConversion best_convert(const Certificate& cert, CertKind target,
                            SignConstraint regime, const Objective& objective) {
    const auto scored = optimize_conversion_paths(
        cert, target, regime,
        [&objective](double vp, double lr) { return objective.score(vp, lr); });

    const ScoredPath* best = nullptr;
    for (const auto& sp : scored) {
        if (best == nullptr || sp.score < best->score) best = &sp;
    }
    if (best == nullptr || !std::isfinite(best->score.first)) {
        throw DomainError("best_convert: no feasible route from " +
                          kind_name(cert.kind) + " to " + kind_name(target) +
                          " under the given objective");
    }
    return BestConversion{best->certificate, best->path};
}

// =====================================================================
// Table self-consistency
// =====================================================================

namespace {

double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

// Relative error of phi measured on the log scale (|delta ln phi| is the
// relative error of phi to first order), absolute when ln phi is small.
double log_phi_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

} // namespace

TableConsistencyReport table_consistency_report(SignConstraint regime,
                                                const std::vector<TableSample>& samples) {
    if (samples.empty()) {
        throw DomainError("table_consistency_report: sample set must be non-empty");
    }
    for (const auto& s : samples) {
        check_lambda_open(s.lambda);
        if (!std::isfinite(s.rho) || s.rho < 1.0) {
            throw DomainError("table_consistency_report: rho samples must be >= 1 so "
                              "they are admissible for every kind");
        }
    }

    TableConsistencyReport report;
    report.regime = regime;
    report.all_pass = true;

    for (const ConversionEdge& entry : conversion_table(regime)) {
        TableEntryCheck check;
        check.to = entry.to;
        check.from = entry.from;
        check.dagger = entry.dagger;
        check.max_rel_err = 0.0;

        if (entry.dagger) {
            check.pass = true;
            check.witness = "stated with proof";
            report.entries.push_back(std::move(check));
            continue;
        }

        check.pass = false;
        double best_err = kInf;
        for (const EdgePath& ep : enumerate_paths(entry.from, entry.to, regime, true)) {
            double worst = 0.0;
            for (const TableSample& s : samples) {
                const std::vector<double> lambdas(ep.lambda_count, s.lambda);
                const Certificate hypo{entry.from, 1.0, std::log(s.rho)};
                const PathEval ev = eval_edges(hypo, ep.edges, lambdas);
                const double want_c = c_factor_sq(entry.c, s.lambda);
                const double want_phi = log_phi(entry.phi, hypo.log_prefactor, s.lambda);
                worst = std::max(worst, rel_err(ev.c_sq, want_c));
                worst = std::max(worst, log_phi_err(ev.log_prefactor, want_phi));
            }
            if (worst < best_err) {
                best_err = worst;
                check.max_rel_err = worst;
                check.witness = make_path(ep.edges, {}, 1.0).text();
            }
            if (worst <= 1e-12) {
                check.pass = true;
                break;
            }
        }
        if (!check.pass) report.all_pass = false;
        report.entries.push_back(std::move(check));
    }
    return report;
}

std::vector<TableSample> default_table_samples() {
    const double lams[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    const double rhos[] = {1.0, 1.5, 2.718281828459045, 5.0, 20.0};
    std::vector<TableSample> out;
    for (double lam : lams) {
        for (double rho : rhos) out.push_back(TableSample{lam, rho});
    }
    return out;
}

} // namespace subg
