#include "subg/deviation.hpp"

#include <cmath>
#include <limits>

namespace subg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;
constexpr double kSqrt2OverPi = 0.7978845608028654; // sqrt(2/pi)
constexpr double kEightOverPi = 2.546479089470325;  // 8/pi

BoundReport report_from_log(double threshold, double log_raw) {
    BoundReport r;
    r.threshold = threshold;
    r.log_raw_bound = log_raw;
    r.raw_bound = std::exp(log_raw); // may saturate to +infinity, by design
    r.clamped = log_raw >= 0.0 ? 1.0 : std::exp(log_raw);
    return r;
}

} // namespace

TailSandwich gaussian_tail_sandwich(double x) {
    if (std::isnan(x)) throw NonFiniteError("gaussian_tail_sandwich: x is NaN");
    if (x < 0.0) {
        throw DomainError("gaussian_tail_sandwich: x must be >= 0, got " +
                          std::to_string(x));
    }
    const double g = kSqrt2OverPi * std::exp(-0.5 * x * x);
    TailSandwich s;
    s.lower = g / (x + std::sqrt(x * x + 4.0));
    s.upper = g / (x + std::sqrt(x * x + kEightOverPi));
    return s;
}

std::string tail_side_name(TailSide side) {
    switch (side) {
        case TailSide::Upper: return "upper";
        case TailSide::Lower: return "lower";
        case TailSide::Both: return "both";
    }
    return "?";
}

TailSide tail_side_from_name(const std::string& name) {
    if (name == "upper") return TailSide::Upper;
    if (name == "lower") return TailSide::Lower;
    if (name == "both") return TailSide::Both;
    throw SchemaError("side: unknown tail side \"" + name +
                      "\" (expected upper|lower|both)");
}

BoundReport chernoff_tail(const Certificate& cert, double t, TailSide side) {
    validate(cert);
    if (cert.kind != CertKind::Mgf) {
        throw DomainError("chernoff_tail: expects an mgf certificate, got " +
                          kind_name(cert.kind));
    }
    if (std::isnan(t) || t < 0.0) {
        throw DomainError("chernoff_tail: threshold must be >= 0");
    }
    double log_raw = cert.log_prefactor - t * t / (2.0 * cert.var_proxy);
    if (side == TailSide::Both) log_raw += kLn2;
    return report_from_log(t, log_raw);
}

std::string assumption_name(MartingaleAssumption a) {
    switch (a) {
        case MartingaleAssumption::ConditionalMgf: return "I";
        case MartingaleAssumption::CoordinateTails: return "II";
        case MartingaleAssumption::DirectionalTails: return "III";
    }
    return "?";
}

MartingaleAssumption assumption_from_name(const std::string& name) {
    if (name == "I") return MartingaleAssumption::ConditionalMgf;
    if (name == "II") return MartingaleAssumption::CoordinateTails;
    if (name == "III") return MartingaleAssumption::DirectionalTails;
    throw SchemaError("assumption: unknown martingale assumption \"" + name +
                      "\" (expected I|II|III)");
}

void validate(const MartingaleSpec& spec) {
    if (spec.dimension < 1 || spec.dimension > 1000000) {
        throw DomainError("martingale: dimension must lie in [1, 1000000], got " +
                          std::to_string(spec.dimension));
    }
    if (spec.step_proxies.empty()) {
        throw EmptyListError("martingale: step_proxies must be non-empty");
    }
    for (double vp : spec.step_proxies) {
        if (!std::isfinite(vp) || vp <= 0.0) {
            throw DomainError("martingale: every step proxy must be a positive real");
        }
    }
}

double total_proxy(const MartingaleSpec& spec) {
    validate(spec);
    double s = 0.0;
    for (double vp : spec.step_proxies) s += vp;
    return s;
}

BoundReport martingale_norm_bound(const MartingaleSpec& spec, double lambda,
                                  std::optional<double> epsilon,
                                  std::optional<double> x) {
    validate(spec);
    if (std::isnan(lambda) || lambda < 0.0) {
        throw DomainError("martingale_norm_bound: lambda must be >= 0");
    }

    const double lam_sq = lambda * lambda;
    double log_raw;
    BoundReport r;

    switch (spec.assumption) {
        case MartingaleAssumption::ConditionalMgf: {
            if (epsilon.has_value()) {
                throw ParamRegimeMismatchError(
                    "martingale_norm_bound: epsilon belongs to assumption III, "
                    "spec uses assumption I");
            }
            const double xv = x.value_or(0.75);
            if (!(xv > 0.0) || !(xv < 1.0)) {
                throw DomainError("martingale_norm_bound: x must lie in (0, 1)");
            }
            log_raw = -0.5 * std::log1p(-xv) - xv * lam_sq / 3.0;
            r = report_from_log(lambda, log_raw);
            r.param_x = xv;
            return r;
        }
        case MartingaleAssumption::CoordinateTails: {
            if (epsilon.has_value() || x.has_value()) {
                throw ParamRegimeMismatchError(
                    "martingale_norm_bound: assumption II takes no free parameter");
            }
            log_raw = std::log1p(static_cast<double>(spec.dimension)) - lam_sq / 3.0;
            return report_from_log(lambda, log_raw);
        }
        case MartingaleAssumption::DirectionalTails: {
            if (x.has_value()) {
                throw ParamRegimeMismatchError(
                    "martingale_norm_bound: x belongs to assumption I, "
                    "spec uses assumption III");
            }
            const double ev = epsilon.value_or(0.5);
            if (!(ev > 0.0) || !(ev < 1.0)) {
                throw DomainError("martingale_norm_bound: epsilon must lie in (0, 1)");
            }
            const double cover = spec.dimension * std::log1p(2.0 / ev);
            log_raw = cover - (1.0 - ev) * (1.0 - ev) * lam_sq / 3.0;
            r = report_from_log(lambda, log_raw);
            r.param_epsilon = ev;
            return r;
        }
    }
    throw DomainError("martingale_norm_bound: invalid assumption code");
}

BoundReport martingale_direction_bound(double lambda) {
    if (std::isnan(lambda) || lambda < 0.0) {
        throw DomainError("martingale_direction_bound: lambda must be >= 0");
    }
    return report_from_log(lambda, -lambda * lambda / 3.0);
}

void validate_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.empty()) {
        throw EmptyListError("thresholds: grid must be non-empty");
    }
    double prev = -kInf;
    for (double t : thresholds) {
        if (std::isnan(t) || t < 0.0) {
            throw DomainError("thresholds: every threshold must be >= 0");
        }
        if (t <= prev) {
            throw DomainError("thresholds: grid must be strictly increasing");
        }
        prev = t;
    }
}

std::vector<BoundReport> tail_curve(const Certificate& cert,
                                    const std::vector<double>& thresholds,
                                    TailSide side) {
    validate_thresholds(thresholds);
    std::vector<BoundReport> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) out.push_back(chernoff_tail(cert, t, side));
    return out;
}

std::vector<BoundReport> tail_curve(const MartingaleSpec& spec,
                                    const std::vector<double>& thresholds,
                                    std::optional<double> epsilon,
                                    std::optional<double> x) {
    validate_thresholds(thresholds);
    std::vector<BoundReport> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) {
        out.push_back(martingale_norm_bound(spec, t, epsilon, x));
    }
    return out;
}

} // namespace subg
