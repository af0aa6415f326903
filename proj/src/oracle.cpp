#include "subg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subg/detail/parallel.hpp"
#include "subg/quadrature.hpp"
#include "subg/rng.hpp"

namespace subg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogDoubleMax = 709.782712893383996;
constexpr double kInvSqrt2 = 0.7071067811865476;

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw NonFiniteError(std::string("model: ") + what + " must be finite");
    }
}

} // namespace

void validate(const DistributionModel& model) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GaussianModel>) {
                check_finite(m.mean, "mean");
                check_finite(m.sd, "sd");
                if (m.sd <= 0.0) throw DomainError("model: gaussian sd must be > 0");
            } else if constexpr (std::is_same_v<T, RademacherModel>) {
                check_finite(m.scale, "scale");
                if (m.scale <= 0.0) {
                    throw DomainError("model: rademacher scale must be > 0");
                }
            } else if constexpr (std::is_same_v<T, UniformModel>) {
                check_finite(m.a, "a");
                check_finite(m.b, "b");
                if (!(m.a < m.b)) throw DomainError("model: uniform requires a < b");
            } else {
                check_finite(m.p, "p");
                check_finite(m.scale, "scale");
                if (!(m.p > 0.0) || !(m.p < 1.0)) {
                    throw DomainError("model: bernoulli p must lie in (0, 1)");
                }
                if (m.scale <= 0.0) {
                    throw DomainError("model: bernoulli scale must be > 0");
                }
            }
        },
        model.family);
}

std::string family_name(const DistributionModel& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GaussianModel>) return "gaussian";
            else if constexpr (std::is_same_v<T, RademacherModel>) return "rademacher";
            else if constexpr (std::is_same_v<T, UniformModel>) return "uniform";
            else return "centered-bernoulli";
        },
        model.family);
}

double model_mean(const DistributionModel& model) {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GaussianModel>) return m.mean;
            else if constexpr (std::is_same_v<T, UniformModel>) return 0.5 * (m.a + m.b);
            else return 0.0;
        },
        model.family);
}

double analytic_mgf(const DistributionModel& model, double t) {
    validate(model);
    if (!std::isfinite(t)) throw NonFiniteError("analytic_mgf: t must be finite");
    return std::visit(
        [t](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GaussianModel>) {
                return std::exp(m.mean * t + 0.5 * m.sd * m.sd * t * t);
            } else if constexpr (std::is_same_v<T, RademacherModel>) {
                return std::cosh(m.scale * t);
            } else if constexpr (std::is_same_v<T, UniformModel>) {
                if (t == 0.0) return 1.0;
                // (e^{bt} - e^{at}) / ((b-a) t), written to stay exact as t -> 0
                const double w = (m.b - m.a) * t;
                return std::exp(m.a * t) * std::expm1(w) / w;
            } else {
                return m.p * std::exp(t * m.scale * (1.0 - m.p)) +
                       (1.0 - m.p) * std::exp(-t * m.scale * m.p);
            }
        },
        model.family);
}

PsiValue analytic_psi(const DistributionModel& model, double var_proxy) {
    validate(model);
    if (!std::isfinite(var_proxy) || var_proxy <= 0.0) {
        throw DomainError("analytic_psi: var_proxy must be a positive real");
    }
    const double T = var_proxy;
    return std::visit(
        [T](const auto& m) -> PsiValue {
            using Fam = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<Fam, GaussianModel>) {
                const double s_sq = m.sd * m.sd;
                if (T <= 2.0 * s_sq) return PsiValue{kInf, true};
                const double d = T - 2.0 * s_sq;
                return PsiValue{std::sqrt(T / d) * std::exp(m.mean * m.mean / d), false};
            } else if constexpr (std::is_same_v<Fam, RademacherModel>) {
                return PsiValue{std::exp(m.scale * m.scale / T), false};
            } else if constexpr (std::is_same_v<Fam, UniformModel>) {
                const double width = m.b - m.a;
                const double v = integrate(
                    [T](double x) { return std::exp(x * x / T); }, m.a, m.b);
                return PsiValue{v / width, false};
            } else {
                const double hi = m.scale * (1.0 - m.p);
                const double lo = m.scale * m.p;
                return PsiValue{m.p * std::exp(hi * hi / T) +
                                    (1.0 - m.p) * std::exp(lo * lo / T),
                                false};
            }
        },
        model.family);
}

double even_moment(const DistributionModel& model, int k) {
    validate(model);
    if (k < 0) throw DomainError("even_moment: k must be >= 0");
    if (k == 0) return 1.0;
    return std::visit(
        [k](const auto& m) -> double {
            using Fam = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<Fam, GaussianModel>) {
                // Raw-moment recurrence m_j = mu m_{j-1} + (j-1) s^2 m_{j-2};
                // even moments depend on |mu| only, keeping all terms positive.
                const double mu = std::abs(m.mean);
                const double s_sq = m.sd * m.sd;
                double prev = 1.0, cur = mu;
                for (int j = 2; j <= 2 * k; ++j) {
                    const double next = mu * cur + (j - 1) * s_sq * prev;
                    prev = cur;
                    cur = next;
                }
                return cur;
            } else if constexpr (std::is_same_v<Fam, RademacherModel>) {
                return std::pow(m.scale * m.scale, k);
            } else if constexpr (std::is_same_v<Fam, UniformModel>) {
                const int p = 2 * k + 1;
                return (std::pow(m.b, p) - std::pow(m.a, p)) / ((m.b - m.a) * p);
            } else {
                const double hi = m.scale * (1.0 - m.p);
                const double lo = m.scale * m.p;
                return m.p * std::pow(hi * hi, k) + (1.0 - m.p) * std::pow(lo * lo, k);
            }
        },
        model.family);
}

double upper_tail(const DistributionModel& model, double u) {
    validate(model);
    if (std::isnan(u)) throw NonFiniteError("upper_tail: u is NaN");
    return std::visit(
        [u](const auto& m) -> double {
            using Fam = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<Fam, GaussianModel>) {
                return 0.5 * std::erfc((u - m.mean) / m.sd * kInvSqrt2);
            } else if constexpr (std::is_same_v<Fam, RademacherModel>) {
                if (u <= -m.scale) return 1.0;
                if (u <= m.scale) return 0.5;
                return 0.0;
            } else if constexpr (std::is_same_v<Fam, UniformModel>) {
                if (u <= m.a) return 1.0;
                if (u >= m.b) return 0.0;
                return (m.b - u) / (m.b - m.a);
            } else {
                const double hi = m.scale * (1.0 - m.p);
                const double lo = -m.scale * m.p;
                if (u <= lo) return 1.0;
                if (u <= hi) return m.p;
                return 0.0;
            }
        },
        model.family);
}

double lower_tail(const DistributionModel& model, double u) {
    validate(model);
    if (std::isnan(u)) throw NonFiniteError("lower_tail: u is NaN");
    const double v = -u;
    return std::visit(
        [v](const auto& m) -> double {
            using Fam = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<Fam, GaussianModel>) {
                return 0.5 * std::erfc((m.mean - v) / m.sd * kInvSqrt2);
            } else if constexpr (std::is_same_v<Fam, RademacherModel>) {
                if (v >= m.scale) return 1.0;
                if (v >= -m.scale) return 0.5;
                return 0.0;
            } else if constexpr (std::is_same_v<Fam, UniformModel>) {
                if (v >= m.b) return 1.0;
                if (v <= m.a) return 0.0;
                return (v - m.a) / (m.b - m.a);
            } else {
                const double hi = m.scale * (1.0 - m.p);
                const double lo = -m.scale * m.p;
                if (v >= hi) return 1.0;
                if (v >= lo) return 1.0 - m.p;
                return 0.0;
            }
        },
        model.family);
}

double two_sided_tail(const DistributionModel& model, double u) {
    if (u <= 0.0) return 1.0;
    return std::min(1.0, upper_tail(model, u) + lower_tail(model, u));
}

double one_sided_max_tail(const DistributionModel& model, double u) {
    return std::max(upper_tail(model, u), lower_tail(model, u));
}

double upper_incomplete_gamma_int(int k_plus_1, double a) {
    if (k_plus_1 < 1) {
        throw DomainError("upper_incomplete_gamma_int: first argument must be >= 1");
    }
    if (std::isnan(a) || a < 0.0) {
        throw DomainError("upper_incomplete_gamma_int: a must be >= 0");
    }
    const int k = k_plus_1 - 1;
    if (k > 170) return kInf;
    if (a == 0.0) return std::tgamma(static_cast<double>(k_plus_1));

    // ln Gamma(k+1, a) = ln k! - a + ln sum_{i<=k} a^i / i!
    const double log_a = std::log(a);
    double peak = -kInf;
    for (int i = 0; i <= k; ++i) {
        peak = std::max(peak, i * log_a - std::lgamma(i + 1.0));
    }
    double sum = 0.0, comp = 0.0;
    for (int i = 0; i <= k; ++i) {
        const double term = std::exp(i * log_a - std::lgamma(i + 1.0) - peak);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    const double log_value = std::lgamma(k + 1.0) - a + peak + std::log(sum);
    if (log_value >= kLogDoubleMax) return kInf;
    return std::exp(log_value);
}

// =====================================================================
// Sampling
// =====================================================================

double sample_one(const DistributionModel& model, std::uint64_t seed, std::int64_t i) {
    const auto trial = static_cast<std::uint64_t>(i);
    return std::visit(
        [seed, trial](const auto& m) -> double {
            using Fam = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<Fam, GaussianModel>) {
                return m.mean + m.sd * counter_normal(seed, trial, 0, 0);
            } else if constexpr (std::is_same_v<Fam, RademacherModel>) {
                return m.scale * counter_sign(seed, trial, 0, 0);
            } else if constexpr (std::is_same_v<Fam, UniformModel>) {
                return m.a + (m.b - m.a) * counter_uniform01(seed, trial, 0, 0);
            } else {
                const double u = counter_uniform01(seed, trial, 0, 0);
                return u < m.p ? m.scale * (1.0 - m.p) : -m.scale * m.p;
            }
        },
        model.family);
}

std::vector<double> draw_samples(const DistributionModel& model, std::uint64_t seed,
                                 std::int64_t n) {
    validate(model);
    if (n < 0) throw DomainError("draw_samples: n must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = sample_one(model, seed, i);
    return out;
}

// =====================================================================
// Certificate verification
// =====================================================================

std::string probe_method_name(ProbeMethod method) {
    switch (method) {
        case ProbeMethod::ClosedForm: return "closed-form";
        case ProbeMethod::Quadrature: return "quadrature";
        case ProbeMethod::MonteCarlo: return "monte-carlo";
    }
    return "?";
}

namespace {

// Deterministic probes compare in log scale with a tiny relative slack.
bool log_violates(double log_observed, double log_bound) {
    return log_observed > log_bound + 1e-12 * std::max(1.0, std::abs(log_bound));
}

std::vector<double> probe_grid(double lo, double hi, int probes) {
    std::vector<double> out;
    if (probes <= 1) {
        out.push_back(hi);
        return out;
    }
    const double step = (hi - lo) / (probes - 1);
    for (int i = 0; i < probes; ++i) {
        out.push_back(i == probes - 1 ? hi : lo + step * i);
    }
    return out;
}

} // namespace

VerificationReport verify_certificate(const DistributionModel& model,
                                      const Certificate& cert,
                                      const VerificationBudget& budget,
                                      const std::vector<double>* presorted) {
    validate(model);
    validate(cert);
    if (budget.probes < 1) {
        throw DomainError("verify_certificate: probes must be >= 1");
    }

    VerificationReport report;
    report.certificate = cert;

    const double sigma = std::sqrt(cert.var_proxy);

    switch (cert.kind) {
        case CertKind::Mgf: {
            for (double lam : probe_grid(-6.0 / sigma, 6.0 / sigma, budget.probes)) {
                ProbeCheck c;
                c.probe = lam;
                c.method = ProbeMethod::ClosedForm;
                c.observed = analytic_mgf(model, lam);
                const double log_bound =
                    cert.log_prefactor + 0.5 * cert.var_proxy * lam * lam;
                c.bound = std::exp(log_bound);
                c.violation = log_violates(std::log(c.observed), log_bound);
                report.checks.push_back(c);
            }
            break;
        }
        case CertKind::PsiBound: {
            ProbeCheck c;
            c.probe = cert.var_proxy;
            c.method = std::holds_alternative<UniformModel>(model.family)
                           ? ProbeMethod::Quadrature
                           : ProbeMethod::ClosedForm;
            const PsiValue psi = analytic_psi(model, cert.var_proxy);
            c.observed = psi.value;
            c.bound = prefactor(cert).value;
            c.violation = psi.diverges || log_violates(std::log(c.observed),
                                                       cert.log_prefactor);
            report.checks.push_back(c);
            break;
        }
        case CertKind::EvenMoments: {
            const int kmax = std::min(budget.probes, 60);
            for (int k = 1; k <= kmax; ++k) {
                ProbeCheck c;
                c.probe = k;
                c.method = ProbeMethod::ClosedForm;
                c.observed = even_moment(model, k);
                const double log_bound = cert.log_prefactor +
                                         k * std::log(cert.var_proxy) +
                                         std::lgamma(k + 1.0);
                c.bound = log_bound < kLogDoubleMax ? std::exp(log_bound) : kInf;
                c.violation = log_violates(std::log(c.observed), log_bound);
                report.checks.push_back(c);
            }
            break;
        }
        case CertKind::TwoSidedTail:
        case CertKind::OneSidedTail: {
            if (budget.mc_samples < 100) {
                throw DomainError("verify_certificate: tail kinds need at least 100 "
                                  "Monte Carlo samples");
            }
            std::vector<double> local;
            const std::vector<double>* samples = presorted;
            if (samples == nullptr) {
                local = draw_samples(model, budget.seed, budget.mc_samples);
                std::sort(local.begin(), local.end());
                samples = &local;
            } else if (static_cast<std::int64_t>(samples->size()) != budget.mc_samples) {
                throw DomainError("verify_certificate: presorted sample size does not "
                                  "match budget.mc_samples");
            }
            const auto n = static_cast<double>(samples->size());

            for (double lam : probe_grid(0.0, 5.0, budget.probes)) {
                const double u = lam * sigma;
                const double log_bound = cert.log_prefactor - 0.5 * lam * lam;
                const double bound =
                    log_bound < kLogDoubleMax ? std::exp(log_bound) : kInf;

                const bool two_sided = cert.kind == CertKind::TwoSidedTail;
                ProbeCheck exact;
                exact.probe = lam;
                exact.method = ProbeMethod::ClosedForm;
                exact.bound = bound;
                exact.observed = two_sided ? two_sided_tail(model, u)
                                           : one_sided_max_tail(model, u);
                exact.violation =
                    exact.observed > bound * (1.0 + 1e-12) + 1e-300;
                report.checks.push_back(exact);

                const double n_ge =
                    static_cast<double>(samples->end() -
                                        std::lower_bound(samples->begin(),
                                                         samples->end(), u));
                const double n_le = static_cast<double>(
                    std::upper_bound(samples->begin(), samples->end(), -u) -
                    samples->begin());
                double emp = two_sided ? std::min(1.0, (n_ge + n_le) / n)
                                       : std::max(n_ge, n_le) / n;

                ProbeCheck mc;
                mc.probe = lam;
                mc.method = ProbeMethod::MonteCarlo;
                mc.bound = bound;
                mc.observed = emp;
                const double se = std::sqrt(std::max(emp * (1.0 - emp), 0.0) / n);
                mc.slack_std_errors = se > 0.0 ? (bound - emp) / se
                                               : (emp <= bound ? kInf : -kInf);
                mc.violation = emp > bound + 4.0 * se + 1e-12;
                report.checks.push_back(mc);
            }
            break;
        }
    }

    for (const auto& c : report.checks) report.violations += c.violation ? 1 : 0;
    return report;
}

// =====================================================================
// Martingale simulation
// =====================================================================

std::string generator_name(IncrementGenerator g) {
    return g == IncrementGenerator::RademacherCoords ? "rademacher-coords"
                                                     : "gaussian-coords";
}

MartingaleSimResult simulate_martingale(const MartingaleSimConfig& config,
                                        const std::vector<double>& thresholds) {
    validate(config.spec);
    validate_thresholds(thresholds);
    if (config.trials < 1000) {
        throw DomainError("simulate_martingale: needs at least 1000 trials");
    }

    const int d = config.spec.dimension;
    const std::size_t n_steps = config.spec.step_proxies.size();
    const std::size_t n_thresh = thresholds.size();
    const double denom = std::sqrt(total_proxy(config.spec));
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

    // Per-step coordinate scales for each generator.
    constexpr double kGaussVar = 0.43233235838169365; // (1 - e^{-2}) / 2
    std::vector<double> scale(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double s = std::sqrt(config.spec.step_proxies[i]);
        scale[i] = config.generator == IncrementGenerator::RademacherCoords
                       ? s * inv_sqrt_d
                       : s * std::sqrt(kGaussVar) * inv_sqrt_d;
    }

    const int workers = detail::thread_budget(config.threads);
    const int max_chunks =
        static_cast<int>(std::min<std::int64_t>(workers, config.trials));
    std::vector<std::vector<std::int64_t>> norm_counts(
        static_cast<std::size_t>(max_chunks), std::vector<std::int64_t>(n_thresh, 0));
    std::vector<std::vector<std::int64_t>> dir_counts = norm_counts;

    detail::parallel_chunks(
        config.trials, workers,
        [&](int w, std::int64_t lo, std::int64_t hi) {
            std::vector<double> sums(static_cast<std::size_t>(d));
            auto& ncnt = norm_counts[static_cast<std::size_t>(w)];
            auto& dcnt = dir_counts[static_cast<std::size_t>(w)];
            for (std::int64_t trial = lo; trial < hi; ++trial) {
                std::fill(sums.begin(), sums.end(), 0.0);
                const auto tkey = static_cast<std::uint64_t>(trial);
                for (std::size_t i = 0; i < n_steps; ++i) {
                    for (int j = 0; j < d; ++j) {
                        const auto jkey = static_cast<std::uint64_t>(j);
                        const double draw =
                            config.generator == IncrementGenerator::RademacherCoords
                                ? counter_sign(config.seed, tkey, i, jkey)
                                : counter_normal(config.seed, tkey, i, jkey);
                        sums[static_cast<std::size_t>(j)] += scale[i] * draw;
                    }
                }
                double norm_sq = 0.0;
                for (double v : sums) norm_sq += v * v;
                const double r = std::sqrt(norm_sq) / denom;
                const double proj = sums[0] / denom;
                for (std::size_t k = 0; k < n_thresh; ++k) {
                    if (r >= thresholds[k]) ++ncnt[k];
                    if (proj >= thresholds[k]) ++dcnt[k];
                }
            }
        });

    MartingaleSimResult result;
    result.norm_curve.resize(n_thresh);
    result.direction_curve.resize(n_thresh);
    const auto trials = static_cast<double>(config.trials);
    for (std::size_t k = 0; k < n_thresh; ++k) {
        std::int64_t nc = 0, dc = 0;
        for (int w = 0; w < max_chunks; ++w) {
            nc += norm_counts[static_cast<std::size_t>(w)][k];
            dc += dir_counts[static_cast<std::size_t>(w)][k];
        }
        const double nf = static_cast<double>(nc) / trials;
        const double df = static_cast<double>(dc) / trials;
        result.norm_curve[k] =
            EmpiricalPoint{thresholds[k], nf, std::sqrt(nf * (1.0 - nf) / trials)};
        result.direction_curve[k] =
            EmpiricalPoint{thresholds[k], df, std::sqrt(df * (1.0 - df) / trials)};
    }
    return result;
}

} // namespace subg
