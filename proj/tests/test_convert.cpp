#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "subg/convert.hpp"
#include "subg/rng.hpp"

using namespace subg;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

doctest::Approx near(double v, double eps = 1e-12) {
    return doctest::Approx(v).epsilon(eps);
}

const CertKind kAllKinds[] = {CertKind::TwoSidedTail, CertKind::EvenMoments,
                              CertKind::PsiBound, CertKind::Mgf,
                              CertKind::OneSidedTail};
} // namespace

TEST_CASE("table shape") {
    CHECK(conversion_table(SignConstraint::Unconstrained).size() == 20);
    CHECK(conversion_table(SignConstraint::OneSigned).size() == 12);
    // Ordered scan: every off-diagonal pair appears exactly once.
    for (CertKind from : kAllKinds) {
        for (CertKind to : kAllKinds) {
            if (from == to) {
                CHECK_THROWS_AS(find_edge(from, to, SignConstraint::Unconstrained),
                                NoSuchEdgeError);
            } else {
                CHECK_NOTHROW(find_edge(from, to, SignConstraint::Unconstrained));
            }
        }
    }
    // The one-sided kind is merged away in the signed regime.
    CHECK_THROWS_AS(
        find_edge(CertKind::OneSidedTail, CertKind::Mgf, SignConstraint::OneSigned),
        NoSuchEdgeError);
    CHECK_THROWS_AS(
        find_edge(CertKind::Mgf, CertKind::OneSidedTail, SignConstraint::OneSigned),
        NoSuchEdgeError);
}

TEST_CASE("lambda-free edges") {
    const auto u = SignConstraint::Unconstrained;

    SUBCASE("tail2 to moments doubles the proxy") {
        const Certificate out =
            direct_convert({CertKind::TwoSidedTail, 1.5, 0.25}, CertKind::EvenMoments, u);
        CHECK(out.var_proxy == near(3.0));
        CHECK(out.log_prefactor == near(0.25));
    }
    SUBCASE("psi to tail2 halves the proxy") {
        const Certificate out =
            direct_convert({CertKind::PsiBound, 2.0, std::log(3.0)}, CertKind::TwoSidedTail, u);
        CHECK(out.var_proxy == near(1.0));
        CHECK(out.log_prefactor == near(std::log(3.0)));
    }
    SUBCASE("mgf to tail2 doubles the prefactor when signs are unconstrained") {
        const Certificate out =
            direct_convert({CertKind::Mgf, 1.0, 0.3}, CertKind::TwoSidedTail, u);
        CHECK(out.var_proxy == near(1.0));
        CHECK(out.log_prefactor == near(0.3 + kLn2));
    }
    SUBCASE("mgf to tail2 keeps the prefactor when one-signed") {
        const Certificate out = direct_convert({CertKind::Mgf, 1.0, 0.3},
                                               CertKind::TwoSidedTail,
                                               SignConstraint::OneSigned);
        CHECK(out.var_proxy == near(1.0));
        CHECK(out.log_prefactor == near(0.3));
    }
    SUBCASE("one-sided tail folds into two-sided at twice the prefactor") {
        const Certificate out = direct_convert(
            {CertKind::OneSidedTail, 1.0, std::log(0.6)}, CertKind::TwoSidedTail, u);
        CHECK(out.var_proxy == near(1.0));
        CHECK(out.log_prefactor == near(std::log(1.2)));
    }
    SUBCASE("mgf to one-sided tail is free") {
        const Certificate out =
            direct_convert({CertKind::Mgf, 2.0, 0.1}, CertKind::OneSidedTail, u);
        CHECK(out.var_proxy == near(2.0));
        CHECK(out.log_prefactor == near(0.1));
    }
    SUBCASE("psi to moments subtracts one from the prefactor") {
        const Certificate out =
            direct_convert({CertKind::PsiBound, 1.0, kLn2}, CertKind::EvenMoments, u);
        CHECK(out.var_proxy == near(1.0));
        CHECK(out.log_prefactor == near(0.0));
    }
    SUBCASE("psi at the floor yields the degenerate moment certificate") {
        const Certificate out =
            direct_convert({CertKind::PsiBound, 1.0, 0.0}, CertKind::EvenMoments, u);
        CHECK(out.log_prefactor == -kInf);
    }
}

TEST_CASE("parameterized edges at pinned lambda") {
    const auto u = SignConstraint::Unconstrained;

    SUBCASE("tail2 to psi") {
        const Certificate out = direct_convert({CertKind::TwoSidedTail, 1.0, kLn2},
                                               CertKind::PsiBound, u, 0.5);
        CHECK(out.var_proxy == near(4.0));
        CHECK(out.log_prefactor == near(0.5 * kLn2 + kLn2));
    }
    SUBCASE("moments to psi reproduces the geometric series bound") {
        const Certificate out = direct_convert({CertKind::EvenMoments, 1.0, 0.0},
                                               CertKind::PsiBound, u, 0.9);
        CHECK(out.var_proxy == near(1.0 / 0.9));
        CHECK(out.log_prefactor == near(std::log(10.0)));
    }
    SUBCASE("mgf to psi takes the smaller of the two envelopes") {
        const Certificate out =
            direct_convert({CertKind::Mgf, 1.0, 0.0}, CertKind::PsiBound, u, 0.5);
        CHECK(out.var_proxy == near(4.0));
        CHECK(out.log_prefactor == near(0.5 * kLn2));
    }
    SUBCASE("mgf to psi, one-signed variant") {
        const Certificate out = direct_convert(
            {CertKind::Mgf, 1.0, 0.0}, CertKind::PsiBound, SignConstraint::OneSigned, 0.5);
        CHECK(out.var_proxy == near(4.0));
        CHECK(out.log_prefactor == near(0.5 * kLn2));
    }
    SUBCASE("one-sided tail to mgf") {
        const Certificate out = direct_convert({CertKind::OneSidedTail, 1.0, 0.0},
                                               CertKind::Mgf, u, 0.5);
        CHECK(out.var_proxy == near(2.0));
        CHECK(out.log_prefactor == near(1.5 * kLn2));
    }
    SUBCASE("degenerate moment prefactor flows through the geometric form") {
        const Certificate out = direct_convert({CertKind::EvenMoments, 1.0, -kInf},
                                               CertKind::TwoSidedTail, u, 0.5);
        CHECK(out.var_proxy == near(1.0));
        CHECK(out.log_prefactor == 0.0);
    }
}

TEST_CASE("lambda argument discipline") {
    const auto u = SignConstraint::Unconstrained;
    const Certificate tail{CertKind::TwoSidedTail, 1.0, kLn2};

    CHECK_THROWS_AS(direct_convert(tail, CertKind::PsiBound, u), MissingLambdaError);
    CHECK_THROWS_AS(direct_convert(tail, CertKind::EvenMoments, u, 0.5),
                    UnexpectedLambdaError);
    CHECK_THROWS_AS(direct_convert(tail, CertKind::PsiBound, u, 0.0), DomainError);
    CHECK_THROWS_AS(direct_convert(tail, CertKind::PsiBound, u, 1.0), DomainError);
    CHECK_THROWS_AS(direct_convert(tail, CertKind::PsiBound, u, -0.2), DomainError);
    CHECK_THROWS_AS(direct_convert(tail, CertKind::PsiBound, u,
                                   std::numeric_limits<double>::quiet_NaN()),
                    DomainError);
}

TEST_CASE("identity conversion keeps the certificate") {
    const Certificate cert{CertKind::PsiBound, 2.0, 0.5};
    CHECK(convert_identity(cert) == cert);
    CHECK_THROWS_AS(convert_identity({CertKind::PsiBound, -1.0, 0.5}), DomainError);
}

TEST_CASE("every edge preserves the target domain") {
    // Edge outputs must themselves validate, across regimes, prefactor
    // extremes, and the whole open lambda interval.
    for (SignConstraint regime :
         {SignConstraint::Unconstrained, SignConstraint::OneSigned}) {
        for (const ConversionEdge& edge : conversion_table(regime)) {
            for (int i = 0; i < 400; ++i) {
                const std::uint64_t t = static_cast<std::uint64_t>(i);
                const double vp = 1e-3 + 10.0 * counter_uniform01(7, t, 0, 0);
                const double floor = min_log_prefactor(edge.from);
                double lr = 6.0 * counter_uniform01(7, t, 1, 0);
                lr = std::isinf(floor) ? lr - 3.0 : floor + lr;
                if (i % 17 == 0) lr = floor; // pin the boundary case
                if (std::isinf(floor) && i % 17 == 0) lr = -kInf;
                const Certificate in{edge.from, vp, lr};
                std::optional<double> lambda;
                if (edge.has_lambda) {
                    lambda = 1e-9 + (1 - 2e-9) * counter_uniform01(7, t, 2, 0);
                }
                const Certificate out = direct_convert(in, edge.to, regime, lambda);
                CHECK_NOTHROW(validate(out));
                CHECK(out.kind == edge.to);
            }
        }
    }
}

TEST_CASE("phi is monotone in the prefactor") {
    for (SignConstraint regime :
         {SignConstraint::Unconstrained, SignConstraint::OneSigned}) {
        for (const ConversionEdge& edge : conversion_table(regime)) {
            for (int i = 0; i < 200; ++i) {
                const std::uint64_t t = static_cast<std::uint64_t>(i);
                const double floor = min_log_prefactor(edge.from);
                const double base = std::isinf(floor) ? -3.0 : floor;
                const double a = base + 5.0 * counter_uniform01(11, t, 0, 0);
                const double b = a + 3.0 * counter_uniform01(11, t, 1, 0);
                std::optional<double> lambda;
                if (edge.has_lambda) {
                    lambda = 0.01 + 0.98 * counter_uniform01(11, t, 2, 0);
                }
                const Certificate lo =
                    direct_convert({edge.from, 1.0, a}, edge.to, regime, lambda);
                const Certificate hi =
                    direct_convert({edge.from, 1.0, b}, edge.to, regime, lambda);
                CHECK(lo.log_prefactor <= hi.log_prefactor + 1e-12);
            }
        }
    }
}

TEST_CASE("moment bound from a two-sided tail") {
    const Certificate tail{CertKind::TwoSidedTail, 1.0, 1.0}; // rho = e
    CHECK(moment_bound_from_tail(tail, 1) == near(4.0));
    CHECK(moment_bound_from_tail(tail, 2) == near(20.0));
    CHECK(moment_bound_from_tail(tail, 3) == near(128.0));
    CHECK(std::isinf(moment_bound_from_tail(tail, 171)));
    CHECK_THROWS_AS(moment_bound_from_tail(tail, 0), DomainError);
    CHECK_THROWS_AS(moment_bound_from_tail({CertKind::Mgf, 1.0, 1.0}, 1),
                    DomainError);
}

TEST_CASE("path text") {
    ConversionPath path;
    CHECK(path.text() == "identity");
    path.steps = {{CertKind::PsiBound, CertKind::EvenMoments},
                  {CertKind::EvenMoments, CertKind::Mgf}};
    CHECK(path.text() == "(4)<-(2)<-(3)");
}

TEST_CASE("best conversion under the proxy objective picks the direct edge") {
    const Certificate psi{CertKind::PsiBound, 1.0, kLn2};
    const BestConversion best = best_convert(psi, CertKind::Mgf,
                                             SignConstraint::Unconstrained,
                                             Objective::min_var_proxy());
    CHECK(best.certificate.var_proxy == near(0.5));
    CHECK(best.certificate.log_prefactor == near(kLn2));
    CHECK(best.path.text() == "(4)<-(3)");
    CHECK_FALSE(best.path.at_lambda_bound);
}

TEST_CASE("best conversion under a capped prefactor objective routes via moments") {
    const Certificate psi{CertKind::PsiBound, 1.0, kLn2};
    Objective obj = Objective::min_prefactor(2.0);
    const BestConversion best =
        best_convert(psi, CertKind::Mgf, SignConstraint::Unconstrained, obj);
    // Geometric envelope at the feasibility boundary lambda = 1/4.
    CHECK(best.path.text() == "(4)<-(2)<-(3)");
    CHECK(best.certificate.var_proxy <= 2.0 + 1e-12);
    CHECK(best.certificate.var_proxy == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(best.certificate.log_prefactor ==
          doctest::Approx(0.28768207245178092).epsilon(1e-6));
}

TEST_CASE("identity wins when source and target kinds coincide") {
    const Certificate cert{CertKind::Mgf, 1.0, 0.25};
    const BestConversion best = best_convert(cert, CertKind::Mgf,
                                             SignConstraint::Unconstrained,
                                             Objective::min_var_proxy());
    CHECK(best.path.steps.empty());
    CHECK(best.certificate == cert);
}

TEST_CASE("uncapped prefactor objective degenerates to the lambda clamp") {
    const Certificate tail{CertKind::TwoSidedTail, 1.0, kLn2};
    const BestConversion best = best_convert(tail, CertKind::Mgf,
                                             SignConstraint::Unconstrained,
                                             Objective::min_var_proxy());
    // vp -> c^2/lambda is minimized toward lambda -> 1, so the clamp reports.
    CHECK(best.path.at_lambda_bound);
    CHECK(best.certificate.var_proxy <= 1.0 / (1.0 - 2e-9) * 0.5 * 2.0 + 1e-6);
}

TEST_CASE("routed search dominates single-edge grids") {
    // The optimizer must never lose to a brute-force lambda grid on the
    // direct edge, for either score component it optimizes.
    const auto u = SignConstraint::Unconstrained;
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
        const std::uint64_t t = static_cast<std::uint64_t>(i);
        const auto from = kAllKinds[counter_bits(3, t, 0, 0) % 5];
        const auto to = kAllKinds[counter_bits(3, t, 1, 0) % 5];
        if (from == to) continue;
        const double vp = 0.2 + 3.0 * counter_uniform01(3, t, 2, 0);
        const double floor = min_log_prefactor(from);
        const double lr =
            (std::isinf(floor) ? -1.0 : floor) + 2.0 * counter_uniform01(3, t, 3, 0);
        const Certificate cert{from, vp, lr};
        const double threshold = 1.0 + 4.0 * counter_uniform01(3, t, 4, 0);

        const BestConversion best =
            best_convert(cert, to, u, Objective::min_tail_at(threshold));
        const double best_score =
            best.certificate.log_prefactor -
            threshold * threshold / (2.0 * best.certificate.var_proxy);

        const ConversionEdge& edge = find_edge(from, to, u);
        double grid_best = kInf;
        if (edge.has_lambda) {
            for (int g = 1; g < 1000; ++g) {
                const Certificate out =
                    direct_convert(cert, to, u, static_cast<double>(g) / 1000.0);
                grid_best = std::min(grid_best,
                                     out.log_prefactor -
                                         threshold * threshold / (2.0 * out.var_proxy));
            }
        } else {
            const Certificate out = direct_convert(cert, to, u);
            grid_best = out.log_prefactor -
                        threshold * threshold / (2.0 * out.var_proxy);
        }
        CHECK(best_score <= grid_best + 1e-9);
        ++checked;
    }
    CHECK(checked >= 25);
}

TEST_CASE("apply_path reproduces the optimizer result") {
    const Certificate cert{CertKind::TwoSidedTail, 1.7, 0.9};
    const BestConversion best = best_convert(cert, CertKind::Mgf,
                                             SignConstraint::Unconstrained,
                                             Objective::min_tail_at(3.0));
    const Certificate replay =
        apply_path(cert, best.path, SignConstraint::Unconstrained);
    CHECK(replay.var_proxy == near(best.certificate.var_proxy, 1e-15));
    CHECK(replay.log_prefactor == near(best.certificate.log_prefactor, 1e-15));
}

TEST_CASE("table consistency in both regimes") {
    for (SignConstraint regime :
         {SignConstraint::Unconstrained, SignConstraint::OneSigned}) {
        const TableConsistencyReport report =
            table_consistency_report(regime, default_table_samples());
        CHECK(report.all_pass);
        for (const auto& entry : report.entries) {
            CHECK(entry.pass);
            if (!entry.dagger) {
                CHECK(entry.max_rel_err <= 1e-12);
                CHECK(entry.witness.find("<-") != std::string::npos);
            }
        }
    }
}

TEST_CASE("table samples outside the admissible region are rejected") {
    CHECK_THROWS_AS(
        table_consistency_report(SignConstraint::Unconstrained, {{0.0, 2.0}}),
        DomainError);
    CHECK_THROWS_AS(
        table_consistency_report(SignConstraint::Unconstrained, {{0.5, 0.5}}),
        DomainError);
}
