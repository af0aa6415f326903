#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subg/transform.hpp"

using namespace subg;

namespace {
const double kLn2 = std::log(2.0);

doctest::Approx near(double v, double eps = 1e-12) {
    return doctest::Approx(v).epsilon(eps);
}

VariableContext centered_ctx(SignConstraint sign = SignConstraint::Unconstrained) {
    VariableContext ctx;
    ctx.sign = sign;
    ctx.mean_is_zero = true;
    return ctx;
}

bool has_candidate_near(const BestCenteringResult& r, double vp, double rel = 1e-9) {
    return std::any_of(r.candidates.begin(), r.candidates.end(),
                       [&](const CenteringRouteCandidate& c) {
                           return std::abs(c.var_proxy - vp) <= rel * vp;
                       });
}
} // namespace

TEST_CASE("centering requires a zero mean") {
    VariableContext ctx;
    ctx.mean_is_zero = false;
    CHECK_THROWS_AS(center({CertKind::Mgf, 1.0, 0.5}, ctx), MeanNotZeroError);
}

TEST_CASE("centering a psi certificate picks the matching branch") {
    const auto ctx = centered_ctx();

    CenteringResult r = center({CertKind::PsiBound, 1.0, 0.1}, ctx);
    CHECK(r.branch == CenterBranch::PsiLow);
    CHECK(r.certificate.kind == CertKind::Mgf);
    CHECK(r.certificate.log_prefactor == 0.0);
    CHECK(r.certificate.var_proxy == near(0.5 + 9.0 / 8.0 * 0.1));

    r = center({CertKind::PsiBound, 1.0, 1.0}, ctx);
    CHECK(r.branch == CenterBranch::PsiMid);
    CHECK(r.certificate.var_proxy == near(1.5));

    r = center({CertKind::PsiBound, 1.0, 2.0}, ctx);
    CHECK(r.branch == CenterBranch::PsiHigh);
    CHECK(r.certificate.var_proxy == near(2.25));

    // The multiplier rides on the input proxy.
    r = center({CertKind::PsiBound, 3.0, 1.0}, ctx);
    CHECK(r.certificate.var_proxy == near(4.5));
}

TEST_CASE("psi branches agree at their seams") {
    const double lo = 4.0 / 9.0;
    const double hi = 16.0 / 9.0;
    CHECK(std::abs(centering::psi_factor_low(lo) - centering::psi_factor_mid(lo)) <=
          1e-12);
    CHECK(std::abs(centering::psi_factor_mid(hi) - centering::psi_factor_high(hi)) <=
          1e-12);
    CHECK(centering::psi_factor_low(lo) == near(1.0));
    CHECK(centering::psi_factor_high(hi) == near(2.0));
}

TEST_CASE("centering a moment certificate reproduces the worked ratios") {
    const auto ctx = centered_ctx();

    // sigma'/sigma2 = 0.803, 1.18, 3.23 for rho2 = 5e-3, 1, 10.
    CenteringResult r = center({CertKind::EvenMoments, 1.0, std::log(5e-3)}, ctx);
    CHECK(r.branch == CenterBranch::MomentsLow);
    CHECK(r.certificate.var_proxy == near(29.0 / 45.0));
    CHECK(std::sqrt(r.certificate.var_proxy) ==
          doctest::Approx(0.8028).epsilon(1.5e-3));

    r = center({CertKind::EvenMoments, 1.0, 0.0}, ctx);
    CHECK(r.branch == CenterBranch::MomentsHigh);
    CHECK(r.certificate.var_proxy == near(1.3729666273328787));
    CHECK(std::sqrt(r.certificate.var_proxy) ==
          doctest::Approx(1.1718).epsilon(1e-3));

    r = center({CertKind::EvenMoments, 1.0, std::log(10.0)}, ctx);
    CHECK(r.certificate.var_proxy == near(10.424288464161366));
    CHECK(std::sqrt(r.certificate.var_proxy) ==
          doctest::Approx(3.2287).epsilon(1e-3));
}

TEST_CASE("moment branches agree at the seam") {
    const double seam = 29.0 / 90.0;
    const double lo = centering::moments_factor_low();
    const double hi = centering::moments_factor_high(seam);
    CHECK(std::abs(lo - hi) <= 1e-12 * lo);
    CHECK(lo == near(29.0 / 45.0));

    // A degenerate moment certificate still centers.
    const CenteringResult r =
        center({CertKind::EvenMoments, 2.0,
                -std::numeric_limits<double>::infinity()},
               centered_ctx());
    CHECK(r.branch == CenterBranch::MomentsLow);
    CHECK(r.certificate.var_proxy == near(2.0 * 29.0 / 45.0));
}

TEST_CASE("centering tail certificates") {
    const auto ctx = centered_ctx();
    const double expected = (8.0 + 7.0 * kLn2) / 3.0;

    CenteringResult r = center({CertKind::TwoSidedTail, 1.0, kLn2}, ctx);
    CHECK(r.branch == CenterBranch::Tail);
    CHECK(r.certificate.var_proxy == near(expected));

    // One-sided at rho = 1 folds to a two-sided prefactor of 2 when the sign
    // is unconstrained, and stays put when one-signed.
    r = center({CertKind::OneSidedTail, 1.0, 0.0}, ctx);
    CHECK(r.branch == CenterBranch::TailFromOneSided);
    CHECK(r.certificate.var_proxy == near(expected));

    r = center({CertKind::OneSidedTail, 1.0, 0.0},
               centered_ctx(SignConstraint::OneSigned));
    CHECK(r.certificate.var_proxy == near(8.0 / 3.0));

    // A sub-unit one-signed prefactor is weakened up to the floor rather
    // than fed into the series where it would be unsound.
    r = center({CertKind::OneSidedTail, 1.0, std::log(0.5)},
               centered_ctx(SignConstraint::OneSigned));
    CHECK(r.certificate.var_proxy == near(8.0 / 3.0));
}

TEST_CASE("centering an mgf certificate") {
    const auto ctx = centered_ctx();

    SUBCASE("unit prefactor bypasses untouched") {
        const CenteringResult r = center({CertKind::Mgf, 1.7, 0.0}, ctx);
        CHECK(r.branch == CenterBranch::MgfBypass);
        CHECK(r.certificate.var_proxy == 1.7);
        CHECK(r.certificate.log_prefactor == 0.0);
    }
    SUBCASE("surd formula at ln rho = 1") {
        const CenteringResult r = center({CertKind::Mgf, 1.0, 1.0}, ctx);
        CHECK(r.branch == CenterBranch::MgfGeneral);
        CHECK(r.certificate.var_proxy == near(5.0974298442930433));
    }
    SUBCASE("factor tends to 9/8 as the prefactor tends to 1") {
        const CenteringResult r = center({CertKind::Mgf, 1.0, 1e-6}, ctx);
        CHECK(r.certificate.var_proxy == near(1.1273877982179234, 1e-9));
        CHECK(std::abs(r.certificate.var_proxy - 1.125) < 1e-2);
    }
}

TEST_CASE("best-route centering beats the direct branch for small rho2") {
    const BestCenteringResult r = center_via_best_route(
        {CertKind::EvenMoments, 1.0, std::log(5e-3)}, centered_ctx());

    CHECK(r.best.certificate.var_proxy < 29.0 / 45.0);
    const double ratio = std::sqrt(r.best.certificate.var_proxy);
    CHECK(ratio > 0.780);
    CHECK(ratio < 0.784);

    // Candidate list keeps both the direct branch and the lambda = 0.9
    // psi detour visible.
    CHECK(has_candidate_near(r, 29.0 / 45.0));
    CHECK(has_candidate_near(r, 0.6105766623265235));
}

TEST_CASE("best-route centering candidates include the psi detour values") {
    BestCenteringResult r = center_via_best_route(
        {CertKind::EvenMoments, 1.0, 0.0}, centered_ctx());
    // Direct wins at rho2 = 1 ...
    CHECK(r.best.certificate.var_proxy == near(1.3729666273328787, 1e-9));
    // ... but the lambda = 0.9 candidate matches 1.70^2 sigma2^2.
    CHECK(has_candidate_near(r, 2.8782313662425571));
    CHECK(std::sqrt(2.8782313662425571) == doctest::Approx(1.70).epsilon(6e-3));

    r = center_via_best_route({CertKind::EvenMoments, 1.0, std::log(10.0)},
                              centered_ctx());
    CHECK(has_candidate_near(r, 5.6385743831460626));
    CHECK(std::sqrt(5.6385743831460626) == doctest::Approx(2.38).epsilon(5e-3));
    // The tuned psi route beats both the direct branch and the decile choice.
    CHECK(r.best.certificate.var_proxy < 5.6385743831460626);
}

TEST_CASE("best-route centering never loses to the direct branch") {
    for (double lr : {-5.0, -1.0, 0.0, 0.5, 2.0}) {
        const Certificate cert{CertKind::EvenMoments, 1.0, lr};
        const double direct = center(cert, centered_ctx()).certificate.var_proxy;
        const BestCenteringResult r = center_via_best_route(cert, centered_ctx());
        CHECK(r.best.certificate.var_proxy <= direct + 1e-12);
    }
}

TEST_CASE("shift with zero offset is the identity") {
    const Certificate cert{CertKind::Mgf, 1.0, 0.5};
    ShiftParams params;
    params.c = 0.0;
    const ShiftResult r = shift(cert, params);
    CHECK(r.certificate == cert);
    CHECK(r.x == 0.0);
    CHECK_FALSE(r.x_at_bound);
}

TEST_CASE("shift with an explicit slack") {
    ShiftParams params;
    params.c = 1.0;
    params.x = 1.0;
    const ShiftResult r = shift({CertKind::Mgf, 1.0, 0.0}, params);
    CHECK(r.certificate.var_proxy == near(2.0));
    CHECK(r.certificate.log_prefactor == near(0.5));

    params.c = -1.0; // only |c| matters
    const ShiftResult neg = shift({CertKind::Mgf, 1.0, 0.0}, params);
    CHECK(neg.certificate.log_prefactor == near(0.5));
}

TEST_CASE("shift rejects bad inputs") {
    ShiftParams params;
    params.c = 1.0;
    params.x = 0.0;
    CHECK_THROWS_AS(shift({CertKind::Mgf, 1.0, 0.0}, params), DomainError);
    params.x = -1.0;
    CHECK_THROWS_AS(shift({CertKind::Mgf, 1.0, 0.0}, params), DomainError);
    params.x = 1.0;
    CHECK_THROWS_AS(shift({CertKind::PsiBound, 1.0, 0.0}, params), DomainError);
}

TEST_CASE("automatic shift slack lands on the interior optimum") {
    // Minimizing ln rho' - t^2 / (2 sigma^2 (1 + x)) over x gives
    // x* = |c| / (t - |c|) when that is interior; c = 1, t = 3 => x* = 1/2.
    ShiftParams params;
    params.c = 1.0;
    params.threshold = 3.0;
    const ShiftResult r = shift({CertKind::Mgf, 1.0, 0.0}, params);
    CHECK_FALSE(r.x_at_bound);
    CHECK(r.x == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.certificate.var_proxy == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(r.certificate.log_prefactor == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("automatic shift slack reports a boundary hit") {
    // t barely above |c| pushes x* = |c|/(t - |c|) = 100 past the cap.
    ShiftParams params;
    params.c = 1.0;
    params.threshold = 1.01;
    const ShiftResult r = shift({CertKind::Mgf, 1.0, 0.0}, params);
    CHECK(r.x_at_bound);
    CHECK(r.x == doctest::Approx(64.0).epsilon(1e-6));
}

TEST_CASE("automatic shift never loses to a fixed grid") {
    ShiftParams params;
    params.c = 0.7;
    params.threshold = 2.5;
    const Certificate cert{CertKind::Mgf, 1.3, 0.2};
    const ShiftResult r = shift(cert, params);
    const double score_auto =
        r.certificate.log_prefactor -
        params.threshold.value() * params.threshold.value() /
            (2.0 * r.certificate.var_proxy);
    for (int g = 1; g <= 1000; ++g) {
        ShiftParams fixed = params;
        fixed.x = 64.0 * g / 1000.0;
        const ShiftResult f = shift(cert, fixed);
        const double score =
            f.certificate.log_prefactor -
            params.threshold.value() * params.threshold.value() /
                (2.0 * f.certificate.var_proxy);
        CHECK(score_auto <= score + 1e-9);
    }
}

TEST_CASE("recentering a unit-prefactor certificate is a no-op") {
    const Certificate cert{CertKind::Mgf, 1.0, 0.0};
    const CenteringResult out = recentering_equivalence(cert, 0.0);
    CHECK(out.certificate == cert);
    CHECK(out.branch == CenterBranch::MgfBypass);
}

TEST_CASE("recentering evaluates the surd formula at ln rho = 1") {
    const Certificate out =
        recentering_equivalence({CertKind::Mgf, 1.0, 1.0}, 0.0).certificate;
    CHECK(out.kind == CertKind::Mgf);
    CHECK(out.log_prefactor == 0.0);
    CHECK(out.var_proxy == near(5.0974298442930433));
}

TEST_CASE("recentering with a nonzero mean composes shift and center") {
    const Certificate cert{CertKind::Mgf, 1.0, 0.0};
    const Certificate out = recentering_equivalence(cert, 0.5, 1.0).certificate;

    ShiftParams params;
    params.c = -0.5;
    params.x = 1.0;
    const Certificate shifted = shift(cert, params).certificate;
    const Certificate reference = center(shifted, centered_ctx()).certificate;
    CHECK(out == reference);
    CHECK(out.log_prefactor == 0.0);
    CHECK(out.var_proxy > 1.0);
}

TEST_CASE("recentering accepts any certificate kind") {
    const Certificate out =
        recentering_equivalence({CertKind::PsiBound, 1.0, kLn2}, 0.0).certificate;
    CHECK(out.kind == CertKind::Mgf);
    CHECK(out.log_prefactor == 0.0);
    CHECK(std::isfinite(out.var_proxy));
    // Deterministic: same inputs, same route, same numbers.
    CHECK(recentering_equivalence({CertKind::PsiBound, 1.0, kLn2}, 0.0).certificate ==
          out);
}

TEST_CASE("dependent sums add standard deviations") {
    const std::vector<Certificate> certs = {{CertKind::Mgf, 1.0, 0.0},
                                            {CertKind::Mgf, 4.0, kLn2}};
    const Certificate out = sum_dependent(certs);
    CHECK(out.kind == CertKind::Mgf);
    CHECK(out.var_proxy == near(9.0));
    CHECK(out.log_prefactor == near(2.0 * kLn2 / 3.0));

    const std::vector<Certificate> swapped = {certs[1], certs[0]};
    CHECK(sum_dependent(swapped) == out);
}

TEST_CASE("independent sums add proxies and prefactors") {
    const std::vector<Certificate> certs = {{CertKind::Mgf, 1.0, 0.0},
                                            {CertKind::Mgf, 4.0, kLn2}};
    const Certificate out = sum_independent(certs);
    CHECK(out.var_proxy == near(5.0));
    CHECK(out.log_prefactor == near(kLn2));
}

TEST_CASE("max takes the worst proxy and the union prefactor") {
    const std::vector<Certificate> certs = {{CertKind::Mgf, 1.0, 0.0},
                                            {CertKind::Mgf, 4.0, kLn2}};
    const Certificate out = max_of(certs);
    CHECK(out.var_proxy == near(4.0));
    CHECK(out.log_prefactor == near(std::log(3.0)));
}

TEST_CASE("closures validate their inputs") {
    CHECK_THROWS_AS(sum_dependent({}), EmptyListError);
    CHECK_THROWS_AS(sum_independent({}), EmptyListError);
    CHECK_THROWS_AS(max_of({}), EmptyListError);
    const std::vector<Certificate> mixed = {{CertKind::Mgf, 1.0, 0.0},
                                            {CertKind::PsiBound, 1.0, 0.0}};
    CHECK_THROWS_AS(sum_dependent(mixed), DomainError);
    CHECK_THROWS_AS(max_of(mixed), DomainError);

    const std::vector<Certificate> single = {{CertKind::Mgf, 2.0, 0.3}};
    CHECK(sum_dependent(single) == single[0]);
    CHECK(sum_independent(single) == single[0]);
    CHECK(max_of(single) == single[0]);
}

TEST_CASE("psi combinations") {
    const std::vector<Certificate> certs = {{CertKind::PsiBound, 1.0, 0.2},
                                            {CertKind::PsiBound, 4.0, 0.5}};

    Certificate out = psi_combine(certs, PsiCombineMode::SumAbs);
    CHECK(out.kind == CertKind::PsiBound);
    CHECK(out.var_proxy == near(9.0));
    CHECK(out.log_prefactor == near((0.2 + 2.0 * 0.5) / 3.0));

    out = psi_combine(certs, PsiCombineMode::SqrtSumSq);
    CHECK(out.var_proxy == near(5.0));
    CHECK(out.log_prefactor == near((0.2 + 4.0 * 0.5) / 5.0));

    out = psi_combine(certs, PsiCombineMode::IndependentSum);
    CHECK(out.var_proxy == near(5.0));
    CHECK(out.log_prefactor == near(0.7));

    CHECK_THROWS_AS(psi_combine({}, PsiCombineMode::SumAbs), EmptyListError);
    CHECK_THROWS_AS(psi_combine({{CertKind::Mgf, 1.0, 0.0}}, PsiCombineMode::SumAbs),
                    DomainError);
}

TEST_CASE("psi combination mode names round-trip") {
    for (PsiCombineMode m : {PsiCombineMode::SumAbs, PsiCombineMode::SqrtSumSq,
                             PsiCombineMode::IndependentSum}) {
        CHECK(psi_combine_mode_from_name(psi_combine_mode_name(m)) == m);
    }
    CHECK_THROWS_AS(psi_combine_mode_from_name("nope"), SchemaError);
}
