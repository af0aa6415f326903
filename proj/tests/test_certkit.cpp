#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "subg/certificate.hpp"
#include "subg/serialize.hpp"

using namespace subg;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

TEST_CASE("kind names round-trip") {
    for (CertKind k : {CertKind::TwoSidedTail, CertKind::EvenMoments,
                       CertKind::PsiBound, CertKind::Mgf, CertKind::OneSidedTail}) {
        CHECK(kind_from_name(kind_name(k)) == k);
    }
    CHECK(kind_name(CertKind::TwoSidedTail) == "tail2");
    CHECK(kind_name(CertKind::EvenMoments) == "moments");
    CHECK(kind_name(CertKind::PsiBound) == "psi");
    CHECK(kind_name(CertKind::Mgf) == "mgf");
    CHECK(kind_name(CertKind::OneSidedTail) == "tail1");
    CHECK_THROWS_AS(kind_from_name("gaussian"), SchemaError);
    CHECK_THROWS_AS(kind_from_name(""), SchemaError);
}

TEST_CASE("sign names round-trip") {
    CHECK(sign_from_name("unsigned") == SignConstraint::Unconstrained);
    CHECK(sign_from_name("signed") == SignConstraint::OneSigned);
    CHECK(sign_name(SignConstraint::Unconstrained) == "unsigned");
    CHECK(sign_name(SignConstraint::OneSigned) == "signed");
    CHECK_THROWS_AS(sign_from_name("two-sided"), SchemaError);
}

TEST_CASE("prefactor floors per kind") {
    CHECK(min_log_prefactor(CertKind::TwoSidedTail) == 0.0);
    CHECK(min_log_prefactor(CertKind::PsiBound) == 0.0);
    CHECK(min_log_prefactor(CertKind::Mgf) == 0.0);
    CHECK(min_log_prefactor(CertKind::EvenMoments) == -kInf);
    CHECK(min_log_prefactor(CertKind::OneSidedTail) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("validate accepts floor values exactly") {
    CHECK_NOTHROW(validate({CertKind::TwoSidedTail, 1.0, 0.0}));
    CHECK_NOTHROW(validate({CertKind::EvenMoments, 1.0, -kInf}));
    CHECK_NOTHROW(validate({CertKind::OneSidedTail, 1.0, std::log(0.5)}));
    CHECK_NOTHROW(validate({CertKind::Mgf, 1e-300, 700.0}));
}

TEST_CASE("validate rejects out-of-domain values") {
    CHECK_THROWS_AS(validate({CertKind::TwoSidedTail, 1.0, -1e-12}), DomainError);
    CHECK_THROWS_AS(validate({CertKind::Mgf, 1.0, -1e-12}), DomainError);
    CHECK_THROWS_AS(validate({CertKind::OneSidedTail, 1.0, std::log(0.5) - 1e-9}),
                    DomainError);
    CHECK_THROWS_AS(validate({CertKind::Mgf, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(validate({CertKind::Mgf, -1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(validate({CertKind::Mgf, kNaN, 0.0}), NonFiniteError);
    CHECK_THROWS_AS(validate({CertKind::Mgf, kInf, 0.0}), NonFiniteError);
    CHECK_THROWS_AS(validate({CertKind::Mgf, 1.0, kNaN}), NonFiniteError);
    CHECK_THROWS_AS(validate({CertKind::Mgf, 1.0, kInf}), NonFiniteError);
    // -inf is only a valid prefactor where the floor itself is -inf.
    CHECK_THROWS_AS(validate({CertKind::Mgf, 1.0, -kInf}), DomainError);
}

TEST_CASE("prefactor exponentiates and saturates") {
    CHECK(prefactor({CertKind::Mgf, 1.0, 0.0}).value == 1.0);
    CHECK(prefactor({CertKind::Mgf, 1.0, std::log(2.0)}).value ==
          doctest::Approx(2.0).epsilon(1e-15));
    CHECK(prefactor({CertKind::EvenMoments, 1.0, -kInf}).value == 0.0);

    const Prefactor big = prefactor({CertKind::Mgf, 1.0, 710.0});
    CHECK(big.overflowed);
    CHECK(std::isinf(big.value));
    const Prefactor fits = prefactor({CertKind::Mgf, 1.0, 709.0});
    CHECK_FALSE(fits.overflowed);
    CHECK(std::isfinite(fits.value));
}

TEST_CASE("certificate json round-trip") {
    const Certificate cert{CertKind::PsiBound, 2.5, 0.75};
    const Json j = to_json(cert);
    CHECK(j.at("kind") == "psi");
    CHECK(j.at("sigma_sq") == 2.5);
    CHECK(j.at("log_rho") == 0.75);
    CHECK(certificate_from_json(j) == cert);
}

TEST_CASE("degenerate prefactor serializes as null") {
    const Certificate cert{CertKind::EvenMoments, 1.0, -kInf};
    const Json j = to_json(cert);
    CHECK(j.at("log_rho").is_null());
    const Certificate back = certificate_from_json(j);
    CHECK(back.kind == CertKind::EvenMoments);
    CHECK(back.log_prefactor == -kInf);
}

TEST_CASE("certificate json rejects malformed documents") {
    CHECK_THROWS_AS(certificate_from_json(Json::parse(R"({"kind":"mgf"})")),
                    SchemaError);
    CHECK_THROWS_AS(certificate_from_json(Json::parse(
                        R"({"kind":"mgf","sigma_sq":"x","log_rho":0})")),
                    SchemaError);
    CHECK_THROWS_AS(certificate_from_json(Json::parse(
                        R"({"kind":"mgf","sigma_sq":1,"log_rho":0,"extra":1})")),
                    SchemaError);
    CHECK_THROWS_AS(certificate_from_json(Json::parse(
                        R"({"kind":"nope","sigma_sq":1,"log_rho":0})")),
                    SchemaError);
    CHECK_THROWS_AS(certificate_from_json(Json::parse("[1,2,3]")), SchemaError);
    // Structurally fine but out of domain: a different error class.
    CHECK_THROWS_AS(certificate_from_json(Json::parse(
                        R"({"kind":"mgf","sigma_sq":-1,"log_rho":0})")),
                    DomainError);
    // Null is only admissible where the floor is -inf.
    CHECK_THROWS_AS(certificate_from_json(Json::parse(
                        R"({"kind":"mgf","sigma_sq":1,"log_rho":null})")),
                    DomainError);
}

TEST_CASE("validate over a parameter sweep") {
    for (CertKind k : {CertKind::TwoSidedTail, CertKind::EvenMoments,
                       CertKind::PsiBound, CertKind::Mgf, CertKind::OneSidedTail}) {
        const double floor = min_log_prefactor(k);
        for (double vp : {1e-6, 0.5, 1.0, 7.0, 1e6}) {
            for (double above : {0.0, 1e-12, 0.3, 5.0, 600.0}) {
                const double lr = std::isinf(floor) ? above - 10.0 : floor + above;
                CHECK_NOTHROW(validate({k, vp, lr}));
            }
            if (!std::isinf(floor)) {
                CHECK_THROWS_AS(validate({k, vp, floor - 1e-9}), DomainError);
            }
        }
    }
}
