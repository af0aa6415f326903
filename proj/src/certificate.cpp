#include "subg/certificate.hpp"

#include <cmath>
#include <limits>

namespace subg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// exp overflows double just above ln(DBL_MAX) = 709.78...
constexpr double kLogDoubleMax = 709.782712893383996;

} // namespace

std::string kind_name(CertKind kind) {
    switch (kind) {
        case CertKind::TwoSidedTail: return "tail2";
        case CertKind::EvenMoments: return "moments";
        case CertKind::PsiBound: return "psi";
        case CertKind::Mgf: return "mgf";
        case CertKind::OneSidedTail: return "tail1";
    }
    throw DomainError("kind_name: invalid certificate kind code " +
                      std::to_string(static_cast<int>(kind)));
}

CertKind kind_from_name(const std::string& name) {
    if (name == "tail2") return CertKind::TwoSidedTail;
    if (name == "moments") return CertKind::EvenMoments;
    if (name == "psi") return CertKind::PsiBound;
    if (name == "mgf") return CertKind::Mgf;
    if (name == "tail1") return CertKind::OneSidedTail;
    throw SchemaError("kind: unknown certificate kind \"" + name +
                      "\" (expected tail2|moments|psi|mgf|tail1)");
}

double min_log_prefactor(CertKind kind) {
    switch (kind) {
        case CertKind::TwoSidedTail:
        case CertKind::PsiBound:
        case CertKind::Mgf:
            return 0.0;
        case CertKind::EvenMoments:
            return -kInf;
        case CertKind::OneSidedTail:
            return std::log(0.5);
    }
    throw DomainError("min_log_prefactor: invalid certificate kind code " +
                      std::to_string(static_cast<int>(kind)));
}

void validate(const Certificate& cert) {
    kind_name(cert.kind); // rejects out-of-range codes

    if (!std::isfinite(cert.var_proxy)) {
        throw NonFiniteError("certificate: var_proxy must be finite, got " +
                             std::to_string(cert.var_proxy));
    }
    if (cert.var_proxy <= 0.0) {
        throw DomainError("certificate: var_proxy must be > 0, got " +
                          std::to_string(cert.var_proxy));
    }
    if (std::isnan(cert.log_prefactor) || cert.log_prefactor == kInf) {
        throw NonFiniteError("certificate: log_prefactor must be a real number or "
                             "-infinity, got " + std::to_string(cert.log_prefactor));
    }
    const double lo = min_log_prefactor(cert.kind);
    if (cert.log_prefactor < lo) {
        throw DomainError("certificate: log_prefactor " +
                          std::to_string(cert.log_prefactor) + " below minimum " +
                          std::to_string(lo) + " for kind " + kind_name(cert.kind));
    }
}

Prefactor prefactor(const Certificate& cert) {
    validate(cert);
    if (cert.log_prefactor >= kLogDoubleMax) {
        return Prefactor{kInf, true};
    }
    return Prefactor{std::exp(cert.log_prefactor), false};
}

std::string sign_name(SignConstraint sign) {
    return sign == SignConstraint::OneSigned ? "signed" : "unsigned";
}

SignConstraint sign_from_name(const std::string& name) {
    if (name == "unsigned") return SignConstraint::Unconstrained;
    if (name == "signed") return SignConstraint::OneSigned;
    throw SchemaError("regime: unknown sign regime \"" + name +
                      "\" (expected unsigned|signed)");
}

} // namespace subg
