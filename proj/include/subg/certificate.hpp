#pragma once

#include <string>

#include "subg/errors.hpp"

namespace subg {

// =====================================================================
// Certificate kinds
// =====================================================================
//
// A certificate asserts one of five equivalent subgaussian bounds on a
// random variable X, each parameterized by a deviation scale sigma > 0
// (stored as the variance proxy sigma^2) and a prefactor rho (stored as
// ln rho).  In normalized units u = lambda * sigma:
//
//   TwoSidedTail   P[|X| >= u]            <= rho exp(-lambda^2 / 2),  rho >= 1
//   EvenMoments    E[X^(2k)]              <= rho sigma^(2k) k!,       rho >= 0
//   PsiBound       E[exp(X^2 / sigma^2)]  <= rho,                     rho >= 1
//   Mgf            E[exp(t X)]            <= rho exp(sigma^2 t^2 / 2), rho >= 1
//   OneSidedTail   max one-sided tail     <= rho exp(-lambda^2 / 2),  rho >= 1/2
//
// Codes are stable and appear in serialized form and reports.
enum class CertKind : int {
    TwoSidedTail = 1,
    EvenMoments = 2,
    PsiBound = 3,
    Mgf = 4,
    OneSidedTail = 5,
};

/// Short stable identifier used in JSON and messages ("tail2", "moments",
/// "psi", "mgf", "tail1").
std::string kind_name(CertKind kind);

/// Inverse of kind_name. Throws SchemaError on an unknown string.
CertKind kind_from_name(const std::string& name);

/// Smallest admissible ln rho for a kind: 0 for TwoSidedTail, PsiBound and
/// Mgf, -infinity for EvenMoments, ln(1/2) for OneSidedTail.
double min_log_prefactor(CertKind kind);

struct Certificate {
    CertKind kind;
    double var_proxy;      // sigma^2, strictly positive
    double log_prefactor;  // ln rho; -infinity only for EvenMoments (rho = 0)

    bool operator==(const Certificate&) const = default;
};

/// Throws NonFiniteError for NaN / infinite fields and DomainError when
/// ln rho is below the kind's admissible minimum. Boundary values pass.
void validate(const Certificate& cert);

struct Prefactor {
    double value;     // exp(log_prefactor), +infinity when overflowed
    bool overflowed;  // true iff exp would exceed the double range
};

/// rho in linear scale. Exact for ln rho <= 700; beyond the double range
/// the value saturates to +infinity with the flag set.
Prefactor prefactor(const Certificate& cert);

// =====================================================================
// Variable context
// =====================================================================

/// Sign information about the underlying variable. OneSigned activates the
/// reduced conversion table in which the one-sided and two-sided tail kinds
/// coincide.
enum class SignConstraint {
    Unconstrained,
    OneSigned,
};

std::string sign_name(SignConstraint sign);
SignConstraint sign_from_name(const std::string& name);

/// Side assumptions carried alongside a certificate but not encoded in it.
struct VariableContext {
    SignConstraint sign = SignConstraint::Unconstrained;
    bool mean_is_zero = false;
};

} // namespace subg
