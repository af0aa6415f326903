#pragma once

#include <stdexcept>
#include <string>

namespace subg {

/// Base class for all library errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric argument or certificate field lies outside its admissible domain.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// A value that must be finite is NaN or infinite.
class NonFiniteError : public DomainError {
public:
    explicit NonFiniteError(const std::string& what) : DomainError(what) {}
};

/// A conversion edge needs a free parameter and none was supplied.
class MissingLambdaError : public DomainError {
public:
    explicit MissingLambdaError(const std::string& what) : DomainError(what) {}
};

/// A lambda was supplied for a parameter-free conversion edge.
class UnexpectedLambdaError : public DomainError {
public:
    explicit UnexpectedLambdaError(const std::string& what) : DomainError(what) {}
};

/// The requested (source, target, regime) triple has no tabulated edge.
class NoSuchEdgeError : public DomainError {
public:
    explicit NoSuchEdgeError(const std::string& what) : DomainError(what) {}
};

/// Centering was requested without the mean-is-zero assertion.
class MeanNotZeroError : public DomainError {
public:
    explicit MeanNotZeroError(const std::string& what) : DomainError(what) {}
};

/// A combinator was given an empty certificate list.
class EmptyListError : public DomainError {
public:
    explicit EmptyListError(const std::string& what) : DomainError(what) {}
};

/// A bound parameter does not belong to the requested assumption regime.
class ParamRegimeMismatchError : public DomainError {
public:
    explicit ParamRegimeMismatchError(const std::string& what) : DomainError(what) {}
};

/// A pipeline document is structurally invalid. CLI exit code 2.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(what) {}
};

/// A pipeline op references a name that was never defined. CLI exit code 3.
class ReferenceError : public Error {
public:
    explicit ReferenceError(const std::string& what) : Error(what) {}
};

/// A file could not be read or written. CLI exit code 5.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

} // namespace subg
