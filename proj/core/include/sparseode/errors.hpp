#pragma once

#include <stdexcept>

namespace sparseode {

// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input data or arguments. The command line tool maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Numerical failure while estimating. Exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Bad configuration (unknown keys, values out of range). Exit code 4.
class ConfigError : public Error {
public:
    using Error::Error;
};

class DomainError final : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class LengthMismatch final : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class ShapeMismatch final : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class GridMismatch final : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class AsymmetryError final : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class EmptySupport final : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class ParseError final : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class NonMonotoneTimes final : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class DuplicateColumnName final : public ValidationError {
public:
    using ValidationError::ValidationError;
};
class UnknownGeneName final : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InsufficientLocalData final : public NumericalError {
public:
    using NumericalError::NumericalError;
};
class SingularLocalDesign final : public NumericalError {
public:
    using NumericalError::NumericalError;
};
class AllCandidatesFailed final : public NumericalError {
public:
    using NumericalError::NumericalError;
};
class ZeroDiagonal final : public NumericalError {
public:
    using NumericalError::NumericalError;
};
class IllConditioned final : public NumericalError {
public:
    using NumericalError::NumericalError;
};
class ZeroTimeGap final : public NumericalError {
public:
    using NumericalError::NumericalError;
};
class NonFinite final : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace sparseode
