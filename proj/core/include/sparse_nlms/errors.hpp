#ifndef SPARSE_NLMS_ERRORS_HPP
#define SPARSE_NLMS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sparse_nlms {

/// Vector lengths that must agree do not.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A parameter or configuration value violates its contract.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A function argument lies outside the mathematical domain of the formula.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The matrix (I - mu R) cannot be inverted.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A closed-form steady-state expression has a nonpositive denominator.
class RegimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The sample source ran dry before the stop criterion fired.
class StreamExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure while emitting results.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sparse_nlms

#endif  // SPARSE_NLMS_ERRORS_HPP
