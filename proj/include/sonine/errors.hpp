#ifndef SONINE_ERRORS_HPP
#define SONINE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sonine {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Constructor parameters outside the admissible set.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain where an operation is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite or malformed sample data.
class DataError : public Error {
public:
    using Error::Error;
};

/// Tail-truncation policy whose hypotheses do not hold.
class PolicyError : public Error {
public:
    using Error::Error;
};

/// Inconsistent combination of otherwise valid objects.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Failure inside a numerical algorithm (singular solve, non-convergence).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace sonine

#endif  // SONINE_ERRORS_HPP
