// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace csg {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied parameters does not hold.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A linear system is singular, indefinite or too badly conditioned to trust.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double condition = 0.0)
        : Error(what), condition_(condition) {}

    /// Condition estimate of the offending matrix, 0 when not available.
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Reading or writing a file failed.
class IoError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

} // namespace detail
} // namespace csg
