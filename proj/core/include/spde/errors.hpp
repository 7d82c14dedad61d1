#pragma once

#include <stdexcept>
#include <string>

namespace spde {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad parameter, unsupported kind,
/// dealiasing bound violated, size mismatch).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain of a formula.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite state encountered while time stepping.
class BlowUpError : public Error {
public:
    BlowUpError(std::size_t step, std::size_t mode, const std::string& what)
        : Error(what), step_(step), mode_(mode) {}

    std::size_t step() const noexcept { return step_; }
    std::size_t mode() const noexcept { return mode_; }

private:
    std::size_t step_;
    std::size_t mode_;
};

/// The observed-information denominator vanished (e.g. the zero path).
class DegenerateTrajectoryError : public Error {
public:
    using Error::Error;
};

/// File system or stream failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace spde
