#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dampwave {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed or non-conforming triangulation.
class MeshError : public Error {
public:
    using Error::Error;
};

/// Degenerate cells, or a system with no interior unknowns.
class AssemblyError : public Error {
public:
    using Error::Error;
};

class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, double residual, std::size_t iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }
    [[nodiscard]] std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

/// Too few positive energy samples for a decay fit.
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Configuration text error; line is 1-based, 0 when not tied to a line.
class ConfigError : public Error {
public:
    ConfigError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace dampwave
