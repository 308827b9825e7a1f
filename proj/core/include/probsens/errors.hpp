#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace probsens {

/// Failure categories surfaced by the analyzer. The CLI maps each one to a
/// distinct process exit code.
enum class ErrorKind {
    Parse,
    Validation,
    Classification,
    UnsupportedFactor,
    CapExceeded,
    SingularEvaluation,
    Unsupported,
    Oracle,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error(ErrorKind::Parse, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class SingularAssignmentError : public Error {
public:
    explicit SingularAssignmentError(const std::string& denominator)
        : Error(ErrorKind::SingularEvaluation, "parameter assignment makes denominator vanish: " + denominator),
          denominator_(denominator) {}

    const std::string& denominator() const noexcept { return denominator_; }

private:
    std::string denominator_;
};

class UnsupportedFactorError : public Error {
public:
    explicit UnsupportedFactorError(const std::string& factor)
        : Error(ErrorKind::UnsupportedFactor,
                "characteristic factor not splittable into linear or quadratic factors: " + factor),
          factor_(factor) {}

    const std::string& factor() const noexcept { return factor_; }

private:
    std::string factor_;
};

class CapExceededError : public Error {
public:
    CapExceededError(std::size_t cap, const std::string& detail)
        : Error(ErrorKind::CapExceeded,
                "recurrence system exceeded the equation cap of " + std::to_string(cap) + " (" + detail + ")"),
          cap_(cap) {}

    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

}  // namespace probsens
