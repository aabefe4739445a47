#pragma once

#include <stdexcept>
#include <string>

namespace nlqfi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoPhaseMatchedPoint : public Error {
public:
    using Error::Error;
};

class UnphysicalState : public Error {
public:
    using Error::Error;
};

// Failures of an iterative or ill-posed numerical step. The CLI maps these to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class QuadratureNotConverged : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IllConditioned : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& field, int line, const std::string& what)
        : Error(format(field, line, what)), field_(field), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    // 0 when the value did not come from a file line (defaults, --set overrides).
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, int line, const std::string& what) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!field.empty()) out += field + ": ";
        return out + what;
    }

    std::string field_;
    int line_;
};

}  // namespace nlqfi
