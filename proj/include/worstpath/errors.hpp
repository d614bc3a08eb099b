#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace worstpath {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class InfeasibleActionError : public Error {
public:
    using Error::Error;
};

class TerminalStateError : public Error {
public:
    using Error::Error;
};

class PathError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class UndefinedDepthError : public Error {
public:
    using Error::Error;
};

class GenerationError : public Error {
public:
    using Error::Error;
};

class EmptyBufferError : public Error {
public:
    using Error::Error;
};

class SupportViolationError : public Error {
public:
    using Error::Error;
};

class DegeneratePolicyError : public Error {
public:
    using Error::Error;
};

class SizeGuardError : public Error {
public:
    using Error::Error;
};

class NotSolvedError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input document. `line()` is 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Structurally well-formed input that violates model invariants.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "validation failed";
        for (const auto& s : v) {
            out += "; ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

}  // namespace worstpath
