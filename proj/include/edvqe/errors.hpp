#pragma once

#include <stdexcept>
#include <string>

namespace edvqe {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Graph instance cannot be built with the requested shape (n < 2, odd degree sum, ...).
class InvalidInstance : public Error {
public:
    using Error::Error;
};

/// A configuration value is outside its documented domain.
class InvalidConfig : public Error {
public:
    using Error::Error;
};

/// Randomized construction gave up after its retry budget.
class GenerationError : public Error {
public:
    using Error::Error;
};

/// Index out of range or length mismatch.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Problem too large for an exact method.
class CapacityError : public Error {
public:
    using Error::Error;
};

class LayoutError : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Non-finite objective encountered during optimization.
class NumericError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string &what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string &what) : Error(what) {}

    /// 1-based line number, 0 when not tied to a line.
    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

/// A parsed value outside its allowed alphabet.
class ValueError : public ParseError {
public:
    using ParseError::ParseError;
};

} // namespace edvqe
