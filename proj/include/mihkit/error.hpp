#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mihkit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad file syntax, bad flags, bad parameters.
class InputError : public Error {
public:
    using Error::Error;
};

/// Ledger parse failure with the 1-based line it happened on.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A document or request was rejected by validation (hash mismatch,
/// unknown category, provenance mismatch, unknown target, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Tamper evidence: a broken audit chain or corrupted predecessor.
class IntegrityError : public Error {
public:
    using Error::Error;
};

}  // namespace mihkit
