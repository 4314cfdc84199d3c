#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diachron {

// Root of every error the library throws on bad data or bad numerics.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file; carries the offending path and 1-based line.
class ParseError : public Error {
public:
    ParseError(std::string path, std::size_t line, const std::string& what);

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

// Structurally valid input that violates a cross-record invariant
// (duplicate ids, papers without a venue, missing files, ...).
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Arguments outside an operation's domain (empty field, k too large, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Filtering left nothing to train on.
class EmptyCorpusError : public Error {
public:
    using Error::Error;
};

// Non-finite values, divergence, or a quantity that is undefined for the input
// (zero vector under cosine, all-zero similarity profile, ...).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace diachron
