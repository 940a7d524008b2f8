#pragma once

#include <stdexcept>
#include <string>

namespace tllreach {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: dimension mismatch, non-positive epsilon, ...
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents (JSON syntax or missing fields).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates a model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The LP solver could not reach a verdict.
class SolverError : public Error {
public:
    using Error::Error;
};

/// A cost guard refused to start a computation that would be too large.
class CostError : public Error {
public:
    using Error::Error;
};

}  // namespace tllreach
