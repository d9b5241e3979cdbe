#pragma once

#include <stdexcept>
#include <string>

namespace swaprank {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller supplied data that violates a precondition (dims, missing fields, ...).
class InputError : public Error {
public:
    using Error::Error;
};

// A configuration value is out of range (epsilon <= 0, no attributes enabled, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// 6D rotation input whose Gram-Schmidt lift is ill-conditioned.
class DegenerateInputError : public InputError {
public:
    using InputError::InputError;
};

// Correlation requested on a constant sample.
class UndefinedCorrelationError : public InputError {
public:
    using InputError::InputError;
};

// A dominance graph contains a cycle.
class CycleError : public Error {
public:
    using Error::Error;
};

// Invariant the library itself should uphold was broken.
class InternalError : public Error {
public:
    using Error::Error;
};

// Persistent formats.
class FormatError : public Error {
public:
    using Error::Error;
};

class VersionError : public FormatError {
public:
    using FormatError::FormatError;
};

class ChecksumError : public FormatError {
public:
    using FormatError::FormatError;
};

class ShapeError : public FormatError {
public:
    using FormatError::FormatError;
};

}  // namespace swaprank
