#pragma once

#include <stdexcept>
#include <string>

namespace bpsim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (XML, JSON, CSV, timestamps).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input that parses but breaks a model or log invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Bad argument combination at an API or CLI boundary.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace bpsim
