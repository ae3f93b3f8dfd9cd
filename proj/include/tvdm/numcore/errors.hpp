#pragma once

#include <stdexcept>
#include <string>

namespace tvdm {

// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tensor or image shape does not satisfy an operation's contract.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Invalid hyperparameter, configuration key or value.
class ConfigError : public Error {
public:
    using Error::Error;
};

// NaN/Inf in a loss or gradient, or a refused optimizer update.
class NumericError : public Error {
public:
    using Error::Error;
};

// Required upstream stage output (checkpoint, manifest) is missing.
class DependencyError : public Error {
public:
    using Error::Error;
};

// Filesystem / serialization failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace tvdm
