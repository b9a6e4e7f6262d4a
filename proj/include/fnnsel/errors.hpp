#pragma once

#include <stdexcept>
#include <string>

namespace fnnsel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad sizes, out-of-range values).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A fit produced a non-finite residual sum of squares.
class FitFailure : public Error {
public:
    using Error::Error;
};

/// RSS is exactly zero: the Gaussian likelihood is unbounded.
class DegenerateFit : public Error {
public:
    using Error::Error;
};

/// Every random start of a multi-start fit failed.
class AllStartsFailed : public Error {
public:
    using Error::Error;
};

/// Fewer than K + 2 observations for the requested architecture.
class UnderdeterminedFit : public Error {
public:
    using Error::Error;
};

/// Every candidate at a selection decision point failed to fit.
class SelectionFailure : public Error {
public:
    using Error::Error;
};

/// Malformed or unusable input data.
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace fnnsel
