#pragma once

#include <stdexcept>
#include <string>

namespace specbeam {

/// Base type for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file (bad JSON, wrong magic, truncated payload).
struct ParseError : Error {
    using Error::Error;
};

/// Structurally valid input that violates a domain invariant; the message
/// names the offending field.
struct ValidationError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

/// Raised when an estimator has nothing to lock onto (all-zero curve,
/// empty peak list).
struct NoDetectionError : Error {
    using Error::Error;
};

/// All azimuth bins of an object were rejected as outliers.
struct DegenerateObjectError : Error {
    using Error::Error;
};

/// Too few or degenerate correspondences for a calibration fit.
struct UnderdeterminedError : Error {
    using Error::Error;
};

}  // namespace specbeam
