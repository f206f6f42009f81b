#pragma once

#include <stdexcept>
#include <string>

namespace cane {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A required input file is missing or unreadable. The CLI maps this to exit 2.
struct FileError : Error {
    using Error::Error;
};

// Malformed input text; message carries the file and line number.
struct ParseError : Error {
    using Error::Error;
};

// An index refers past the declared node/attribute range.
struct BoundsError : Error {
    using Error::Error;
};

// Invalid configuration (bad fractions, zero top-N, unknown variant, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Snapshot and requested settings disagree (d, K, alpha).
struct CompatibilityError : Error {
    using Error::Error;
};

// Negative sampling has no admissible candidate for an anchor.
struct SamplingError : Error {
    using Error::Error;
};

// Non-finite value where a finite one is required (gradients, loss).
struct NumericError : Error {
    using Error::Error;
};

}  // namespace cane
