#pragma once

#include <stdexcept>
#include <string>

namespace pitchstats {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller passed structurally invalid arguments (bad shapes, out-of-range
// hyperparameters, mismatched dimensions).
struct ValidationError : Error {
  using Error::Error;
};

// An input file could not be read/written or a referenced artifact is absent.
struct IoError : Error {
  using Error::Error;
};

// A file was readable but its contents do not parse (malformed JSON/CSV,
// truncated binary, bad magic).
struct ParseError : Error {
  using Error::Error;
};

// A parsed document has the wrong logical structure (missing keys, wrong
// joint count, unknown format version).
struct SchemaError : Error {
  using Error::Error;
};

// A numeric routine has no defined result for this input (zero-length
// vector angle, degenerate trajectory).
struct NumericError : Error {
  using Error::Error;
};

}  // namespace pitchstats
