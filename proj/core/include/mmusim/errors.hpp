#pragma once

#include <stdexcept>
#include <string>

namespace mmusim {

// Raised when a translation is requested for an address with no mapping.
struct PageFault : std::runtime_error {
  explicit PageFault(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a mapping request lands inside an existing leaf of a
// different page size.
struct ConflictingMapping : std::runtime_error {
  explicit ConflictingMapping(const std::string& what)
      : std::runtime_error(what) {}
};

// Raised for cache geometries that do not divide evenly.
struct InvalidGeometry : std::runtime_error {
  explicit InvalidGeometry(const std::string& what)
      : std::runtime_error(what) {}
};

// Raised for malformed trace input; carries a 1-based line number when the
// source is a file stream.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what, std::uint64_t line = 0)
      : std::runtime_error(what), line_number(line) {}
  std::uint64_t line_number;
};

// Raised for unknown keys or bad values in experiment configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when reports over different event streams are compared.
struct MismatchedRuns : std::runtime_error {
  explicit MismatchedRuns(const std::string& what)
      : std::runtime_error(what) {}
};

// Raised when an engine self-check fails; maps to CLI exit code 3.
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace mmusim
