#pragma once

#include <stdexcept>
#include <string>

namespace qaccel {

// Requested index lies beyond a finite sequence or spectrum and no
// generator is available to extend it.
struct TruncationError : std::runtime_error {
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// A level number exceeded the checked 64-bit range.
struct OverflowError : TruncationError {
  explicit OverflowError(const std::string& what) : TruncationError(what) {}
};

// Two energies from different groups coincide within tolerance, so the
// merged ordering is ill-defined.
struct DegenerateSpectrum : std::runtime_error {
  explicit DegenerateSpectrum(const std::string& what) : std::runtime_error(what) {}
};

// An argument lies outside the mathematically admissible range.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed its accuracy or stability contract.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A configuration file failed validation.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qaccel
