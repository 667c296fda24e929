#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbcc {

// Non-finite entries, bad counts, malformed arguments.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix handed to the HPD log-determinant was not Hermitian positive
// definite. `failing_minor()` is the 1-based order of the first leading
// minor whose Cholesky pivot was not positive (0 when the Hermitian residual
// check failed before factorization).
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::size_t failing_minor = 0)
      : std::domain_error(what), failing_minor_(failing_minor) {}
  std::size_t failing_minor() const noexcept { return failing_minor_; }

 private:
  std::size_t failing_minor_;
};

class GenerationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested stream counts violate the null-space dimension bound.
class FeasibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Beamformer certificates (orthogonality / rank) failed on a concrete channel.
class ConstructionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGrid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateBlock : public std::runtime_error {
 public:
  DegenerateBlock(const std::string& what, std::size_t block)
      : std::runtime_error(what), block_(block) {}
  std::size_t block() const noexcept { return block_; }

 private:
  std::size_t block_;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cbcc
