#pragma once

#include <stdexcept>
#include <string>

namespace plateflow {

enum class ErrorKind {
  shape,            // dimension or grid mismatch
  unsupported,      // requested order/parameter outside the supported range
  wrong_entry,      // e.g. k = 0 passed to the oscillatory solver
  incompatible,     // violated mean/compatibility condition
  excluded_mode,    // symbol evaluated at a mode excluded by a Dirac factor
  incomplete,       // missing mode during synthesis
  degenerate,       // deformation not invertible / smallness gate failed
  divergence,       // fixed-point iteration left the ball or stopped contracting
  solver,           // residual check failed after a linear solve
  parse,            // forcing expression or config syntax
  periodicity,      // forcing not representable on the periodic lattice
  config,           // invalid configuration value
  io,               // container read/write failure
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Incompatibility carrying the offending time frequency.
class IncompatibleData : public Error {
 public:
  IncompatibleData(int k, const std::string& what) : Error(ErrorKind::incompatible, what), k_(k) {}
  int k() const noexcept { return k_; }

 private:
  int k_;
};

}  // namespace plateflow
