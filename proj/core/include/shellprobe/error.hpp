#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shellprobe {

/// Broad failure class. The command-line tool maps these onto exit codes
/// (Io -> 1, Validation -> 2, Numerical -> 3).
enum class ErrorKind { Io, Validation, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

/// Malformed text input. `line()` is 1-based.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InsufficientDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IndexError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Mesh is not closed / consistently oriented. Carries the offending directed edges.
class TopologyError : public ValidationError {
 public:
  TopologyError(const std::string& what, std::vector<std::pair<int, int>> boundary_edges)
      : ValidationError(what), boundary_edges_(std::move(boundary_edges)) {}
  const std::vector<std::pair<int, int>>& boundary_edges() const noexcept { return boundary_edges_; }

 private:
  std::vector<std::pair<int, int>> boundary_edges_;
};

class InsufficientPatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyContactError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class RankDeficientError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateFitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Newton/continuation gave up. `last_good_depth()` is the deepest
/// dimensionless indentation that still converged.
class NonconvergenceError : public NumericalError {
 public:
  NonconvergenceError(const std::string& what, double last_good_depth)
      : NumericalError(what), last_good_depth_(last_good_depth) {}
  double last_good_depth() const noexcept { return last_good_depth_; }

 private:
  double last_good_depth_;
};

class SimulationInstabilityError : public NumericalError {
 public:
  SimulationInstabilityError(const std::string& what, int face) : NumericalError(what), face_(face) {}
  /// Offending triangle, or -1 when the failure is not tied to one face (NaN state).
  int face() const noexcept { return face_; }

 private:
  int face_;
};

class RelaxationTimeoutError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Exit code used by the CLI for a given error class.
int exit_code_for(ErrorKind kind) noexcept;

}  // namespace shellprobe
