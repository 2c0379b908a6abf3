#pragma once

#include <stdexcept>
#include <string>

namespace anyon {

/// Base class for every error raised by the library. `kind()` is a stable
/// short tag used by the CLI to pick an exit code.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Dimension above a configured cap.
struct SizeError : Error {
  explicit SizeError(const std::string& w) : Error("size", w) {}
};

/// Non-square or mismatched operands.
struct ShapeError : Error {
  explicit ShapeError(const std::string& w) : Error("shape", w) {}
};

/// Input violates a mathematical invariant (Hermiticity, PSD, normalization).
struct ValidityError : Error {
  explicit ValidityError(const std::string& w) : Error("validity", w) {}
};

/// Out-of-range scalar parameter.
struct ParameterError : Error {
  explicit ParameterError(const std::string& w) : Error("parameter", w) {}
};

/// Quadrature/eigensolver did not converge.
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error("numeric", w) {}
};

/// Fixed-step integrator failed its step-halving self check.
struct AccuracyError : Error {
  explicit AccuracyError(const std::string& w) : Error("accuracy", w) {}
};

/// A stochastic trajectory left the admissible state set.
class TrajectoryError : public Error {
 public:
  TrajectoryError(const std::string& w, long step, unsigned long long stream_id)
      : Error("trajectory", w), step_(step), stream_id_(stream_id) {}
  long step() const noexcept { return step_; }
  unsigned long long stream_id() const noexcept { return stream_id_; }

 private:
  long step_;
  unsigned long long stream_id_;
};

}  // namespace anyon
