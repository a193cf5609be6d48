#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace transferop {

enum class ErrorKind {
  InvalidArgument,
  InvalidMatrix,
  RankZero,
  InvalidShape,
  UnsupportedActivation,
  UnsupportedDepth,
  TrajectoryDiverged,
  InsufficientData,
  UnknownSystem,
  InvalidDomain,
  DivergedTraining,
  EnsembleFailed,
  ClusteringFailed,
  DegenerateFunction,
  ModeMismatch,
  IoError,
  FormatError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for kinds that describe bad input rather than a numerical failure.
/// The CLI maps these to exit code 2 and everything else to exit code 3.
bool is_validation_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

/// Error raised while stepping a trajectory; carries the failing step.
class TrajectoryDivergedError : public Error {
 public:
  TrajectoryDivergedError(long step, const std::string& message);
  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Error raised by the iterative trainer when the loss stops being finite.
class DivergedTrainingError : public Error {
 public:
  DivergedTrainingError(int epoch, const std::string& message);
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace transferop
