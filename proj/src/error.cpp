#include "transferop/error.hpp"

namespace transferop {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidMatrix: return "InvalidMatrix";
    case ErrorKind::RankZero: return "RankZero";
    case ErrorKind::InvalidShape: return "InvalidShape";
    case ErrorKind::UnsupportedActivation: return "UnsupportedActivation";
    case ErrorKind::UnsupportedDepth: return "UnsupportedDepth";
    case ErrorKind::TrajectoryDiverged: return "TrajectoryDiverged";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::UnknownSystem: return "UnknownSystem";
    case ErrorKind::InvalidDomain: return "InvalidDomain";
    case ErrorKind::DivergedTraining: return "DivergedTraining";
    case ErrorKind::EnsembleFailed: return "EnsembleFailed";
    case ErrorKind::ClusteringFailed: return "ClusteringFailed";
    case ErrorKind::DegenerateFunction: return "DegenerateFunction";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidShape:
    case ErrorKind::UnknownSystem:
    case ErrorKind::InvalidDomain:
    case ErrorKind::IoError:
    case ErrorKind::FormatError:
    case ErrorKind::ConfigError:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

TrajectoryDivergedError::TrajectoryDivergedError(long step, const std::string& message)
    : Error(ErrorKind::TrajectoryDiverged, message + " (step " + std::to_string(step) + ")"),
      step_(step) {}

DivergedTrainingError::DivergedTrainingError(int epoch, const std::string& message)
    : Error(ErrorKind::DivergedTraining, message + " (epoch " + std::to_string(epoch) + ")"),
      epoch_(epoch) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace transferop
