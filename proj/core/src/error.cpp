#include "nevsim/error.hpp"

namespace nevsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::NonFiniteParams: return "NonFiniteParams";
    case ErrorCode::TrainingDiverged: return "TrainingDiverged";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

TrainingDiverged::TrainingDiverged(int epoch)
    : Error(ErrorCode::TrainingDiverged,
            "training diverged: non-finite loss at epoch " + std::to_string(epoch)),
      epoch_(epoch) {}

}  // namespace nevsim
