#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nevsim {

enum class ErrorCode {
  Io,
  Schema,
  Parse,
  BadInput,
  DegenerateSeries,
  EmptyStream,
  NonFiniteParams,
  TrainingDiverged,
  DegenerateDenominator,
  Config,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when training produces a non-finite loss.
class TrainingDiverged : public Error {
 public:
  explicit TrainingDiverged(int epoch);

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace nevsim
