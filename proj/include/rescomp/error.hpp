#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rescomp {

/// Failure categories. The CLI prints `to_string(code)` so scripts can match on it.
enum class ErrorCode {
  MalformedRow,
  OutOfRange,
  DuplicateGridAngle,
  UnorderedGrid,
  InsufficientSamples,
  NonIntegerGrid,
  EmptyProfile,
  BadGrid,
  DegenerateBounds,
  EmptyDataset,
  ShapeMismatch,
  DivergenceDetected,
  SingularNormalEquations,
  NonUniformGrid,
  UnderdeterminedFit,
  RankDeficientDesign,
  UnsupportedVersion,
  CorruptFile,
  KindMismatch,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

}  // namespace rescomp
