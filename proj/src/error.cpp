#include "rescomp/error.hpp"

namespace rescomp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DuplicateGridAngle: return "DuplicateGridAngle";
    case ErrorCode::UnorderedGrid: return "UnorderedGrid";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NonIntegerGrid: return "NonIntegerGrid";
    case ErrorCode::EmptyProfile: return "EmptyProfile";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::DegenerateBounds: return "DegenerateBounds";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::SingularNormalEquations: return "SingularNormalEquations";
    case ErrorCode::NonUniformGrid: return "NonUniformGrid";
    case ErrorCode::UnderdeterminedFit: return "UnderdeterminedFit";
    case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rescomp
