#include "besovop/error.hpp"

namespace besovop {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::LengthNotPowerOfTwo: return "LengthNotPowerOfTwo";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::ParameterMissing: return "ParameterMissing";
    case ErrorCode::ScaleRangeTooSmall: return "ScaleRangeTooSmall";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::NonPowerOfTwoGrid: return "NonPowerOfTwoGrid";
    case ErrorCode::InvalidBesovParams: return "InvalidBesovParams";
    case ErrorCode::ZeroKernel: return "ZeroKernel";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::SpectrumTooShort: return "SpectrumTooShort";
    case ErrorCode::ZeroSpectrum: return "ZeroSpectrum";
    case ErrorCode::NonpositiveValuesInRange: return "NonpositiveValuesInRange";
    case ErrorCode::EmptyPartition: return "EmptyPartition";
    case ErrorCode::MatrixTooLarge: return "MatrixTooLarge";
  }
  return "UnknownError";
}

}  // namespace besovop
