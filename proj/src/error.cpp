#include "jointslab/error.hpp"

namespace jointslab {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::ModulusTooLarge: return "ModulusTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularMap: return "SingularMap";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotOnVariety: return "NotOnVariety";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::TruncationTooLow: return "TruncationTooLow";
    case ErrorCode::InvalidVariety: return "InvalidVariety";
    case ErrorCode::InvalidConfiguration: return "InvalidConfiguration";
    case ErrorCode::MissingCandidates: return "MissingCandidates";
    case ErrorCode::FieldTooSmall: return "FieldTooSmall";
    case ErrorCode::UnknownJoint: return "UnknownJoint";
    case ErrorCode::ChartMissing: return "ChartMissing";
    case ErrorCode::LedgerMissing: return "LedgerMissing";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::NotAJoint: return "NotAJoint";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace jointslab
