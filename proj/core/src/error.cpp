#include "trawl/error.hpp"

namespace trawl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnreadableText: return "UnreadableText";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::InsufficientCandidates: return "InsufficientCandidates";
    case ErrorCode::UnknownDocId: return "UnknownDocId";
    case ErrorCode::ConflictingVerdicts: return "ConflictingVerdicts";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::NegativeFeature: return "NegativeFeature";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ProfileMismatch: return "ProfileMismatch";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewExamples: return "TooFewExamples";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SizeTooLarge: return "SizeTooLarge";
    case ErrorCode::FingerprintMismatch: return "FingerprintMismatch";
    case ErrorCode::NoQueueForCentury: return "NoQueueForCentury";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace trawl
