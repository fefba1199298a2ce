#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trawl {

/// Categorized failure codes. Every error surfaced by the library carries one
/// of these so the CLI and the HTTP service can map them to exit codes and
/// status classes without string matching.
enum class ErrorCode {
  // corpus
  MalformedLine,
  MissingField,
  InvalidField,
  DuplicateId,
  UnreadableText,
  InvalidUtf8,
  InsufficientCandidates,
  UnknownDocId,
  ConflictingVerdicts,
  // textprep
  EmptyCorpus,
  // models
  SingleClassInput,
  NegativeFeature,
  DivergenceDetected,
  DimensionMismatch,
  ProfileMismatch,
  VersionMismatch,
  ChecksumMismatch,
  // eval / curve
  LengthMismatch,
  TooFewExamples,
  InvalidArgument,
  SizeTooLarge,
  // discover / annotate
  FingerprintMismatch,
  NoQueueForCentury,
  // cli
  ConfigError,
  MissingArtifact,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace trawl
