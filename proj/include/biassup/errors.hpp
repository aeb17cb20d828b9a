#pragma once

#include <stdexcept>
#include <string>

namespace biassup {

// Every failure the toolkit can raise, so callers (and the CLI's exit-code
// mapping) can dispatch on a single enum instead of a class hierarchy.
enum class ErrorCode {
  // dataset parsing
  MissingColumn,
  MalformedCsv,
  UnknownDirectionValue,
  MalformedJson,
  WrongChoiceCount,
  LabelOutOfRange,
  SampleTooLarge,
  // lexicon
  MissingDescription,
  DuplicateEntry,
  ShareOutOfRange,
  InvalidThreshold,
  UnknownGenderValue,
  // preamble construction
  NotCounterfactual,
  UnknownOccupation,
  UnknownName,
  ExhaustedCandidates,
  EmptyInput,
  // scoring backends
  BackendUnavailable,
  Timeout,
  TokenBoundaryMisaligned,
  InvalidDistribution,
  UnknownToken,
  HttpError,
  MissingLogprobs,
  // metrics / selection
  EmptyDataset,
  DivisionByNearZero,
  NTooLarge,
  // configuration / IO
  InvalidConfig,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace biassup
