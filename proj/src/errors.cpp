#include "biassup/errors.hpp"

namespace biassup {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::UnknownDirectionValue: return "UnknownDirectionValue";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::WrongChoiceCount: return "WrongChoiceCount";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::SampleTooLarge: return "SampleTooLarge";
    case ErrorCode::MissingDescription: return "MissingDescription";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::ShareOutOfRange: return "ShareOutOfRange";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::UnknownGenderValue: return "UnknownGenderValue";
    case ErrorCode::NotCounterfactual: return "NotCounterfactual";
    case ErrorCode::UnknownOccupation: return "UnknownOccupation";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::ExhaustedCandidates: return "ExhaustedCandidates";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::TokenBoundaryMisaligned: return "TokenBoundaryMisaligned";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::HttpError: return "HttpError";
    case ErrorCode::MissingLogprobs: return "MissingLogprobs";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DivisionByNearZero: return "DivisionByNearZero";
    case ErrorCode::NTooLarge: return "NTooLarge";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace biassup
