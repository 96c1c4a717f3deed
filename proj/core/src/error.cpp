#include "claimforge/error.h"

namespace claimforge {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kEmptyClaim: return "EmptyClaim";
    case ErrorCode::kIllegalAction: return "IllegalAction";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNoSynonym: return "NoSynonym";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kEmptyQuery: return "EmptyQuery";
    case ErrorCode::kUnknownClaim: return "UnknownClaim";
    case ErrorCode::kEmbeddingServiceUnavailable: return "EmbeddingServiceUnavailable";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDanglingReference: return "DanglingReference";
    case ErrorCode::kMissingCell: return "MissingCell";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error(std::string(error_code_name(code)) + " (line " + std::to_string(line) +
                         "): " + message),
      code_(code),
      line_(line) {}

}  // namespace claimforge
