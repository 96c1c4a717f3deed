#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace claimforge {

// Machine-readable failure categories. The HTTP service reports these names
// verbatim, so renaming one is a wire-format change.
enum class ErrorCode {
  kEmptyClaim,
  kIllegalAction,
  kOutOfRange,
  kNoSynonym,
  kEmptyCorpus,
  kEmptyQuery,
  kUnknownClaim,
  kEmbeddingServiceUnavailable,
  kEmptyDataset,
  kShapeMismatch,
  kParseError,
  kDanglingReference,
  kMissingCell,
  kIoError,
  kFormatError,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  // For file-backed failures; `line` is 1-based.
  Error(ErrorCode code, const std::string& message, std::size_t line);

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_ = 0;
};

}  // namespace claimforge
