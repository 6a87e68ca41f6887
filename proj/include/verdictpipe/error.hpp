#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace verdictpipe {

enum class ErrorCode {
  MissingFile,
  UnsupportedExtension,
  ConverterFailed,
  EmptyDocument,
  EmptyDirectory,
  EmptyCorpus,
  EmptyVocabulary,
  IoFailure,
  EmptyDataset,
  SingleClassDataset,
  NonFiniteLoss,
  SchemaVersionMismatch,
  CorruptBundle,
  ClassTooSmall,
  LengthMismatch,
  Empty,
  InvalidConfig,
};

std::string_view error_name(ErrorCode code) noexcept;

// Every failure surfaced by the library carries one of the codes above; the
// name is what ends up in .error.txt files and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace verdictpipe
