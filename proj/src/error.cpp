#include "verdictpipe/error.hpp"

namespace verdictpipe {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::UnsupportedExtension: return "UnsupportedExtension";
    case ErrorCode::ConverterFailed: return "ConverterFailed";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::EmptyDirectory: return "EmptyDirectory";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SingleClassDataset: return "SingleClassDataset";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::CorruptBundle: return "CorruptBundle";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace verdictpipe
