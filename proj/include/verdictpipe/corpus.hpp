#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verdictpipe/disposition.hpp"
#include "verdictpipe/error.hpp"
#include "verdictpipe/labeler.hpp"

namespace verdictpipe {

/// External PDF-to-text command. `{input}` is replaced by the shell-quoted
/// input path and the command's standard output is taken as the text.
struct ConverterConfig {
  std::string command_template = "pdftotext -layout -enc UTF-8 {input} -";

  std::string command_for(const std::filesystem::path& input) const;
};

struct CaseDocument {
  std::string doc_id;
  std::string raw_text;
  std::filesystem::path source_path;
  std::optional<Disposition> label;
  std::size_t char_count = 0;
};

struct IngestError {
  std::filesystem::path source_path;
  ErrorCode code;
  std::string message;
};

struct CorpusManifest {
  std::vector<CaseDocument> documents;  // sorted by doc_id
  std::vector<IngestError> errors;      // sorted by source_path
  std::string created_at;               // ISO-8601 UTC
  std::string converter_id;
};

/// Reads .txt as UTF-8 (invalid sequences become U+FFFD, NUL dropped) or
/// runs the converter for .pdf. Throws Error on MissingFile,
/// UnsupportedExtension, ConverterFailed or EmptyDocument.
std::string extract_text(const std::filesystem::path& path, const ConverterConfig& converter);

/// Replaces invalid UTF-8 with U+FFFD and removes NUL characters.
std::string sanitize_utf8(std::string_view bytes);

/// Number of code points in valid UTF-8.
std::size_t utf8_length(std::string_view text) noexcept;

/// Filename stem lowered and restricted to [a-z0-9_-]; other characters map to '_'.
std::string sanitize_doc_id(const std::filesystem::path& path);

bool is_candidate_file(const std::filesystem::path& path);

/// One CaseDocument per readable .txt/.pdf file, labeled via the labeler;
/// per-file failures are recorded in `errors`. Throws EmptyDirectory when
/// there is no candidate file at all.
CorpusManifest ingest_directory(const std::filesystem::path& dir,
                                const ConverterConfig& converter,
                                const LabelerConfig& labeler_cfg);

/// Manifest text: `# created_at=` and `# converter=` header lines, one
/// `doc_id<TAB>label-or-?<TAB>char_count<TAB>source_path` record per
/// document, then `#error<TAB>path<TAB>code<TAB>message` lines.
std::string format_manifest(const CorpusManifest& manifest);

}  // namespace verdictpipe
