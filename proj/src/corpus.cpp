#include "verdictpipe/corpus.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace verdictpipe {
namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string run_converter(const fs::path& path, const ConverterConfig& converter) {
  const std::string cmd = converter.command_for(path) + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw Error(ErrorCode::ConverterFailed, "cannot start converter: " + cmd);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::ConverterFailed,
                "converter exited with status " + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1) +
                    " for " + path.string());
  }
  if (blank(out)) throw Error(ErrorCode::ConverterFailed, "converter produced no text for " + path.string());
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  ::gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string ConverterConfig::command_for(const fs::path& input) const {
  std::string cmd = command_template;
  const std::string quoted = shell_quote(input.string());
  const std::string placeholder = "{input}";
  for (auto pos = cmd.find(placeholder); pos != std::string::npos; pos = cmd.find(placeholder, pos + quoted.size())) {
    cmd.replace(pos, placeholder.size(), quoted);
  }
  return cmd;
}

std::string sanitize_utf8(std::string_view bytes) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    if (c == 0) {
      ++i;
      continue;
    }
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len != 0 && i + len <= bytes.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (cc & 0x3F);
      }
    }
    // Reject overlong forms, surrogates and out-of-range code points.
    if (ok) {
      static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
      ok = cp >= kMin[len] && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    }
    if (ok) {
      out.append(bytes.substr(i, len));
      i += len;
    } else {
      out.append(kReplacement);
      ++i;
    }
  }
  return out;
}

std::size_t utf8_length(std::string_view text) noexcept {
  return static_cast<std::size_t>(std::count_if(
      text.begin(), text.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string sanitize_doc_id(const fs::path& path) {
  std::string id;
  for (unsigned char c : path.stem().string()) {
    const auto lc = static_cast<char>(std::tolower(c));
    if ((lc >= 'a' && lc <= 'z') || (lc >= '0' && lc <= '9') || lc == '_' || lc == '-') {
      id.push_back(lc);
    } else {
      id.push_back('_');
    }
  }
  if (id.empty()) id = "doc";
  return id;
}

bool is_candidate_file(const fs::path& path) {
  const auto ext = lower_extension(path);
  return ext == ".txt" || ext == ".pdf";
}

std::string extract_text(const fs::path& path, const ConverterConfig& converter) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorCode::MissingFile, "no such file: " + path.string());
  const auto ext = lower_extension(path);
  std::string text;
  if (ext == ".txt") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    text = sanitize_utf8(ss.str());
  } else if (ext == ".pdf") {
    text = sanitize_utf8(run_converter(path, converter));
  } else {
    throw Error(ErrorCode::UnsupportedExtension, "unsupported extension '" + ext + "': " + path.string());
  }
  if (blank(text)) throw Error(ErrorCode::EmptyDocument, "document is empty: " + path.string());
  return text;
}

CorpusManifest ingest_directory(const fs::path& dir, const ConverterConfig& converter,
                                const LabelerConfig& labeler_cfg) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::MissingFile, "not a directory: " + dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_candidate_file(entry.path())) files.push_back(entry.path());
  }
  if (files.empty()) throw Error(ErrorCode::EmptyDirectory, "no .txt or .pdf files in " + dir.string());
  std::sort(files.begin(), files.end());

  CorpusManifest manifest;
  manifest.created_at = utc_now();
  manifest.converter_id = converter.command_template;

  // Sorted file order makes the collision suffixes deterministic.
  std::set<std::string> used;
  for (const auto& file : files) {
    std::string text;
    try {
      text = extract_text(file, converter);
    } catch (const Error& e) {
      manifest.errors.push_back({file, e.code(), e.what()});
      continue;
    }
    const std::string base = sanitize_doc_id(file);
    std::string id = base;
    for (std::size_t n = 2; used.contains(id); ++n) id = base + "_" + std::to_string(n);
    used.insert(id);

    CaseDocument doc;
    doc.doc_id = std::move(id);
    doc.char_count = utf8_length(text);
    doc.label = extract_disposition(text, labeler_cfg).label;
    doc.raw_text = std::move(text);
    doc.source_path = file;
    manifest.documents.push_back(std::move(doc));
  }
  std::sort(manifest.documents.begin(), manifest.documents.end(),
            [](const CaseDocument& a, const CaseDocument& b) { return a.doc_id < b.doc_id; });
  return manifest;
}

std::string format_manifest(const CorpusManifest& manifest) {
  std::ostringstream out;
  out << "# created_at=" << manifest.created_at << '\n';
  out << "# converter=" << manifest.converter_id << '\n';
  for (const auto& d : manifest.documents) {
    out << d.doc_id << '\t' << (d.label ? disposition_name(*d.label) : std::string_view("?")) << '\t'
        << d.char_count << '\t' << d.source_path.string() << '\n';
  }
  for (const auto& e : manifest.errors) {
    std::string msg = e.message;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::replace(msg.begin(), msg.end(), '\t', ' ');
    out << "#error\t" << e.source_path.string() << '\t' << error_name(e.code) << '\t' << msg << '\n';
  }
  return out.str();
}

}  // namespace verdictpipe
