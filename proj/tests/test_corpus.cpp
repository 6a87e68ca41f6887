#include <doctest.h>

#include <functional>
#include <set>

#include "support.hpp"
#include "verdictpipe/corpus.hpp"
#include "verdictpipe/error.hpp"
#include "verdictpipe/synth.hpp"

using namespace verdictpipe;
using vptest::ScratchDir;
using vptest::write_file;

namespace {

ConverterConfig fixture_converter() {
  return ConverterConfig{(vptest::data_dir() / "extract_pdf_strings.sh").string() + " {input}"};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Empty;
}

std::string strip_created_at(const std::string& manifest) {
  return manifest.substr(manifest.find('\n') + 1);
}

}  // namespace

TEST_CASE("extract_text on plain text") {
  ScratchDir dir("extract");
  write_file(dir / "a.txt", "appeal allowed");
  CHECK(extract_text(dir / "a.txt", {}) == "appeal allowed");

  write_file(dir / "empty.txt", "");
  CHECK(code_of([&] { extract_text(dir / "empty.txt", {}); }) == ErrorCode::EmptyDocument);
  write_file(dir / "blank.txt", " \n\t ");
  CHECK(code_of([&] { extract_text(dir / "blank.txt", {}); }) == ErrorCode::EmptyDocument);
  CHECK(code_of([&] { extract_text(dir / "nope.txt", {}); }) == ErrorCode::MissingFile);
  write_file(dir / "a.docx", "x");
  CHECK(code_of([&] { extract_text(dir / "a.docx", {}); }) == ErrorCode::UnsupportedExtension);
}

TEST_CASE("extract_text runs the converter for pdf") {
  const auto pdf = vptest::data_dir() / "one_page.pdf";
  CHECK(extract_text(pdf, fixture_converter()) == "In the result, the appeal is allowed.\n");

  ScratchDir dir("pdf");
  write_file(dir / "broken.pdf", "not a pdf at all");
  CHECK(code_of([&] { extract_text(dir / "broken.pdf", fixture_converter()); }) == ErrorCode::ConverterFailed);
  // A converter that succeeds but prints nothing.
  CHECK(code_of([&] { extract_text(pdf, ConverterConfig{"true {input}"}); }) == ErrorCode::ConverterFailed);
  CHECK(code_of([&] { extract_text(pdf, ConverterConfig{"/nonexistent/converter {input}"}); }) ==
        ErrorCode::ConverterFailed);
}

TEST_CASE("converter input path is shell-quoted") {
  ScratchDir dir("quote");
  const auto odd = dir / "it's a $(file).pdf";
  std::filesystem::copy_file(vptest::data_dir() / "one_page.pdf", odd);
  CHECK(extract_text(odd, fixture_converter()) == "In the result, the appeal is allowed.\n");
}

TEST_CASE("utf8 sanitation") {
  CHECK(sanitize_utf8("ok") == "ok");
  CHECK(sanitize_utf8(std::string("a\0b", 3)) == "ab");
  CHECK(sanitize_utf8("a\xff" "b") == "a\xef\xbf\xbd" "b");
  CHECK(sanitize_utf8("\xc3") == "\xef\xbf\xbd");
  CHECK(sanitize_utf8("\xc3\xa9") == "\xc3\xa9");
  // Overlong encoding of '/'.
  CHECK(sanitize_utf8("\xc0\xaf").find('/') == std::string::npos);
  CHECK(utf8_length("\xc3\xa9t\xc3\xa9") == 3);
}

TEST_CASE("doc ids") {
  CHECK(sanitize_doc_id("/x/Case No. 12.txt") == "case_no__12");
  CHECK(sanitize_doc_id("a-b_C.pdf") == "a-b_c");
  CHECK(is_candidate_file("x.TXT"));
  CHECK(is_candidate_file("x.pdf"));
  CHECK_FALSE(is_candidate_file("x.doc"));
}

TEST_CASE("ingest_directory records documents, labels and per-file errors") {
  ScratchDir dir("ingest");
  write_file(dir / "b.txt", "Facts. The appeal is dismissed.");
  write_file(dir / "a.txt", "Facts. The appeal is allowed.");
  write_file(dir / "c.txt", "Facts. The matter was adjourned.");
  write_file(dir / "empty.txt", "");
  write_file(dir / "notes.md", "ignored");
  const auto m = ingest_directory(dir.path(), {}, LabelerConfig::defaults());
  REQUIRE(m.documents.size() == 3);
  CHECK(m.documents[0].doc_id == "a");
  CHECK(m.documents[0].label == Disposition::Allow);
  CHECK(m.documents[1].label == Disposition::Dismiss);
  CHECK_FALSE(m.documents[2].label.has_value());
  REQUIRE(m.errors.size() == 1);
  CHECK(m.errors[0].code == ErrorCode::EmptyDocument);
  // Entries + errors account for every candidate file.
  CHECK(m.documents.size() + m.errors.size() == 4);
  for (const auto& d : m.documents) CHECK(d.char_count == utf8_length(d.raw_text));
}

TEST_CASE("doc id collisions get unique suffixes") {
  ScratchDir dir("collide");
  write_file(dir / "a.pdf", "ignored");  // fails conversion, never gets an id
  write_file(dir / "A.txt", "one");
  write_file(dir / "a.txt", "two");
  write_file(dir / "a_2.txt", "three");
  const auto m = ingest_directory(dir.path(), ConverterConfig{"false {input}"}, LabelerConfig::defaults());
  std::set<std::string> ids;
  for (const auto& d : m.documents) ids.insert(d.doc_id);
  CHECK(ids.size() == 3);
  CHECK(ids.contains("a"));
  CHECK(m.errors.size() == 1);
}

TEST_CASE("ingest of an empty directory") {
  ScratchDir dir("emptydir");
  write_file(dir / "readme.md", "x");
  CHECK(code_of([&] { ingest_directory(dir.path(), {}, LabelerConfig::defaults()); }) == ErrorCode::EmptyDirectory);
}

TEST_CASE("manifest is deterministic apart from created_at") {
  ScratchDir dir("determ");
  write_synthetic_corpus(generate_synthetic_corpus(30, 1), dir.path());
  write_file(dir / "zz_empty.txt", "");
  const auto a = format_manifest(ingest_directory(dir.path(), {}, LabelerConfig::defaults()));
  const auto b = format_manifest(ingest_directory(dir.path(), {}, LabelerConfig::defaults()));
  CHECK(a.rfind("# created_at=", 0) == 0);
  CHECK(strip_created_at(a) == strip_created_at(b));
  CHECK(a.find("#error\t") != std::string::npos);
  CHECK(a.find("case_00001\tallow\t") != std::string::npos);
}

TEST_CASE("synthetic corpus ingests fully labeled") {
  ScratchDir dir("synth");
  const auto docs = generate_synthetic_corpus(300, 7);
  write_synthetic_corpus(docs, dir.path());
  const auto m = ingest_directory(dir.path(), {}, LabelerConfig::defaults());
  REQUIRE(m.documents.size() == 300);
  for (std::size_t i = 0; i < m.documents.size(); ++i) CHECK(m.documents[i].label == docs[i].truth);
}
