#include "verdictpipe/vectorizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "verdictpipe/error.hpp"

namespace verdictpipe {
namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// RFC 4180 record splitter; returns false at end of input.
bool next_record(std::string_view text, std::size_t& pos, std::vector<std::string>& fields) {
  fields.clear();
  if (pos >= text.size()) return false;
  std::string field;
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          field.push_back('"');
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return true;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df, std::vector<double> idf,
                       std::size_t corpus_size, double min_df_ratio)
    : terms_(std::move(terms)),
      df_(std::move(df)),
      idf_(std::move(idf)),
      corpus_size_(corpus_size),
      min_df_ratio_(min_df_ratio) {
  if (df_.size() != terms_.size() || idf_.size() != terms_.size()) {
    throw Error(ErrorCode::LengthMismatch, "vocabulary columns differ in length");
  }
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw Error(ErrorCode::CorruptBundle, "vocabulary terms are not strictly sorted");
    }
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> Vocabulary::index_of(const std::string& term) const {
  const auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::min_df_count(double min_df_ratio, std::size_t corpus_size) {
  const double raw = min_df_ratio * static_cast<double>(corpus_size);
  const double nearest = std::round(raw);
  // 0.1 * 30 = 3.0000000000000004 must give 3, not 4.
  if (std::abs(raw - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(raw));
}

double Vocabulary::smoothed_idf(std::size_t corpus_size, std::size_t df) {
  return std::log((1.0 + static_cast<double>(corpus_size)) / (1.0 + static_cast<double>(df))) + 1.0;
}

double FeatureVector::value(std::uint32_t index) const noexcept {
  const auto it = std::lower_bound(entries.begin(), entries.end(), index,
                                   [](const auto& e, std::uint32_t i) { return e.first < i; });
  return (it != entries.end() && it->first == index) ? it->second : 0.0;
}

void Dataset::validate() const {
  if (labels.size() != vectors.size() || doc_ids.size() != vectors.size()) {
    throw Error(ErrorCode::LengthMismatch, "dataset columns differ in length");
  }
}

Dataset Dataset::select(std::span<const std::size_t> rows) const {
  Dataset out;
  out.feature_names = feature_names;
  out.vectors.reserve(rows.size());
  for (std::size_t r : rows) {
    out.vectors.push_back(vectors.at(r));
    out.labels.push_back(labels.at(r));
    out.doc_ids.push_back(doc_ids.at(r));
  }
  return out;
}

Vocabulary build_vocabulary(std::span<const NgramBag> bags, double min_df_ratio) {
  if (bags.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot build a vocabulary from zero documents");
  if (!(min_df_ratio > 0.0 && min_df_ratio <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "min_df_ratio must be in (0,1]");
  }
  std::map<std::string, std::size_t> df;
  for (const auto& bag : bags) {
    for (const auto& [term, count] : bag.counts) {
      if (count > 0) ++df[term];
    }
  }
  const std::size_t n = bags.size();
  const std::size_t threshold = Vocabulary::min_df_count(min_df_ratio, n);

  std::vector<std::string> terms;
  std::vector<std::size_t> dfs;
  std::vector<double> idfs;
  for (const auto& [term, d] : df) {
    if (d < threshold) continue;
    terms.push_back(term);
    dfs.push_back(d);
    idfs.push_back(Vocabulary::smoothed_idf(n, d));
  }
  if (terms.empty()) {
    throw Error(ErrorCode::EmptyVocabulary,
                "no term reaches document frequency " + std::to_string(threshold) + " of " + std::to_string(n));
  }
  return Vocabulary(std::move(terms), std::move(dfs), std::move(idfs), n, min_df_ratio);
}

FeatureVector vectorize(const NgramBag& bag, const Vocabulary& vocab) {
  FeatureVector v;
  for (const auto& [term, count] : bag.counts) {
    if (const auto idx = vocab.index_of(term)) {
      v.entries.emplace_back(*idx, static_cast<double>(count) * vocab.idf()[*idx]);
    }
  }
  std::sort(v.entries.begin(), v.entries.end());
  double sq = 0.0;
  for (const auto& [i, w] : v.entries) sq += w * w;
  v.l2_norm = std::sqrt(sq);
  if (v.l2_norm > 0.0) {
    for (auto& [i, w] : v.entries) w /= v.l2_norm;
  }
  return v;
}

std::string format_csv(const Dataset& ds) {
  ds.validate();
  std::string out;
  for (const auto& name : ds.feature_names) {
    out += csv_escape(name);
    out.push_back(',');
  }
  out += "label\n";
  char buf[32];
  for (std::size_t r = 0; r < ds.size(); ++r) {
    std::vector<double> dense(ds.feature_names.size(), 0.0);
    for (const auto& [i, w] : ds.vectors[r].entries) dense.at(i) = w;
    for (double w : dense) {
      std::snprintf(buf, sizeof buf, "%.6g", w);
      out += buf;
      out.push_back(',');
    }
    out += disposition_name(ds.labels[r]);
    out.push_back('\n');
  }
  return out;
}

void export_csv(const Dataset& ds, const std::filesystem::path& path) {
  if (ds.size() == 0) throw Error(ErrorCode::EmptyDataset, "refusing to export an empty dataset");
  const std::string text = format_csv(ds);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

Dataset parse_csv(std::string_view text) {
  Dataset ds;
  std::size_t pos = 0;
  std::vector<std::string> fields;
  if (!next_record(text, pos, fields) || fields.empty() || fields.back() != "label") {
    throw Error(ErrorCode::CorruptBundle, "csv header must end with a 'label' column");
  }
  ds.feature_names.assign(fields.begin(), fields.end() - 1);
  const std::size_t width = fields.size();
  std::size_t row = 0;
  while (next_record(text, pos, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != width) {
      throw Error(ErrorCode::CorruptBundle, "csv row " + std::to_string(row + 1) + " has wrong width");
    }
    const auto label = parse_disposition(fields.back());
    if (!label) throw Error(ErrorCode::CorruptBundle, "csv row " + std::to_string(row + 1) + ": bad label");
    FeatureVector v;
    double sq = 0.0;
    for (std::size_t i = 0; i + 1 < width; ++i) {
      const double w = std::stod(fields[i]);
      if (w != 0.0) {
        v.entries.emplace_back(static_cast<std::uint32_t>(i), w);
        sq += w * w;
      }
    }
    v.l2_norm = std::sqrt(sq);
    ds.vectors.push_back(std::move(v));
    ds.labels.push_back(*label);
    char id[32];
    std::snprintf(id, sizeof id, "row_%06zu", row);
    ds.doc_ids.emplace_back(id);
    ++row;
  }
  return ds;
}

Dataset import_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace verdictpipe
