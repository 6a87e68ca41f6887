#include "verdictpipe/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "verdictpipe/error.hpp"
#include "verdictpipe/rng.hpp"

namespace verdictpipe {
namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

void append_row(std::string& out, const char* name, const std::string& p, const std::string& r,
                const std::string& f) {
  char line[96];
  std::snprintf(line, sizeof line, "%-14s%10s%10s%10s\n", name, p.c_str(), r.c_str(), f.c_str());
  out += line;
}

std::string two(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

ConfusionMatrix confusion(std::span<const Disposition> y_true, std::span<const Disposition> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::LengthMismatch, "y_true and y_pred differ in length");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.counts[class_index(y_true[i])][class_index(y_pred[i])];
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    const auto support = std::accumulate(cm.counts[t].begin(), cm.counts[t].end(), std::size_t{0});
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      cm.normalized[t][p] = support == 0 ? 0.0 : static_cast<double>(cm.counts[t][p]) / static_cast<double>(support);
    }
  }
  return cm;
}

ClassificationReport report_from_confusion(const ConfusionMatrix& cm) {
  ClassificationReport rep;
  std::size_t diagonal = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    std::size_t predicted = 0;
    std::size_t support = 0;
    for (std::size_t j = 0; j < kNumClasses; ++j) {
      predicted += cm.counts[j][k];
      support += cm.counts[k][j];
    }
    const double tp = static_cast<double>(cm.counts[k][k]);
    auto& m = rep.per_class[k];
    m.support = support;
    m.precision = ratio(tp, static_cast<double>(predicted));
    m.recall = ratio(tp, static_cast<double>(support));
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    diagonal += cm.counts[k][k];
    rep.total += support;
  }
  rep.accuracy = ratio(static_cast<double>(diagonal), static_cast<double>(rep.total));
  // Macro averages run over the classes that occur in either the truth or
  // the predictions, so a class absent from both does not drag them down.
  std::array<bool, kNumClasses> present{};
  std::size_t n_present = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    for (std::size_t j = 0; j < kNumClasses; ++j) present[k] = present[k] || cm.counts[k][j] > 0 || cm.counts[j][k] > 0;
    n_present += present[k];
  }
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto& m = rep.per_class[k];
    if (present[k]) {
      rep.macro_avg.precision += m.precision / static_cast<double>(n_present);
      rep.macro_avg.recall += m.recall / static_cast<double>(n_present);
      rep.macro_avg.f1 += m.f1 / static_cast<double>(n_present);
    }
    const double w = ratio(static_cast<double>(m.support), static_cast<double>(rep.total));
    rep.weighted_avg.precision += w * m.precision;
    rep.weighted_avg.recall += w * m.recall;
    rep.weighted_avg.f1 += w * m.f1;
  }
  return rep;
}

ClassificationReport classification_report(std::span<const Disposition> y_true,
                                           std::span<const Disposition> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::LengthMismatch, "y_true and y_pred differ in length");
  }
  if (y_true.empty()) throw Error(ErrorCode::Empty, "classification report needs at least one sample");
  return report_from_confusion(confusion(y_true, y_pred));
}

std::string render_report(const ClassificationReport& report) {
  std::string out;
  append_row(out, "", "precision", "recall", "f1-score");
  out += '\n';
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto& m = report.per_class[k];
    append_row(out, std::string(disposition_name(disposition_at(k))).c_str(), two(m.precision), two(m.recall),
               two(m.f1));
  }
  out += '\n';
  append_row(out, "accuracy", "", "", two(report.accuracy));
  append_row(out, "macro avg", two(report.macro_avg.precision), two(report.macro_avg.recall),
             two(report.macro_avg.f1));
  append_row(out, "weighted avg", two(report.weighted_avg.precision), two(report.weighted_avg.recall),
             two(report.weighted_avg.f1));
  return out;
}

nlohmann::json report_to_json(const ClassificationReport& report, const ConfusionMatrix& cm) {
  nlohmann::json classes = nlohmann::json::object();
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto& m = report.per_class[k];
    classes[std::string(disposition_name(disposition_at(k)))] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  auto avg = [](const AverageMetrics& a) {
    return nlohmann::json{{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
  };
  return {{"per_class", classes},
          {"accuracy", report.accuracy},
          {"macro_avg", avg(report.macro_avg)},
          {"weighted_avg", avg(report.weighted_avg)},
          {"total", report.total},
          {"confusion", cm.counts},
          {"confusion_normalized", cm.normalized}};
}

std::string confusion_csv(const ConfusionMatrix& cm, bool normalized) {
  std::string out = "true\\pred,allow,dismiss,dispose\n";
  char buf[32];
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    out += disposition_name(disposition_at(t));
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      if (normalized) {
        std::snprintf(buf, sizeof buf, ",%.4f", cm.normalized[t][p]);
      } else {
        std::snprintf(buf, sizeof buf, ",%zu", cm.counts[t][p]);
      }
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::size_t test_count_for_class(std::size_t n, double test_ratio) {
  const auto k = static_cast<std::size_t>(std::floor(test_ratio * static_cast<double>(n) + 0.5));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

SplitIndices stratified_split(std::span<const std::string> doc_ids, std::span<const Disposition> labels,
                              const SplitConfig& cfg) {
  if (doc_ids.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "doc_ids and labels differ in length");
  if (!(cfg.test_ratio > 0.0 && cfg.test_ratio < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "test_ratio must be in (0,1)");
  }
  SplitIndices out;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (class_index(labels[i]) == k) members.push_back(i);
    }
    if (members.empty()) continue;
    if (members.size() < 2) {
      throw Error(ErrorCode::ClassTooSmall, "class '" + std::string(disposition_name(disposition_at(k))) +
                                                "' has fewer than 2 samples");
    }
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return doc_ids[a] != doc_ids[b] ? doc_ids[a] < doc_ids[b] : a < b; });
    CounterRng rng(cfg.seed, k);
    deterministic_shuffle(members.begin(), members.end(), rng);
    const std::size_t n_test = test_count_for_class(members.size(), cfg.test_ratio);
    out.test.insert(out.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitConfig& cfg) {
  ds.validate();
  const auto idx = stratified_split(ds.doc_ids, ds.labels, cfg);
  return {ds.select(idx.train), ds.select(idx.test)};
}

}  // namespace verdictpipe
