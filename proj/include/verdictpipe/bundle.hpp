#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "verdictpipe/learners.hpp"
#include "verdictpipe/pipeline.hpp"
#include "verdictpipe/vectorizer.hpp"

namespace verdictpipe {

inline constexpr int kBundleFormatVersion = 1;

/// Frozen unit of deployment: how to featurize, the vocabulary, and one model.
struct ModelBundle {
  int format_version = kBundleFormatVersion;
  PipelineConfig pipeline;
  Vocabulary vocabulary;
  TrainedModel model;
};

nlohmann::json prep_config_to_json(const PipelineConfig& cfg);
nlohmann::json labeler_config_to_json(const LabelerConfig& cfg);
nlohmann::json vocabulary_to_json(const Vocabulary& vocab);
nlohmann::json model_to_json(const TrainedModel& model);

// The *_from_json readers throw Error{CorruptBundle} on any schema violation.
void prep_config_from_json(const nlohmann::json& j, PipelineConfig& cfg);
LabelerConfig labeler_config_from_json(const nlohmann::json& j);
Vocabulary vocabulary_from_json(const nlohmann::json& j);
TrainedModel model_from_json(const nlohmann::json& j);

nlohmann::json bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const nlohmann::json& j);

/// Serialized text (stable key order, shortest round-trip doubles).
std::string serialize_bundle(const ModelBundle& bundle);
ModelBundle deserialize_bundle(const std::string& text);

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
/// Throws IoFailure, SchemaVersionMismatch or CorruptBundle.
ModelBundle load_bundle(const std::filesystem::path& path);

/// 16 hex digits of FNV-1a over the serialized bundle.
std::string bundle_fingerprint(const ModelBundle& bundle);

}  // namespace verdictpipe
