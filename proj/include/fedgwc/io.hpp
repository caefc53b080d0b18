#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedgwc/datagen.hpp"
#include "fedgwc/interaction.hpp"
#include "fedgwc/orchestrator.hpp"

namespace fedgwc {

/// Shortest-round-trip decimal text for a double.
std::string format_double(double v);

/// Federation directory: manifest.json plus one train/test TSV pair per
/// client (label, then features, tab-separated).
void write_federation(const std::filesystem::path& dir, const Federation& fed,
                      const nlohmann::json& config_snapshot);
Federation load_federation(const std::filesystem::path& dir);

/// Plain numeric matrix text: a name line, K line, client-id line, then
/// row-major rows in decimal text.
void write_matrix_text(const std::filesystem::path& path, const std::string& name,
                       const Matrix& m, const std::vector<ClientId>& ids);

/// Interaction state persisted as JSON (clients, alpha, round, MSE, P).
nlohmann::json interaction_to_json(const InteractionState& state);
InteractionState interaction_from_json(const nlohmann::json& doc);

/// Line-delimited experiment log, chronological; one summary line at the end.
void write_log_jsonl(const std::filesystem::path& path, const ExperimentLog& log);

nlohmann::json tree_to_json(const ExperimentLog& log);
nlohmann::json labeling_to_json(const ExperimentLog& log);
nlohmann::json metrics_to_json(const ExperimentLog& log);

void write_model_text(const std::filesystem::path& path, const ModelParams& model);

/// FNV-1a content hash of a file, as 16 hex digits.
std::string hash_file(const std::filesystem::path& path);

/// Manifest with config snapshot, seed, version and per-artifact hashes.
/// Paths inside are relative to `dir`.
void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const nlohmann::json& config_snapshot, std::uint64_t seed,
                    const std::vector<std::string>& outputs);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace fedgwc
