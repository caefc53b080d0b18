#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedgwc/common.hpp"

namespace fedgwc {

/// Output path resolution: relative paths land under $FEDGWC_OUT when that is
/// set; an empty path falls back to $FEDGWC_OUT itself.
std::filesystem::path resolve_out_dir(const std::string& arg);

/// generate: validate the federation spec and write datasets + manifest.
void cmd_generate(const std::string& config_path, const std::string& out_dir,
                  const std::vector<std::string>& overrides);

/// run: execute the full recursive procedure on a generated federation and
/// write the log, labeling, metrics, models, states and manifest.
void cmd_run(const std::string& config_path, const std::string& federation_dir,
             const std::string& out_dir, const std::vector<std::string>& overrides);

/// eval: score a run's final labeling against the federation's histograms
/// (WAS/WADB) and ground truth (Rand, when present). Writes eval.json.
void cmd_eval(const std::string& federation_dir, const std::string& run_dir);

/// report: emit tidy TSV tables from a completed run.
void cmd_report(const std::string& run_dir);

/// dump-state: write interaction and affinity matrices as plain text.
void cmd_dump_state(const std::string& run_dir, int cluster_id, std::optional<double> beta);

}  // namespace fedgwc
